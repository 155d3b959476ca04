#pragma once

// Synthetic planted-group fixture written to a scratch directory, plus a
// ready-to-run pipeline configuration over it.

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "perspective/pipeline.hpp"
#include "perspective/synthetic.hpp"

namespace fixture {

inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("perspective-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

struct Synthetic {
  persp::SyntheticDataset data;
  persp::RunConfig config;
};

inline Synthetic synthetic(const std::filesystem::path& dir, persp::SyntheticSpec spec = {}) {
  Synthetic s{persp::make_synthetic(spec), {}};
  persp::write_synthetic(s.data, dir);
  s.config.annotations = dir / "annotations.csv";
  s.config.texts = dir / "texts.jsonl";
  s.config.annotators = dir / "annotators.csv";
  s.config.partition.threads = 1;
  s.config.output_dir = dir / "run";
  return s;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Every regular file under dir, keyed by relative path.
inline std::map<std::string, std::string> snapshot(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[std::filesystem::relative(e.path(), dir).generic_string()] = slurp(e.path());
  }
  return files;
}

// Drops the started_at / finished_at lines of a manifest.
inline std::string without_timestamps(const std::string& manifest) {
  std::istringstream in(manifest);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.find("\"started_at\"") != std::string::npos || line.find("\"finished_at\"") != std::string::npos) continue;
    out += line + "\n";
  }
  return out;
}

}  // namespace fixture
