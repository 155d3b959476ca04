#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "perspective/corpus.hpp"
#include "perspective/manifest.hpp"
#include "perspective/types.hpp"

namespace cli {

/// Per-invocation state shared by every subcommand: the manifest being built
/// and where the primary output goes.
class Context {
 public:
  explicit Context(std::string command);

  // Empty path means stdout.
  void set_output(std::filesystem::path path) { output_ = std::move(path); }
  void set_manifest_path(std::filesystem::path path) { manifest_path_ = std::move(path); }
  void set_config(std::string json) { manifest_.set_config(std::move(json)); }
  void set_seed(std::uint64_t seed) { manifest_.set_seed(seed); }

  // Records an input file and returns it unchanged.
  const std::filesystem::path& input(const std::filesystem::path& path);
  // Writes the primary output (file or stdout).
  void emit(const std::string& contents);
  // Writes a secondary file output.
  void emit_file(const std::filesystem::path& path, const std::string& contents);
  // Records a file some library call already wrote.
  void record_output(const std::filesystem::path& path) { manifest_.add_output(path); }

  void fail(const std::string& message) { manifest_.fail(command_, message); }
  void write_manifest() const;

 private:
  std::filesystem::path manifest_location() const;

  std::string command_;
  persp::Manifest manifest_;
  std::filesystem::path output_;
  std::filesystem::path manifest_path_;
};

persp::LabelScheme make_scheme(const std::string& categories, const std::string& positive);

// "natural" uses annotator group tags; anything else is a partition JSON file.
persp::Partition resolve_partition(const persp::AnnotationMatrix& matrix, const std::string& spec, Context& ctx);

persp::AnnotationMatrix load_matrix(Context& ctx, const std::filesystem::path& annotations, const std::string& format,
                                    const std::string& annotators, const persp::LabelScheme& scheme,
                                    persp::Corpus* inline_texts = nullptr);

// Reads the `item_id<TAB>p[...]` dump written by polarize/rank; NA is undefined.
std::map<std::string, std::optional<double>> read_polarization_tsv(const std::filesystem::path& path);

std::string slurp(const std::filesystem::path& path);

}  // namespace cli
