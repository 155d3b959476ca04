#include "context.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "perspective/csv.hpp"
#include "perspective/error.hpp"
#include "perspective/partition.hpp"
#include "perspective/text.hpp"

namespace cli {

Context::Context(std::string command) : command_(command), manifest_(std::move(command)) {}

const std::filesystem::path& Context::input(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw persp::Error("input file '" + path.string() + "' not found");
  manifest_.add_input(path);
  return path;
}

void Context::emit(const std::string& contents) {
  if (output_.empty()) {
    std::cout << contents << std::flush;
    return;
  }
  emit_file(output_, contents);
}

void Context::emit_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  persp::write_file_atomic(path, contents);
  manifest_.add_output(path);
}

std::filesystem::path Context::manifest_location() const {
  if (!manifest_path_.empty()) return manifest_path_;
  if (!output_.empty()) return std::filesystem::path(output_.string() + ".manifest.json");
  return "perspective.manifest.json";
}

void Context::write_manifest() const {
  const auto path = manifest_location();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  manifest_.write(path);
}

persp::LabelScheme make_scheme(const std::string& categories, const std::string& positive) {
  std::vector<std::string> names;
  std::stringstream ss(categories);
  for (std::string part; std::getline(ss, part, ',');) names.push_back(part);
  return persp::LabelScheme(std::move(names), positive);
}

persp::Partition resolve_partition(const persp::AnnotationMatrix& matrix, const std::string& spec, Context& ctx) {
  if (spec == "natural") {
    auto natural = persp::natural_partition(matrix);
    if (!natural) throw persp::Error("natural partition needs at least two annotator group tags");
    return *natural;
  }
  return persp::partition_from_json(slurp(ctx.input(spec)));
}

persp::AnnotationMatrix load_matrix(Context& ctx, const std::filesystem::path& annotations, const std::string& format,
                                    const std::string& annotators, const persp::LabelScheme& scheme,
                                    persp::Corpus* inline_texts) {
  auto parsed = persp::parse_annotation_format(format);
  if (!parsed) throw persp::Error("unknown annotation format '" + format + "'");
  auto loaded = persp::load_annotations(ctx.input(annotations), *parsed, scheme);
  if (!annotators.empty()) {
    loaded.matrix = loaded.matrix.with_annotator_meta(persp::load_annotator_meta(ctx.input(annotators)));
  }
  if (inline_texts) *inline_texts = std::move(loaded.texts);
  return loaded.matrix;
}

std::map<std::string, std::optional<double>> read_polarization_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw persp::Error("cannot open '" + path.string() + "'");
  auto records = persp::csv::read(in, '\t', path.string());
  if (records.empty() || records.front().fields.size() < 2 || records.front().fields[0] != "item_id" ||
      records.front().fields[1] != "p") {
    throw persp::ParseError(path.string(), 1, "expected header item_id<TAB>p");
  }
  std::map<std::string, std::optional<double>> out;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& f = records[r].fields;
    if (f.size() < 2) throw persp::ParseError(path.string(), records[r].line, "expected at least two fields");
    if (f[1] == "NA") {
      out[f[0]] = std::nullopt;
      continue;
    }
    double v = 0.0;
    auto [end, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), v);
    if (ec != std::errc() || end != f[1].data() + f[1].size()) {
      throw persp::ParseError(path.string(), records[r].line, "bad p value '" + f[1] + "'");
    }
    out[f[0]] = v;
  }
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw persp::Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cli
