#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "perspective/augment.hpp"
#include "perspective/classify.hpp"
#include "perspective/corpus.hpp"
#include "perspective/evalens.hpp"
#include "perspective/error.hpp"
#include "perspective/goldstd.hpp"
#include "perspective/partition.hpp"
#include "perspective/polarization.hpp"

namespace persp {

enum class PartitionMode { kNatural, kSearch };
enum class ClassifierKind { kReference, kImport };

/// Everything a full run needs. Relative paths in the JSON form resolve
/// against the config file's directory.
struct RunConfig {
  std::filesystem::path annotations;
  AnnotationFormat format = AnnotationFormat::LongCsv;
  std::optional<std::filesystem::path> texts;
  std::optional<std::filesystem::path> annotators;
  LabelScheme scheme = LabelScheme::binary();

  bool dedup = true;
  std::vector<std::string> keywords;  // empty: no keyword filter

  PartitionMode partition_mode = PartitionMode::kSearch;
  PartitionOptions partition;

  TiePolicy group_tie_policy = TiePolicy::kPreferPositive;
  TiePolicy overall_tie_policy = TiePolicy::kPreferPositive;
  SplitSpec split{0.8, 13, true};
  std::optional<AugmentPolicy> augment;

  ClassifierKind classifier = ClassifierKind::kReference;
  Hyperparams hyperparams;
  std::uint64_t model_seed = 0;
  // Import mode: role ("baseline" or a group name) -> predictions CSV.
  std::map<std::string, std::filesystem::path> imported;

  std::filesystem::path output_dir = "perspective-out";

  static RunConfig from_json(const std::string& text, const std::filesystem::path& base_dir = {});
  std::string to_json() const;
};

// Raised by full_pipeline; names the stage that failed.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message)
      : Error(stage + ": " + message), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct PipelineResult {
  Partition partition;
  double average_p = 0.0;
  std::optional<PartitionSearch> search;
  std::optional<double> natural_average;

  // Against the overall gold test split: baseline, each group, inclusive.
  std::vector<MetricsReport> overall;
  // Each group classifier against its own group gold test split.
  std::vector<MetricsReport> own_group;
  // Group classifiers and inclusive against the union-positive test gold.
  std::vector<MetricsReport> union_positive;

  PolarizationCensus census;
  std::optional<DisagreementCensus> disagreement;
  std::vector<std::string> artifacts;  // relative to output_dir
};

/// ingest -> dedup/filter -> partition -> group golds -> fixed test split ->
/// (augment) -> train or import per group -> inclusive ensemble -> evaluate.
/// Writes every artifact plus manifest.json (last) into output_dir. On
/// failure the manifest is still written, marked FAILED, and StageError is thrown.
PipelineResult full_pipeline(const RunConfig& config);

// Human-readable summary rendered from a finished output directory.
std::string render_summary(const std::filesystem::path& output_dir);

}  // namespace persp
