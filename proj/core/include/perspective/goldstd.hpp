#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "perspective/corpus.hpp"
#include "perspective/types.hpp"

namespace persp {

enum class TiePolicy { kPreferPositive, kPreferNegative, kPreferExpert, kError };

std::optional<TiePolicy> parse_tie_policy(std::string_view name);
const char* to_string(TiePolicy policy);

/// Per-item modal label of the subset's annotations.
///
/// Ties: prefer-positive picks the positive class when it is tied (otherwise
/// the lowest tied index); prefer-negative picks the lowest tied non-positive
/// index; prefer-expert takes the unique modal label of the subset's expert
/// annotators on that item and errors if they are absent or tied; error
/// throws naming the item. Items the subset never annotated are excluded.
GoldStandard majority_gold(const AnnotationMatrix& matrix, std::span<const std::size_t> annotators, TiePolicy policy,
                           std::string source = "overall");
GoldStandard majority_gold(const AnnotationMatrix& matrix, std::span<const std::string> annotator_ids,
                           TiePolicy policy, std::string source = "overall");

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  bool stratified = true;
};

/// Train/test membership shared by every gold built from one dataset.
struct SplitManifest {
  std::uint64_t seed = 0;
  bool stratified = true;
  double train_fraction = 0.8;
  std::vector<std::string> train_ids;  // sorted
  std::vector<std::string> test_ids;   // sorted

  bool operator==(const SplitManifest&) const = default;
};

// Deterministic for a given seed. Train size is floor(n * fraction); in
// stratified mode each class contributes its share within one item.
SplitManifest make_split(const GoldStandard& gold, const SplitSpec& spec);

// Restricts a gold to the manifest's train and test ids.
std::pair<GoldStandard, GoldStandard> apply_split(const GoldStandard& gold, const SplitManifest& split);

std::pair<GoldStandard, GoldStandard> train_test_split(const GoldStandard& gold, const SplitSpec& spec);

std::string to_json(const SplitManifest& split);
SplitManifest split_from_json(const std::string& text);

// Gold CSV: header `item_id,label`.
void write_gold_csv(const GoldStandard& gold, const LabelScheme& scheme, std::ostream& out);
GoldStandard read_gold_csv(std::istream& in, const LabelScheme& scheme, const std::string& source = "<input>");
GoldStandard read_gold_csv(const std::filesystem::path& path, const LabelScheme& scheme);

}  // namespace persp
