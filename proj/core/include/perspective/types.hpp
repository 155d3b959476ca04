#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace persp {

// Index into LabelScheme::categories(); kMissing marks an empty cell.
using Label = std::int32_t;
inline constexpr Label kMissing = -1;

/// Ordered set of category names plus the designated positive (detection) class.
class LabelScheme {
 public:
  LabelScheme(std::vector<std::string> categories, std::string positive);

  /// {"0", "1"} with "1" positive.
  static LabelScheme binary();

  std::size_t size() const noexcept { return categories_.size(); }
  const std::vector<std::string>& categories() const noexcept { return categories_; }
  const std::string& name(Label label) const;
  std::optional<Label> find(std::string_view name) const;
  Label positive() const noexcept { return positive_; }
  bool is_binary() const noexcept { return categories_.size() == 2; }
  // Binary schemes only.
  Label negative() const;

  bool operator==(const LabelScheme&) const = default;

 private:
  std::vector<std::string> categories_;
  Label positive_ = 0;
};

struct LabeledItem {
  std::string item_id;
  Label label = kMissing;

  bool operator==(const LabeledItem&) const = default;
};

/// Aggregated label per item, sorted by item id.
struct GoldStandard {
  std::vector<LabeledItem> labels;
  std::string source = "overall";
  std::string tie_policy;
  std::size_t tie_count = 0;
  // Items with no annotation from the source annotators.
  std::vector<std::string> excluded;

  std::size_t size() const noexcept { return labels.size(); }
  std::optional<Label> find(std::string_view item_id) const;
  std::vector<std::string> ids() const;
  // Restores the sorted-by-id invariant; throws on duplicate ids.
  void normalize();
};

struct Prediction {
  std::string item_id;
  Label label = kMissing;
  std::optional<double> score;

  bool operator==(const Prediction&) const = default;
};

/// Output of one classifier, sorted by item id.
struct PredictionSet {
  std::vector<Prediction> predictions;
  std::string source;

  std::size_t size() const noexcept { return predictions.size(); }
  const Prediction* find(std::string_view item_id) const;
  std::vector<std::string> ids() const;
  void normalize();
};

/// Disjoint annotator groups. Ids are sorted within each group; `names` is
/// either empty or holds one display name per group.
struct Partition {
  std::vector<std::vector<std::string>> groups;
  std::vector<std::string> names;

  std::size_t k() const noexcept { return groups.size(); }
  std::string group_name(std::size_t w) const;

  bool operator==(const Partition&) const = default;
};

}  // namespace persp
