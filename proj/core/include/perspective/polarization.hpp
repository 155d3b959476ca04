#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "perspective/agreement.hpp"
#include "perspective/corpus.hpp"
#include "perspective/rational.hpp"
#include "perspective/types.hpp"

namespace persp {

/// A Partition bound to the annotator indices of one matrix.
class ResolvedPartition {
 public:
  // Throws on unknown or repeated annotator ids.
  ResolvedPartition(const AnnotationMatrix& matrix, const Partition& partition);

  std::size_t k() const noexcept { return members_.size(); }
  const std::vector<std::vector<std::size_t>>& members() const noexcept { return members_; }
  // Group index of an annotator, -1 when the annotator is not covered.
  int group_of(std::size_t annotator) const { return group_of_.at(annotator); }
  const Partition& partition() const noexcept { return partition_; }

 private:
  Partition partition_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<int> group_of_;
};

/// P(i) = (1/k) * sum_w a(G^w_i) * (1 - a(G_i)), computed exactly.
struct PIndex {
  Rational exact;
  double value = 0.0;
  std::vector<AgreementScore> groups;
  AgreementScore overall;
};

// Per-group category counts. nullopt when any group has fewer than two annotations.
std::optional<PIndex> p_index(std::span<const std::vector<std::size_t>> group_counts);
std::optional<PIndex> p_index(std::span<const std::vector<Label>> group_annotations, std::size_t category_count);

struct PolarizationScore {
  std::string item_id;
  std::optional<double> p;  // nullopt: some group had fewer than two annotations
  std::optional<Rational> exact;
  std::vector<std::optional<double>> group_agreements;
  std::optional<double> overall_agreement;
  // At maximal polarization: which group(s) voted positive (binary schemes),
  // or each group's modal label otherwise.
  std::optional<std::string> direction;

  bool defined() const noexcept { return p.has_value(); }
};

inline constexpr double kPolarizationTolerance = 1e-9;

PolarizationScore p_index(const AnnotationMatrix& matrix, std::size_t item, const ResolvedPartition& partition);

// One score per matrix item, in matrix order.
std::vector<PolarizationScore> score_items(const AnnotationMatrix& matrix, const Partition& partition);

struct AveragePIndex {
  double mean = 0.0;
  std::size_t defined = 0;
  std::vector<std::string> skipped;
};

// Mean over items with a defined score; throws if there are none.
AveragePIndex average_p_index(const AnnotationMatrix& matrix, const Partition& partition);

// Stable by p, ties by item id ascending, undefined items last.
std::vector<PolarizationScore> rank_by_polarization(const AnnotationMatrix& matrix, const Partition& partition,
                                                    bool descending = true);

struct PolarizationCensus {
  std::size_t items = 0;
  std::size_t defined = 0;
  std::size_t max_polarization = 0;   // p == 1
  std::size_t zero_polarization = 0;  // p == 0
  std::vector<std::pair<std::string, std::size_t>> directions;
  std::vector<std::string> max_items;
  std::vector<std::string> zero_items;
};

PolarizationCensus polarization_census(const AnnotationMatrix& matrix, const Partition& partition);

std::string to_json(const PolarizationCensus& census);

// `item_id<TAB>p[<TAB>text]`; undefined scores render as NA.
void write_ranked_tsv(std::span<const PolarizationScore> scores, std::ostream& out, const Corpus* texts = nullptr);

}  // namespace persp
