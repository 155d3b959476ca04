#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "perspective/types.hpp"

namespace persp {

struct AugmentPolicy {
  unsigned factor = 3;            // F >= 1
  double delete_threshold = 1.0;  // delta in (0, 1]

  void validate() const;
};

// 0 when p >= delta, else max(1, round(F * (1 - p))). Undefined p keeps one copy.
std::size_t copy_count(std::optional<double> p, const AugmentPolicy& policy);

struct AugmentResult {
  // Expanded training sequence: gold order, copies adjacent.
  std::vector<LabeledItem> rows;
  // Copy count per retained item, gold order.
  std::vector<std::pair<std::string, std::size_t>> copies;
  std::vector<std::string> deleted;
  // Items without a defined p (kept once).
  std::vector<std::string> undefined;
};

/// Replicates training items inversely to their polarization and drops the
/// maximally polarized ones. Items absent from `p_scores` count as undefined.
AugmentResult replicate_by_polarization(const GoldStandard& train,
                                        const std::map<std::string, std::optional<double>>& p_scores,
                                        const AugmentPolicy& policy);

// Gold CSV plus a provenance column: `item_id,label,copies`.
void write_augmented_csv(const AugmentResult& result, const LabelScheme& scheme, std::ostream& out);

}  // namespace persp
