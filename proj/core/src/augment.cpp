#include "perspective/augment.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "perspective/csv.hpp"
#include "perspective/error.hpp"

namespace persp {

void AugmentPolicy::validate() const {
  if (factor < 1) throw Error("replication factor must be at least 1");
  if (!(delete_threshold > 0.0 && delete_threshold <= 1.0)) throw Error("delete threshold must lie in (0, 1]");
}

std::size_t copy_count(std::optional<double> p, const AugmentPolicy& policy) {
  if (!p) return 1;
  if (*p >= policy.delete_threshold) return 0;
  const auto scaled = std::lround(static_cast<double>(policy.factor) * (1.0 - *p));
  return static_cast<std::size_t>(std::max<long>(1, scaled));
}

AugmentResult replicate_by_polarization(const GoldStandard& train,
                                        const std::map<std::string, std::optional<double>>& p_scores,
                                        const AugmentPolicy& policy) {
  policy.validate();
  AugmentResult result;
  for (const auto& item : train.labels) {
    std::optional<double> p;
    if (auto it = p_scores.find(item.item_id); it != p_scores.end()) p = it->second;
    if (!p) result.undefined.push_back(item.item_id);
    const std::size_t copies = copy_count(p, policy);
    if (copies == 0) {
      result.deleted.push_back(item.item_id);
      continue;
    }
    result.copies.emplace_back(item.item_id, copies);
    result.rows.insert(result.rows.end(), copies, item);
  }
  return result;
}

void write_augmented_csv(const AugmentResult& result, const LabelScheme& scheme, std::ostream& out) {
  out << "item_id,label,copies\n";
  std::size_t row = 0;
  for (const auto& [id, copies] : result.copies) {
    csv::write_row(out, {id, scheme.name(result.rows[row].label), std::to_string(copies)});
    row += copies;
  }
}

}  // namespace persp
