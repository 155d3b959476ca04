#include "perspective/polarization.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "json.hpp"
#include "perspective/error.hpp"
#include "perspective/report.hpp"

namespace persp {

ResolvedPartition::ResolvedPartition(const AnnotationMatrix& matrix, const Partition& partition)
    : partition_(partition), members_(partition.k()), group_of_(matrix.annotator_count(), -1) {
  if (partition.k() == 0) throw Error("partition has no groups");
  for (std::size_t w = 0; w < partition.k(); ++w) {
    if (partition.groups[w].empty()) throw Error("partition group " + std::to_string(w + 1) + " is empty");
    for (const auto& id : partition.groups[w]) {
      auto j = matrix.find_annotator(id);
      if (!j) throw Error("partition names unknown annotator '" + id + "'");
      if (group_of_[*j] != -1) throw Error("annotator '" + id + "' appears in two groups");
      group_of_[*j] = static_cast<int>(w);
      members_[w].push_back(*j);
    }
    std::sort(members_[w].begin(), members_[w].end());
  }
}

std::optional<PIndex> p_index(std::span<const std::vector<std::size_t>> group_counts) {
  if (group_counts.empty()) throw Error("p-index needs at least one group");
  const std::size_t cats = group_counts.front().size();
  std::vector<std::size_t> all(cats, 0);
  PIndex out;
  Rational group_sum(0);
  for (const auto& counts : group_counts) {
    if (counts.size() != cats) throw Error("groups disagree on the category count");
    auto a = intra_agreement(counts);
    if (!a) return std::nullopt;
    group_sum = group_sum + a->exact;
    out.groups.push_back(*a);
    for (std::size_t c = 0; c < cats; ++c) all[c] += counts[c];
  }
  auto overall = intra_agreement(std::span<const std::size_t>(all));
  out.overall = *overall;
  const Int128 k = static_cast<Int128>(group_counts.size());
  out.exact = group_sum * (Rational(1) - overall->exact) / Rational(k);
  out.value = out.exact.to_double();
  return out;
}

std::optional<PIndex> p_index(std::span<const std::vector<Label>> group_annotations, std::size_t category_count) {
  std::vector<std::vector<std::size_t>> counts;
  counts.reserve(group_annotations.size());
  for (const auto& g : group_annotations) counts.push_back(category_counts(g, category_count));
  return p_index(std::span<const std::vector<std::size_t>>(counts));
}

PolarizationScore p_index(const AnnotationMatrix& matrix, std::size_t item, const ResolvedPartition& partition) {
  const auto& scheme = matrix.scheme();
  const std::size_t cats = scheme.size();
  std::vector<std::vector<std::size_t>> counts(partition.k(), std::vector<std::size_t>(cats, 0));
  auto row = matrix.row(item);
  for (std::size_t w = 0; w < partition.k(); ++w) {
    for (auto j : partition.members()[w]) {
      if (row[j] != kMissing) ++counts[w][static_cast<std::size_t>(row[j])];
    }
  }

  PolarizationScore score;
  score.item_id = matrix.item_id(item);
  for (const auto& c : counts) {
    auto a = intra_agreement(std::span<const std::size_t>(c));
    score.group_agreements.push_back(a ? std::optional<double>(a->value) : std::nullopt);
  }
  auto p = p_index(std::span<const std::vector<std::size_t>>(counts));
  if (!p) {
    std::vector<std::size_t> all(cats, 0);
    for (const auto& c : counts) {
      for (std::size_t i = 0; i < cats; ++i) all[i] += c[i];
    }
    if (auto a = intra_agreement(std::span<const std::size_t>(all))) score.overall_agreement = a->value;
    return score;
  }
  score.p = p->value;
  score.exact = p->exact;
  score.overall_agreement = p->overall.value;

  if (p->value >= 1.0 - kPolarizationTolerance) {
    const auto& names = partition.partition();
    std::string direction;
    if (scheme.is_binary()) {
      const auto pos = static_cast<std::size_t>(scheme.positive());
      for (std::size_t w = 0; w < counts.size(); ++w) {
        if (counts[w][pos] * 2 > std::accumulate(counts[w].begin(), counts[w].end(), std::size_t{0})) {
          if (!direction.empty()) direction += "+";
          direction += names.group_name(w);
        }
      }
      direction = direction.empty() ? "none-positive" : direction + "-positive";
    } else {
      for (std::size_t w = 0; w < counts.size(); ++w) {
        auto modal = std::max_element(counts[w].begin(), counts[w].end()) - counts[w].begin();
        if (w) direction += ";";
        direction += names.group_name(w) + "=" + scheme.name(static_cast<Label>(modal));
      }
    }
    score.direction = direction;
  }
  return score;
}

std::vector<PolarizationScore> score_items(const AnnotationMatrix& matrix, const Partition& partition) {
  ResolvedPartition resolved(matrix, partition);
  std::vector<PolarizationScore> out;
  out.reserve(matrix.item_count());
  for (std::size_t i = 0; i < matrix.item_count(); ++i) out.push_back(p_index(matrix, i, resolved));
  return out;
}

AveragePIndex average_p_index(const AnnotationMatrix& matrix, const Partition& partition) {
  AveragePIndex avg;
  double sum = 0.0;
  for (const auto& s : score_items(matrix, partition)) {
    if (!s.p) {
      avg.skipped.push_back(s.item_id);
      continue;
    }
    sum += *s.p;
    ++avg.defined;
  }
  if (avg.defined == 0) throw Error("no item has a defined p-index under this partition");
  avg.mean = sum / static_cast<double>(avg.defined);
  return avg;
}

std::vector<PolarizationScore> rank_by_polarization(const AnnotationMatrix& matrix, const Partition& partition,
                                                    bool descending) {
  auto scores = score_items(matrix, partition);
  std::stable_sort(scores.begin(), scores.end(), [descending](const PolarizationScore& a, const PolarizationScore& b) {
    if (a.p.has_value() != b.p.has_value()) return a.p.has_value();
    if (!a.p) return a.item_id < b.item_id;
    if (*a.p != *b.p) return descending ? *a.p > *b.p : *a.p < *b.p;
    return a.item_id < b.item_id;
  });
  return scores;
}

PolarizationCensus polarization_census(const AnnotationMatrix& matrix, const Partition& partition) {
  PolarizationCensus census;
  std::map<std::string, std::size_t> directions;
  for (const auto& s : score_items(matrix, partition)) {
    ++census.items;
    if (!s.p) continue;
    ++census.defined;
    if (*s.p >= 1.0 - kPolarizationTolerance) {
      ++census.max_polarization;
      census.max_items.push_back(s.item_id);
      if (s.direction) ++directions[*s.direction];
    } else if (*s.p <= kPolarizationTolerance) {
      ++census.zero_polarization;
      census.zero_items.push_back(s.item_id);
    }
  }
  census.directions.assign(directions.begin(), directions.end());
  return census;
}

std::string to_json(const PolarizationCensus& census) {
  using nlohmann::json;
  json dirs = json::object();
  for (const auto& [k, v] : census.directions) dirs[k] = v;
  json j{{"items", census.items},
         {"defined", census.defined},
         {"undefined", census.items - census.defined},
         {"max_polarization", census.max_polarization},
         {"max_polarization_percent", report::percent_value(census.max_polarization, census.defined)},
         {"zero_polarization", census.zero_polarization},
         {"zero_polarization_percent", report::percent_value(census.zero_polarization, census.defined)},
         {"directions", dirs},
         {"max_items", census.max_items},
         {"zero_items", census.zero_items}};
  return j.dump(2) + "\n";
}

void write_ranked_tsv(std::span<const PolarizationScore> scores, std::ostream& out, const Corpus* texts) {
  std::unordered_map<std::string, const std::string*> lookup;
  if (texts) {
    for (const auto& item : *texts) lookup.emplace(item.id, &item.text);
  }
  out << "item_id\tp";
  if (texts) out << "\ttext";
  out << '\n';
  for (const auto& s : scores) {
    out << s.item_id << '\t' << report::fixed_or(s.p, 6);
    if (texts) {
      std::string t;
      if (auto it = lookup.find(s.item_id); it != lookup.end()) t = *it->second;
      std::replace_if(t.begin(), t.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
      out << '\t' << t;
    }
    out << '\n';
  }
}

}  // namespace persp
