#include "perspective/partition.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <thread>

#include "json.hpp"
#include "perspective/error.hpp"
#include "perspective/polarization.hpp"
#include "perspective/report.hpp"
#include "perspective/text.hpp"

namespace persp {
namespace {

using nlohmann::json;

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  return __builtin_add_overflow(a, b, &r) ? std::numeric_limits<std::uint64_t>::max() : r;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  return __builtin_mul_overflow(a, b, &r) ? std::numeric_limits<std::uint64_t>::max() : r;
}

void validate(std::size_t m, const PartitionOptions& options) {
  if (options.k == 0) throw Error("partition group count must be at least 1");
  if (options.min_size == 0) throw Error("minimum group size must be at least 1");
  if (m < options.k * options.min_size) {
    throw Error("cannot split " + std::to_string(m) + " annotators into " + std::to_string(options.k) +
                " groups of at least " + std::to_string(options.min_size));
  }
}

void extend(std::size_t next, std::size_t m, const PartitionOptions& options, IndexPartition& current,
            std::vector<IndexPartition>& out) {
  const std::size_t remaining = m - next;
  std::size_t deficit = 0;
  for (const auto& g : current) deficit += g.size() < options.min_size ? options.min_size - g.size() : 0;
  const std::size_t missing_groups = options.k - current.size();
  if (deficit + missing_groups * options.min_size > remaining) return;
  if (next == m) {
    if (current.size() == options.k) out.push_back(current);
    return;
  }
  // Indexed: the recursion may grow `current` and invalidate references.
  for (std::size_t g = 0; g < current.size(); ++g) {
    current[g].push_back(next);
    extend(next + 1, m, options, current, out);
    current[g].pop_back();
  }
  if (current.size() < options.k) {
    current.push_back({next});
    extend(next + 1, m, options, current, out);
    current.pop_back();
  }
}

// Scores one partition: mean p over items with a defined p, in item order.
ScoredPartition score(const AnnotationMatrix& matrix, const IndexPartition& groups) {
  const std::size_t cats = matrix.scheme().size();
  std::vector<std::vector<std::size_t>> counts(groups.size(), std::vector<std::size_t>(cats));
  double sum = 0.0;
  std::size_t defined = 0;
  for (std::size_t i = 0; i < matrix.item_count(); ++i) {
    auto row = matrix.row(i);
    for (std::size_t w = 0; w < groups.size(); ++w) {
      std::fill(counts[w].begin(), counts[w].end(), 0);
      for (auto j : groups[w]) {
        if (row[j] != kMissing) ++counts[w][static_cast<std::size_t>(row[j])];
      }
    }
    if (auto p = p_index(std::span<const std::vector<std::size_t>>(counts))) {
      sum += p->value;
      ++defined;
    }
  }
  ScoredPartition s{to_partition(matrix, groups), std::nullopt, defined};
  if (defined) s.average = sum / static_cast<double>(defined);
  return s;
}

std::string join_group(const std::vector<std::string>& g) { return text::join(g, ","); }

}  // namespace

std::uint64_t count_partitions(std::size_t m, std::size_t k, std::size_t min_size) {
  if (k == 0 || min_size == 0 || m < k * min_size) return 0;
  // f[n][j]: partitions of n labelled elements into j groups of size >= min_size,
  // choosing the group that holds the first element.
  std::vector<std::vector<std::uint64_t>> binom(m + 1, std::vector<std::uint64_t>(m + 1, 0));
  for (std::size_t n = 0; n <= m; ++n) {
    binom[n][0] = 1;
    for (std::size_t r = 1; r <= n; ++r) binom[n][r] = sat_add(binom[n - 1][r - 1], binom[n - 1][r]);
  }
  std::vector<std::vector<std::uint64_t>> f(m + 1, std::vector<std::uint64_t>(k + 1, 0));
  f[0][0] = 1;
  for (std::size_t n = 1; n <= m; ++n) {
    for (std::size_t j = 1; j <= k; ++j) {
      std::uint64_t total = 0;
      for (std::size_t t = min_size; t <= n; ++t) {
        total = sat_add(total, sat_mul(binom[n - 1][t - 1], f[n - t][j - 1]));
      }
      f[n][j] = total;
    }
  }
  return f[m][k];
}

std::vector<IndexPartition> enumerate_index_partitions(std::size_t m, const PartitionOptions& options) {
  validate(m, options);
  const auto count = count_partitions(m, options.k, options.min_size);
  if (count > kLargeEnumeration && !options.allow_large) {
    throw Error(std::to_string(count) + " partitions exceed the enumeration limit of " +
                std::to_string(kLargeEnumeration) + "; pass the large-enumeration override to proceed");
  }
  std::vector<IndexPartition> out;
  out.reserve(static_cast<std::size_t>(count));
  IndexPartition current;
  extend(0, m, options, current, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Partition> enumerate_partitions(std::span<const std::string> annotators, const PartitionOptions& options) {
  std::vector<std::string> ids(annotators.begin(), annotators.end());
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw Error("annotator ids are not unique");
  std::vector<Partition> out;
  for (const auto& groups : enumerate_index_partitions(ids.size(), options)) {
    Partition p;
    for (const auto& g : groups) {
      std::vector<std::string> members;
      for (auto j : g) members.push_back(ids[j]);
      p.groups.push_back(std::move(members));
    }
    out.push_back(std::move(p));
  }
  return out;
}

Partition to_partition(const AnnotationMatrix& matrix, const IndexPartition& groups) {
  Partition p;
  for (const auto& g : groups) {
    std::vector<std::string> members;
    for (auto j : g) members.push_back(matrix.annotator(j).id);
    std::sort(members.begin(), members.end());
    p.groups.push_back(std::move(members));
  }
  return p;
}

PartitionSearch search_max_polarization(const AnnotationMatrix& matrix, const PartitionOptions& options,
                                        const std::optional<Partition>& natural) {
  const auto candidates = enumerate_index_partitions(matrix.annotator_count(), options);
  std::vector<ScoredPartition> scored(candidates.size());

  unsigned workers = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, candidates.size() / 64)));
  if (workers <= 1) {
    for (std::size_t c = 0; c < candidates.size(); ++c) scored[c] = score(matrix, candidates[c]);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (candidates.size() + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const std::size_t end = std::min(candidates.size(), (w + 1) * chunk);
        for (std::size_t c = w * chunk; c < end; ++c) scored[c] = score(matrix, candidates[c]);
      });
    }
    for (auto& t : pool) t.join();
  }

  std::optional<double> top;
  for (const auto& s : scored) {
    if (s.average && (!top || *s.average > *top)) top = s.average;
  }
  if (!top) throw Error("no partition yields a defined average p-index");
  std::size_t best = 0;
  for (; best < scored.size(); ++best) {
    if (scored[best].average && *scored[best].average >= *top - kScoreTieTolerance) break;
  }

  PartitionSearch result;
  result.best = scored[best].partition;
  result.best_score = *scored[best].average;

  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& sa = scored[a].average;
    const auto& sb = scored[b].average;
    if (sa.has_value() != sb.has_value()) return sa.has_value();
    if (!sa) return false;
    return *sa > *sb;
  });
  std::rotate(order.begin(), std::find(order.begin(), order.end(), best), std::find(order.begin(), order.end(), best) + 1);
  for (auto idx : order) result.ranking.push_back(scored[idx]);

  if (natural) {
    ResolvedPartition resolved(matrix, *natural);
    IndexPartition canon = resolved.members();
    std::sort(canon.begin(), canon.end());
    ScoredPartition ns = score(matrix, canon);
    ns.partition = *natural;
    result.natural = ns;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (candidates[c] == canon || !scored[c].average) continue;
      const double v = *scored[c].average;
      result.others_max = result.others_max ? std::max(*result.others_max, v) : v;
      result.others_min = result.others_min ? std::min(*result.others_min, v) : v;
    }
  }
  return result;
}

std::optional<Partition> natural_partition(const AnnotationMatrix& matrix) {
  std::map<std::string, std::vector<std::string>> by_tag;
  for (const auto& a : matrix.annotators()) {
    if (a.group) by_tag[*a.group].push_back(a.id);
  }
  if (by_tag.size() < 2) return std::nullopt;
  Partition p;
  for (auto& [tag, members] : by_tag) {
    p.names.push_back(tag);
    p.groups.push_back(std::move(members));
  }
  return p;
}

std::string to_json(const Partition& partition) {
  json groups = json::array();
  for (std::size_t w = 0; w < partition.k(); ++w) {
    groups.push_back(json{{"name", partition.group_name(w)}, {"members", partition.groups[w]}});
  }
  return json{{"k", partition.k()}, {"groups", groups}}.dump(2) + "\n";
}

Partition partition_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("invalid partition JSON: ") + e.what());
  }
  const json& groups = j.contains("best") ? j["best"]["groups"] : j["groups"];
  if (!groups.is_array()) throw Error("partition JSON lacks a 'groups' array");
  Partition p;
  for (const auto& g : groups) {
    if (!g.contains("members") || !g["members"].is_array()) throw Error("partition group lacks 'members'");
    auto members = g["members"].get<std::vector<std::string>>();
    std::sort(members.begin(), members.end());
    p.groups.push_back(std::move(members));
    p.names.push_back(g.value("name", ""));
  }
  return p;
}

std::string to_json(const PartitionSearch& search) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json j{{"best", json::parse(to_json(search.best))},
         {"best_score", search.best_score},
         {"partitions_scored", search.ranking.size()}};
  if (search.natural) {
    j["natural"] = json{{"partition", json::parse(to_json(search.natural->partition))},
                        {"score", opt(search.natural->average)},
                        {"defined_items", search.natural->defined_items}};
    j["others_max"] = opt(search.others_max);
    j["others_min"] = opt(search.others_min);
  }
  return j.dump(2) + "\n";
}

void write_scored_tsv(const PartitionSearch& search, std::ostream& out) {
  std::size_t k = search.ranking.empty() ? 2 : search.ranking.front().partition.k();
  out << "rank\tavg_p";
  for (std::size_t w = 0; w < k; ++w) out << "\tgroup" << (w + 1);
  out << '\n';
  for (std::size_t r = 0; r < search.ranking.size(); ++r) {
    const auto& s = search.ranking[r];
    out << (r + 1) << '\t' << report::fixed_or(s.average, 6);
    for (const auto& g : s.partition.groups) out << '\t' << join_group(g);
    out << '\n';
  }
}

}  // namespace persp
