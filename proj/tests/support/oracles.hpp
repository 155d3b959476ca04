#pragma once

// Independent reference implementations used as test oracles. They follow the
// textbook formulas directly and share no code with the library.

#include <algorithm>
#include <boost/rational.hpp>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Q = boost::rational<long long>;

// chi^2 = sum_c (n_c - n/c)^2 / (n/c), evaluated term by term.
inline Q chi_square(const std::vector<int>& counts) {
  long long n = 0;
  for (int v : counts) n += v;
  const Q expected(n, static_cast<long long>(counts.size()));
  Q chi(0);
  for (int v : counts) {
    const Q d = Q(v) - expected;
    chi += d * d / expected;
  }
  return chi;
}

inline std::vector<int> counts_of(const std::vector<int>& labels, int categories) {
  std::vector<int> c(static_cast<std::size_t>(categories), 0);
  for (int l : labels) {
    if (l >= 0) ++c[static_cast<std::size_t>(l)];
  }
  return c;
}

// a = chi^2 / (n (c - 1)); nullopt with fewer than two labels.
inline std::optional<Q> agreement(const std::vector<int>& labels, int categories) {
  auto c = counts_of(labels, categories);
  long long n = 0;
  for (int v : c) n += v;
  if (n < 2) return std::nullopt;
  return chi_square(c) / Q(n * (categories - 1));
}

// P = (1/k) sum_w a(G_w) (1 - a(G)).
inline std::optional<Q> p_index(const std::vector<std::vector<int>>& groups, int categories) {
  std::vector<int> all;
  Q sum(0);
  for (const auto& g : groups) {
    auto a = agreement(g, categories);
    if (!a) return std::nullopt;
    sum += *a;
    all.insert(all.end(), g.begin(), g.end());
  }
  auto overall = agreement(all, categories);
  return sum * (Q(1) - *overall) / Q(static_cast<long long>(groups.size()));
}

// A labels matrix: rows are items, columns annotators, -1 for missing.
using Grid = std::vector<std::vector<int>>;

// Partition as a per-annotator group assignment in canonical form: group ids
// are numbered by first appearance, so annotator 0 is always in group 0.
using Assignment = std::vector<int>;

// Exact average p over items with a defined p, or nullopt if none.
inline std::optional<Q> average_p(const Grid& grid, const Assignment& assign, int k, int categories) {
  Q total(0);
  long long defined = 0;
  for (const auto& row : grid) {
    std::vector<std::vector<int>> groups(static_cast<std::size_t>(k));
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] >= 0) groups[static_cast<std::size_t>(assign[j])].push_back(row[j]);
    }
    if (auto p = p_index(groups, categories)) {
      total += *p;
      ++defined;
    }
  }
  if (defined == 0) return std::nullopt;
  return total / Q(defined);
}

// Every unordered partition of m annotators into exactly k groups of at
// least min_size, generated by brute force over k^m labelings and
// deduplicated through canonical relabeling.
inline std::vector<Assignment> all_partitions(int m, int k, int min_size) {
  std::set<Assignment> seen;
  Assignment raw(static_cast<std::size_t>(m), 0);
  long long total = 1;
  for (int i = 0; i < m; ++i) total *= k;
  for (long long code = 0; code < total; ++code) {
    long long c = code;
    for (int i = 0; i < m; ++i) {
      raw[static_cast<std::size_t>(i)] = static_cast<int>(c % k);
      c /= k;
    }
    std::map<int, int> relabel;
    Assignment canon(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      auto it = relabel.find(raw[static_cast<std::size_t>(i)]);
      if (it == relabel.end()) it = relabel.emplace(raw[static_cast<std::size_t>(i)], static_cast<int>(relabel.size())).first;
      canon[static_cast<std::size_t>(i)] = it->second;
    }
    if (static_cast<int>(relabel.size()) != k) continue;
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int g : canon) ++sizes[static_cast<std::size_t>(g)];
    if (*std::min_element(sizes.begin(), sizes.end()) < min_size) continue;
    seen.insert(canon);
  }
  return {seen.begin(), seen.end()};
}

// Groups (as sorted member lists, ordered by smallest member) of an assignment.
inline std::vector<std::vector<int>> groups_of(const Assignment& a, int k) {
  std::vector<std::vector<int>> g(static_cast<std::size_t>(k));
  for (std::size_t j = 0; j < a.size(); ++j) g[static_cast<std::size_t>(a[j])].push_back(static_cast<int>(j));
  std::sort(g.begin(), g.end());
  return g;
}

struct Argmax {
  std::vector<std::vector<int>> groups;
  Q score;
};

// Exact argmax of the average p. Exact ties go to the lexicographically
// smallest group list.
inline std::optional<Argmax> best_partition(const Grid& grid, int k, int min_size, int categories) {
  std::optional<Argmax> best;
  const int m = static_cast<int>(grid.front().size());
  for (const auto& a : all_partitions(m, k, min_size)) {
    auto s = average_p(grid, a, k, categories);
    if (!s) continue;
    auto g = groups_of(a, k);
    if (!best || *s > best->score || (*s == best->score && g < best->groups)) best = Argmax{g, *s};
  }
  return best;
}

// Fleiss' kappa for complete data with a fixed rater count per item.
inline double fleiss(const Grid& grid, int categories) {
  const double n_items = static_cast<double>(grid.size());
  std::vector<double> p_j(static_cast<std::size_t>(categories), 0.0);
  double p_bar = 0.0;
  double raters = 0.0;
  for (const auto& row : grid) {
    raters = static_cast<double>(row.size());
    std::vector<double> n_ij(static_cast<std::size_t>(categories), 0.0);
    for (int l : row) n_ij[static_cast<std::size_t>(l)] += 1.0;
    double agree = 0.0;
    for (std::size_t c = 0; c < n_ij.size(); ++c) {
      agree += n_ij[c] * (n_ij[c] - 1.0);
      p_j[c] += n_ij[c];
    }
    p_bar += agree / (raters * (raters - 1.0));
  }
  p_bar /= n_items;
  double p_e = 0.0;
  for (double v : p_j) p_e += (v / (n_items * raters)) * (v / (n_items * raters));
  return (p_bar - p_e) / (1.0 - p_e);
}

// Scott's pi for two raters: expected agreement from pooled marginals.
inline double scotts_pi(const std::vector<int>& a, const std::vector<int>& b, int categories) {
  const double n = static_cast<double>(a.size());
  double observed = 0.0;
  std::vector<double> pooled(static_cast<std::size_t>(categories), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    observed += a[i] == b[i] ? 1.0 : 0.0;
    pooled[static_cast<std::size_t>(a[i])] += 1.0;
    pooled[static_cast<std::size_t>(b[i])] += 1.0;
  }
  observed /= n;
  double expected = 0.0;
  for (double v : pooled) expected += (v / (2.0 * n)) * (v / (2.0 * n));
  return (observed - expected) / (1.0 - expected);
}

}  // namespace oracle
