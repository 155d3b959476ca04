// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fixture.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "perspective/agreement.hpp"
#include "perspective/augment.hpp"
#include "perspective/evalens.hpp"
#include "perspective/goldstd.hpp"
#include "perspective/partition.hpp"
#include "perspective/polarization.hpp"
#include "perspective/report.hpp"

using namespace persp;

namespace {

// Collects failure reasons for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    failed_ = failed_ || !ok;
  }
  bool failed() const { return failed_; }
  const std::vector<std::string>& failures() const { return failures_; }
  std::string note;

 private:
  bool failed_ = false;
  std::vector<std::string> failures_;
};

std::vector<Label> labels(std::initializer_list<int> v) { return {v.begin(), v.end()}; }

std::optional<Rational> exact_p(std::initializer_list<int> g1, std::initializer_list<int> g2) {
  const std::vector<std::vector<Label>> groups{labels(g1), labels(g2)};
  auto p = p_index(std::span<const std::vector<Label>>(groups), 2);
  if (!p) return std::nullopt;
  return p->exact;
}

bool same(const Rational& r, const oracle::Q& q) {
  return static_cast<long long>(r.num()) == q.numerator() && static_cast<long long>(r.den()) == q.denominator();
}

void worked_p_index(Check& c) {
  struct Case {
    std::initializer_list<int> g1, g2;
    double reported;
    Rational exact;
  };
  const Case cases[] = {{{1, 0, 0}, {1, 1, 1}, 0.49, Rational(40, 81)},
                        {{0, 0, 0}, {1, 1, 1}, 1.00, Rational(1)},
                        {{0, 0}, {1, 0, 1}, 0.53, Rational(24, 45)}};
  for (const auto& k : cases) {
    auto p = exact_p(k.g1, k.g2);
    c.expect(p.has_value() && *p == k.exact, "exact value mismatch");
    c.expect(p.has_value() && std::abs(p->to_double() - k.reported) <= 0.005, "outside tolerance of the reported value");
  }
}

void agreement_components(Check& c) {
  const std::pair<std::vector<Label>, double> cases[] = {
      {labels({1, 0, 0}), 0.11}, {labels({1, 1, 1}), 1.0},    {labels({1, 0, 0, 1, 1, 1}), 0.11},
      {labels({0, 0}), 1.0},     {labels({1, 0, 1}), 0.11}, {labels({0, 0, 1, 0, 1}), 0.04}};
  for (const auto& [v, expected] : cases) {
    auto a = intra_agreement(std::span<const Label>(v), 2);
    c.expect(a && std::abs(a->value - expected) <= 0.005, "a(G) off for a worked multiset");
  }
}

void oracle_equivalence(Check& c) {
  std::size_t cases = 0;
  for (int m = 4; m <= 6; ++m) {
    const auto partitions = oracle::all_partitions(m, 2, 2);
    for (int code = 0; code < (1 << m); ++code) {
      std::vector<int> v(static_cast<std::size_t>(m));
      for (int j = 0; j < m; ++j) v[static_cast<std::size_t>(j)] = (code >> j) & 1;
      for (const auto& assign : partitions) {
        std::vector<std::vector<int>> og(2);
        std::vector<std::vector<Label>> pg(2);
        for (int j = 0; j < m; ++j) {
          og[static_cast<std::size_t>(assign[static_cast<std::size_t>(j)])].push_back(v[static_cast<std::size_t>(j)]);
          pg[static_cast<std::size_t>(assign[static_cast<std::size_t>(j)])].push_back(v[static_cast<std::size_t>(j)]);
        }
        auto want = oracle::p_index(og, 2);
        auto got = p_index(std::span<const std::vector<Label>>(pg), 2);
        c.expect(want.has_value() == got.has_value() && (!got || same(got->exact, *want)), "p differs from oracle");
        ++cases;
      }
    }
  }
  c.note = std::to_string(cases) + " cases";
}

void partition_search(Check& c) {
  gen::Rng rng(404);
  std::size_t matrices = 0;
  for (int m = 4; m <= 8; ++m) {
    for (int t = 0; t < 8; ++t) {
      auto g = gen::grid(rng, rng.integer(5, 25), m, 2, rng.coin() ? 0.15 : 0.0);
      auto want = oracle::best_partition(g, 2, 2, 2);
      if (!want) continue;
      PartitionOptions opts;
      opts.threads = 1;
      auto got = search_max_polarization(gen::matrix(g), opts);
      std::vector<std::vector<std::string>> expected;
      for (const auto& group : want->groups) {
        expected.emplace_back();
        for (int j : group) expected.back().push_back(gen::annotator_name(j));
      }
      c.expect(got.best.groups == expected, "argmax differs from brute force at m=" + std::to_string(m));
      c.expect(std::abs(got.best_score - boost::rational_cast<double>(want->score)) < 1e-12, "best score differs");
      ++matrices;
    }
  }
  // Planted clones: a0..a2 copy one label, a3..a5 its opposite.
  oracle::Grid planted;
  for (int i = 0; i < 30; ++i) {
    const int l = rng.integer(0, 1);
    planted.push_back({l, l, l, 1 - l, 1 - l, 1 - l});
  }
  auto s = search_max_polarization(gen::matrix(planted), {2, 2, false, 1});
  c.expect(s.best.groups == std::vector<std::vector<std::string>>{{"a0", "a1", "a2"}, {"a3", "a4", "a5"}},
           "planted split not recovered");
  c.expect(s.best_score == 1.0, "planted average p is not 1");
  c.note = std::to_string(matrices) + " random matrices";
}

void kappa(Check& c) {
  auto fleiss = fleiss_kappa(gen::matrix({{1, 1, 1}, {0, 0, 0}, {1, 0, 0}}));
  c.expect(fleiss.kappa && std::abs(*fleiss.kappa - 0.55) <= 1e-9, "Fleiss fixture");
  auto cohen = cohen_kappa(gen::matrix({{1, 1}, {1, 0}, {0, 0}, {0, 0}}), 0, 1);
  c.expect(cohen.kappa && std::abs(*cohen.kappa - 0.5) <= 1e-9, "Cohen fixture");
  gen::Rng rng(505);
  for (int t = 0; t < 1000; ++t) {
    const int cats = rng.integer(2, 3);
    auto g = gen::grid(rng, rng.integer(2, 15), 2, cats, 0.1);
    auto m = gen::matrix(g, cats);
    c.expect(cohen_kappa(m, 0, 1).kappa == cohen_kappa(m, 1, 0).kappa, "Cohen not symmetric");
    for (auto& row : g) row[0] = row[1] = row[0] >= 0 ? row[0] : row[1];
    auto perfect = gen::matrix(g, cats);
    for (const auto& k : {cohen_kappa(perfect, 0, 1), fleiss_kappa(perfect)}) {
      c.expect(k.status != KappaStatus::kDefined || std::abs(*k.kappa - 1.0) < 1e-12, "perfect agreement is not 1");
    }
  }
}

PredictionSet random_predictions(gen::Rng& rng, const std::string& source, int n) {
  PredictionSet s;
  s.source = source;
  for (int i = 0; i < n; ++i) s.predictions.push_back({gen::item_name(i), rng.integer(0, 1), {}});
  return s;
}

void recall_dominance(Check& c) {
  gen::Rng rng(606);
  const auto scheme = LabelScheme::binary();
  for (int t = 0; t < 500; ++t) {
    const int n = rng.integer(1, 40);
    GoldStandard gold;
    for (int i = 0; i < n; ++i) gold.labels.push_back({gen::item_name(i), rng.integer(0, 1)});
    std::vector<PredictionSet> members{random_predictions(rng, "a", n), random_predictions(rng, "b", n)};
    const double inclusive = evaluate(inclusive_ensemble(members, scheme), gold, scheme).recall_pos;
    for (const auto& m : members) c.expect(inclusive >= evaluate(m, gold, scheme).recall_pos, "member recall exceeds ensemble");
  }
}

void augmentation(Check& c) {
  gen::Rng rng(707);
  for (int batch = 0; batch < 10; ++batch) {
    const AugmentPolicy policy{static_cast<unsigned>(rng.integer(1, 8)), rng.coin(0.3) ? 1.0 : 0.5 + 0.5 * rng.unit()};
    GoldStandard train;
    std::map<std::string, std::optional<double>> p;
    for (int i = 0; i < 100; ++i) {
      train.labels.push_back({gen::item_name(i), rng.integer(0, 1)});
      const int bucket = rng.integer(0, 9);
      p[gen::item_name(i)] = bucket == 0 ? 1.0 : bucket == 1 ? 0.0 : rng.unit();
    }
    auto r = replicate_by_polarization(train, p, policy);
    std::map<std::string, std::size_t> copies(r.copies.begin(), r.copies.end());
    for (const auto& item : train.labels) {
      const double v = *p[item.item_id];
      auto it = copies.find(item.item_id);
      if (v >= policy.delete_threshold) {
        c.expect(it == copies.end(), "item with p >= delta kept");
      } else {
        const auto want = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(policy.factor * (1.0 - v))));
        c.expect(it != copies.end() && it->second == want, "copy count mismatch");
      }
    }
    for (const auto& row : r.rows) c.expect(*p[row.item_id] < policy.delete_threshold, "output row with p >= delta");
    auto identity = replicate_by_polarization(train, p, {1, policy.delete_threshold});
    std::vector<LabeledItem> kept;
    for (const auto& item : train.labels) {
      if (*p[item.item_id] < policy.delete_threshold) kept.push_back(item);
    }
    c.expect(identity.rows == kept, "F=1 is not the filtered identity");
  }
}

void synthetic_pipeline(Check& c) {
  auto dir = fixture::scratch("acceptance-e2e");
  auto fx = fixture::synthetic(dir);
  auto r = full_pipeline(fx.config);
  c.expect(r.partition.groups == fx.data.planted.groups, "planted partition not recovered");
  std::ostringstream note;
  note << std::fixed << std::setprecision(3);
  for (const auto& m : r.own_group) {
    c.expect(m.f1_pos >= 0.9, m.source + " F1_pos below 0.9");
    note << m.source << " F1=" << m.f1_pos << " ";
  }
  const auto& inclusive = r.union_positive.back();
  c.expect(inclusive.source == "inclusive", "union-positive table lacks inclusive row");
  for (std::size_t g = 0; g + 1 < r.union_positive.size(); ++g) {
    c.expect(inclusive.recall_pos >= r.union_positive[g].recall_pos, "group recall exceeds inclusive");
  }
  note << "inclusive recall=" << inclusive.recall_pos;
  c.note = note.str();
}

void shape_arithmetic(Check& c) {
  GoldStandard gold;
  for (int i = 0; i < 1120; ++i) gold.labels.push_back({gen::item_name(i), i < 106 ? 1 : 0});
  for (bool stratified : {true, false}) {
    auto split = make_split(gold, {0.85, 1, stratified});
    c.expect(split.train_ids.size() == 952 && split.test_ids.size() == 168, "1120 at 85% is not 952/168");
  }
  c.expect(report::percent(62, 1120) == "5.5", "62/1120 does not render as 5.5");
  c.expect(report::percent(40, 168) == "23.8", "40/168 does not render as 23.8");
}

void determinism(Check& c) {
  auto dir = fixture::scratch("acceptance-determinism");
  auto fx = fixture::synthetic(dir);
  full_pipeline(fx.config);
  auto first = fixture::snapshot(fx.config.output_dir);
  full_pipeline(fx.config);
  auto second = fixture::snapshot(fx.config.output_dir);
  c.expect(first.size() == second.size(), "artifact sets differ");
  for (auto& [name, bytes] : first) {
    auto other = second[name];
    if (name == "manifest.json") {
      bytes = fixture::without_timestamps(bytes);
      other = fixture::without_timestamps(other);
    }
    c.expect(bytes == other, name + " differs between runs");
  }
  c.note = std::to_string(first.size()) + " artifacts";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"1 p-index worked examples", worked_p_index},
      {"2 agreement components", agreement_components},
      {"3 oracle equivalence", oracle_equivalence},
      {"4 partition search", partition_search},
      {"5 kappa fixtures and properties", kappa},
      {"6 inclusive recall dominance", recall_dominance},
      {"7 augmentation contract", augmentation},
      {"8 synthetic end-to-end pipeline", synthetic_pipeline},
      {"9 split and percentage arithmetic", shape_arithmetic},
      {"10 determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      run(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (check.failed() ? "FAIL" : "PASS") << "  " << name << "  (" << std::fixed << std::setprecision(3)
              << seconds << " s)";
    if (!check.note.empty()) std::cout << "  " << check.note;
    std::cout << "\n";
    for (const auto& f : check.failures()) std::cout << "      " << f << "\n";
    failed += check.failed();
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
