#include <gtest/gtest.h>

#include <sstream>

#include "generators.hpp"
#include "json.hpp"
#include "perspective/error.hpp"
#include "perspective/polarization.hpp"

using namespace persp;

namespace {

std::optional<PIndex> p_of(std::vector<std::vector<Label>> groups, std::size_t cats = 2) {
  return p_index(std::span<const std::vector<Label>>(groups), cats);
}

Partition halves(int m) {
  Partition p;
  p.groups.resize(2);
  for (int j = 0; j < m; ++j) p.groups[j < m / 2 ? 0 : 1].push_back(gen::annotator_name(j));
  return p;
}

void expect_equal(const Rational& got, const oracle::Q& want) {
  EXPECT_EQ(static_cast<long long>(got.num()), want.numerator());
  EXPECT_EQ(static_cast<long long>(got.den()), want.denominator());
}

}  // namespace

TEST(PIndex, WorkedExamples) {
  auto a = p_of({{1, 0, 0}, {1, 1, 1}});
  EXPECT_EQ(a->exact, Rational(40, 81));
  EXPECT_NEAR(a->value, 0.49, 0.005);
  auto b = p_of({{0, 0, 0}, {1, 1, 1}});
  EXPECT_EQ(b->exact, Rational(1));
  auto c = p_of({{0, 0}, {1, 0, 1}});
  EXPECT_EQ(c->exact, Rational(24, 45));
  EXPECT_NEAR(c->value, 0.53, 0.005);
}

TEST(PIndex, ComponentsAreExposed) {
  auto c = p_of({{0, 0}, {1, 0, 1}});
  ASSERT_EQ(c->groups.size(), 2u);
  EXPECT_EQ(c->groups[0].value, 1.0);
  EXPECT_EQ(c->groups[1].exact, Rational(1, 9));
  EXPECT_NEAR(c->overall.value, 0.04, 0.005);
  // p agrees with its components.
  const double recomputed = (c->groups[0].value + c->groups[1].value) / 2.0 * (1.0 - c->overall.value);
  EXPECT_NEAR(c->value, recomputed, 1e-12);
}

TEST(PIndex, UndefinedWhenAGroupHasFewerThanTwo) {
  EXPECT_FALSE(p_of({{1}, {1, 0, 1}}).has_value());
  EXPECT_FALSE(p_of({{1, kMissing}, {1, 0}}).has_value());
}

TEST(PIndex, ExhaustiveSmallVectorsMatchOracle) {
  std::size_t cases = 0;
  for (int m = 4; m <= 6; ++m) {
    for (int bits = 0; bits < (1 << m); ++bits) {
      for (const auto& assign : oracle::all_partitions(m, 2, 2)) {
        std::vector<std::vector<Label>> groups(2);
        std::vector<std::vector<int>> og(2);
        for (int j = 0; j < m; ++j) {
          const int v = (bits >> j) & 1;
          groups[static_cast<std::size_t>(assign[static_cast<std::size_t>(j)])].push_back(v);
          og[static_cast<std::size_t>(assign[static_cast<std::size_t>(j)])].push_back(v);
        }
        expect_equal(p_of(groups)->exact, *oracle::p_index(og, 2));
        ++cases;
      }
    }
  }
  EXPECT_GT(cases, 1000u);
}

TEST(PIndex, InvariantUnderGroupSwapAndRelabeling) {
  gen::Rng rng(21);
  for (int t = 0; t < 1000; ++t) {
    std::vector<std::vector<Label>> g(2);
    for (auto& grp : g) {
      grp.resize(static_cast<std::size_t>(rng.integer(2, 5)));
      for (auto& l : grp) l = rng.integer(0, 1);
    }
    const auto base = p_of(g)->exact;
    EXPECT_EQ(p_of({g[1], g[0]})->exact, base);
    for (auto& grp : g) {
      for (auto& l : grp) l = 1 - l;
    }
    EXPECT_EQ(p_of(g)->exact, base);
    const double v = p_of(g)->value;
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(PIndex, OneIffGroupsUnanimousAndOverallUniform) {
  gen::Rng rng(22);
  for (int t = 0; t < 2000; ++t) {
    std::vector<std::vector<Label>> g(2);
    for (auto& grp : g) {
      grp.resize(static_cast<std::size_t>(rng.integer(2, 4)));
      for (auto& l : grp) l = rng.integer(0, 1);
    }
    auto unanimous = [](const std::vector<Label>& v) { return std::all_of(v.begin(), v.end(), [&](Label l) { return l == v[0]; }); };
    std::size_t ones = 0, n = 0;
    for (const auto& grp : g) {
      for (auto l : grp) {
        ones += static_cast<std::size_t>(l);
        ++n;
      }
    }
    const bool expected = unanimous(g[0]) && unanimous(g[1]) && 2 * ones == n;
    EXPECT_EQ(p_of(g)->exact == Rational(1), expected);
    if (ones == 0 || ones == n) EXPECT_EQ(p_of(g)->exact, Rational(0));
  }
}

TEST(AveragePIndex, MeanOfDefinedItems) {
  // i000: p = 0 (unanimous); i001: p = 1 (opposed clones).
  auto m = gen::matrix({{1, 1, 1, 1}, {0, 0, 1, 1}});
  auto avg = average_p_index(m, halves(4));
  EXPECT_DOUBLE_EQ(avg.mean, 0.5);
  EXPECT_EQ(avg.defined, 2u);
}

TEST(AveragePIndex, UnanimousMatrixIsZero) {
  auto m = gen::matrix({{1, 1, 1, 1}, {0, 0, 0, 0}, {1, 1, 1, 1}});
  EXPECT_DOUBLE_EQ(average_p_index(m, halves(4)).mean, 0.0);
}

TEST(AveragePIndex, SkipsAndReportsUndefinedItems) {
  auto m = gen::matrix({{0, 0, 1, 1}, {0, -1, 1, 1}});
  auto avg = average_p_index(m, halves(4));
  EXPECT_EQ(avg.defined, 1u);
  EXPECT_EQ(avg.skipped, (std::vector<std::string>{"i001"}));
}

TEST(AveragePIndex, NoDefinedItemIsAnError) {
  auto m = gen::matrix({{0, -1, 1, 1}});
  EXPECT_THROW(average_p_index(m, halves(4)), Error);
}

TEST(AveragePIndex, RandomMatrixMatchesOracleMean) {
  gen::Rng rng(23);
  for (int t = 0; t < 30; ++t) {
    auto g = gen::grid(rng, 20, 6, 2, 0.1);
    const oracle::Assignment assign{0, 0, 0, 1, 1, 1};
    auto want = oracle::average_p(g, assign, 2, 2);
    auto m = gen::matrix(g);
    if (!want) {
      EXPECT_THROW(average_p_index(m, halves(6)), Error);
      continue;
    }
    EXPECT_NEAR(average_p_index(m, halves(6)).mean, boost::rational_cast<double>(*want), 1e-12);
  }
}

TEST(RankByPolarization, TiesBrokenByIdAndUndefinedLast) {
  // p values: 3/8, 1, 3/8, undefined.
  auto m = gen::matrix({{1, 0, 0, 0}, {0, 0, 1, 1}, {0, 1, 0, 0}, {0, -1, 1, 1}});
  auto ranked = rank_by_polarization(m, halves(4), true);
  std::vector<std::string> order;
  for (const auto& s : ranked) order.push_back(s.item_id);
  EXPECT_EQ(order, (std::vector<std::string>{"i001", "i000", "i002", "i003"}));
  EXPECT_FALSE(ranked.back().defined());
  auto asc = rank_by_polarization(m, halves(4), false);
  EXPECT_EQ(asc.front().item_id, "i000");
  EXPECT_EQ(asc.back().item_id, "i003");
}

TEST(RankByPolarization, AllTiesKeepIdOrder) {
  auto m = gen::matrix({{1, 1, 1, 1}, {0, 0, 0, 0}, {1, 1, 1, 1}});
  auto ranked = rank_by_polarization(m, halves(4));
  EXPECT_EQ(ranked[0].item_id, "i000");
  EXPECT_EQ(ranked[1].item_id, "i001");
  EXPECT_EQ(ranked[2].item_id, "i002");
}

TEST(RankByPolarization, MatchesOracleSort) {
  gen::Rng rng(24);
  auto g = gen::grid(rng, 30, 6, 2, 0.15);
  auto m = gen::matrix(g);
  const oracle::Assignment assign{0, 0, 0, 1, 1, 1};
  std::vector<std::pair<oracle::Q, std::string>> defined;
  std::vector<std::string> undefined;
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::vector<std::vector<int>> groups(2);
    for (std::size_t j = 0; j < 6; ++j) {
      if (g[i][j] >= 0) groups[static_cast<std::size_t>(assign[j])].push_back(g[i][j]);
    }
    auto p = oracle::p_index(groups, 2);
    if (p) defined.emplace_back(*p, gen::item_name(static_cast<int>(i)));
    else undefined.push_back(gen::item_name(static_cast<int>(i)));
  }
  std::stable_sort(defined.begin(), defined.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::string> want;
  for (const auto& d : defined) want.push_back(d.second);
  want.insert(want.end(), undefined.begin(), undefined.end());
  std::vector<std::string> got;
  for (const auto& s : rank_by_polarization(m, halves(6))) got.push_back(s.item_id);
  EXPECT_EQ(got, want);
}

TEST(Census, OneMaximalItemRecordsDirection) {
  auto m = gen::matrix({{0, 0, 0, 1, 1, 1}});
  auto c = polarization_census(m, halves(6));
  EXPECT_EQ(c.max_polarization, 1u);
  ASSERT_EQ(c.directions.size(), 1u);
  EXPECT_EQ(c.directions[0], (std::pair<std::string, std::size_t>{"group2-positive", 1}));
}

TEST(Census, UnanimousCorpusIsAllZero) {
  auto m = gen::matrix({{1, 1, 1, 1}, {0, 0, 0, 0}});
  auto c = polarization_census(m, halves(4));
  EXPECT_EQ(c.zero_polarization, 2u);
  EXPECT_EQ(c.max_polarization, 0u);
}

TEST(Census, JsonPercentagesUseOneDecimal) {
  // 62 maximal items out of 1120.
  oracle::Grid g;
  for (int i = 0; i < 1120; ++i) g.push_back(i < 62 ? std::vector<int>{1, 1, 0, 0} : std::vector<int>{1, 1, 1, 1});
  auto j = nlohmann::json::parse(to_json(polarization_census(gen::matrix(g), halves(4))));
  EXPECT_EQ(j["max_polarization"].get<int>(), 62);
  EXPECT_DOUBLE_EQ(j["max_polarization_percent"].get<double>(), 5.5);
}

TEST(Census, MultiCategoryReportsModalLabels) {
  auto m = gen::matrix({{0, 0, 1, 1, 2, 2}}, 3);
  Partition three{{{"a0", "a1"}, {"a2", "a3"}, {"a4", "a5"}}, {}};
  auto scores = score_items(m, three);
  ASSERT_EQ(scores[0].exact, Rational(1));
  EXPECT_EQ(scores[0].direction, "group1=0;group2=1;group3=2");
}

TEST(RankedTsv, HeaderAndOptionalText) {
  auto m = gen::matrix({{0, 0, 1, 1}, {0, -1, 1, 1}});
  auto ranked = rank_by_polarization(m, halves(4));
  std::ostringstream plain;
  write_ranked_tsv(ranked, plain);
  EXPECT_EQ(plain.str(), "item_id\tp\ni000\t1.000000\ni001\tNA\n");
  Corpus texts{{"i000", "first", {}}, {"i001", "second", {}}};
  std::ostringstream with_text;
  write_ranked_tsv(ranked, with_text, &texts);
  EXPECT_EQ(with_text.str(), "item_id\tp\ttext\ni000\t1.000000\tfirst\ni001\tNA\tsecond\n");
}
