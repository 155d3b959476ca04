#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "generators.hpp"
#include "perspective/error.hpp"
#include "perspective/goldstd.hpp"

using namespace persp;

namespace {

GoldStandard gold_of(int n, int positives) {
  GoldStandard g;
  for (int i = 0; i < n; ++i) g.labels.push_back({gen::item_name(i), i < positives ? 1 : 0});
  return g;
}

std::size_t positives_in(const GoldStandard& g) {
  std::size_t n = 0;
  for (const auto& l : g.labels) n += l.label == 1;
  return n;
}

AnnotationMatrix with_experts(const oracle::Grid& g, std::vector<bool> experts) {
  auto m = gen::matrix(g);
  std::vector<Annotator> meta;
  for (std::size_t j = 0; j < experts.size(); ++j) meta.push_back({gen::annotator_name(static_cast<int>(j)), {}, experts[j]});
  return m.with_annotator_meta(meta);
}

Label only(const GoldStandard& g) { return g.labels.at(0).label; }

}  // namespace

TEST(MajorityGold, StrictMajority) {
  auto m = gen::matrix({{1, 1, 0}});
  EXPECT_EQ(only(majority_gold(m, m.annotator_ids(), TiePolicy::kPreferNegative)), 1);
}

TEST(MajorityGold, TiePolicies) {
  auto m = with_experts({{1, 0}}, {true, false});
  const auto all = m.annotator_ids();
  EXPECT_EQ(only(majority_gold(m, all, TiePolicy::kPreferPositive)), 1);
  EXPECT_EQ(only(majority_gold(m, all, TiePolicy::kPreferNegative)), 0);
  EXPECT_EQ(only(majority_gold(m, all, TiePolicy::kPreferExpert)), 1);
  auto flipped = with_experts({{1, 0}}, {false, true});
  EXPECT_EQ(only(majority_gold(flipped, flipped.annotator_ids(), TiePolicy::kPreferExpert)), 0);
  EXPECT_EQ(majority_gold(m, all, TiePolicy::kPreferPositive).tie_count, 1u);
}

TEST(MajorityGold, ErrorPolicyNamesTheItem) {
  auto m = gen::matrix({{1, 1}, {1, 0}});
  try {
    majority_gold(m, m.annotator_ids(), TiePolicy::kError);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("i001"), std::string::npos) << e.what();
  }
}

TEST(MajorityGold, TiedOrAbsentExpertsFail) {
  auto tied = with_experts({{1, 0}}, {true, true});
  EXPECT_THROW(majority_gold(tied, tied.annotator_ids(), TiePolicy::kPreferExpert), Error);
  auto none = with_experts({{1, 0}}, {false, false});
  EXPECT_THROW(majority_gold(none, none.annotator_ids(), TiePolicy::kPreferExpert), Error);
}

TEST(MajorityGold, ItemsUnseenBySubsetAreExcluded) {
  auto m = gen::matrix({{1, 1, 0}, {-1, -1, 1}});
  const std::vector<std::string> subset{"a0", "a1"};
  auto g = majority_gold(m, subset, TiePolicy::kPreferPositive, "g1");
  EXPECT_EQ(g.size(), 1u);
  EXPECT_EQ(g.excluded, (std::vector<std::string>{"i001"}));
  EXPECT_EQ(g.source, "g1");
  EXPECT_EQ(g.tie_policy, "prefer-positive");
}

TEST(MajorityGold, ClonesEqualAnySingleAnnotator) {
  gen::Rng rng(41);
  for (int t = 0; t < 100; ++t) {
    auto g = gen::grid(rng, 15, 1);
    for (auto& row : g) row = {row[0], row[0], row[0], row[0]};
    auto m = gen::matrix(g);
    auto gold = majority_gold(m, m.annotator_ids(), TiePolicy::kPreferNegative);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(gold.labels[i].label, g[i][0]);
  }
}

TEST(MajorityGold, OddBinarySubsetsNeverTie) {
  gen::Rng rng(42);
  for (int t = 0; t < 200; ++t) {
    auto m = gen::matrix(gen::grid(rng, 10, 2 * rng.integer(0, 3) + 1));
    EXPECT_EQ(majority_gold(m, m.annotator_ids(), TiePolicy::kError).tie_count, 0u);
  }
}

TEST(MajorityGold, GroupGoldsAgreeOnUnanimousItems) {
  gen::Rng rng(43);
  auto g = gen::grid(rng, 40, 6);
  auto m = gen::matrix(g);
  const std::vector<std::string> g1{"a0", "a1", "a2"}, g2{"a3", "a4", "a5"};
  auto x = majority_gold(m, g1, TiePolicy::kPreferPositive);
  auto y = majority_gold(m, g2, TiePolicy::kPreferPositive);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::all_of(g[i].begin(), g[i].end(), [&](int v) { return v == g[i][0]; })) {
      EXPECT_EQ(x.labels[i].label, y.labels[i].label);
    }
  }
}

TEST(Split, SizesAndDeterminism) {
  auto gold = gold_of(10, 5);
  SplitSpec spec{0.8, 17, false};
  auto a = make_split(gold, spec);
  EXPECT_EQ(a.train_ids.size(), 8u);
  EXPECT_EQ(a.test_ids.size(), 2u);
  EXPECT_EQ(make_split(gold, spec), a);
  spec.seed = 18;
  EXPECT_EQ(make_split(gold, spec).train_ids.size(), 8u);
}

TEST(Split, SizesFor1120AtEightyFivePercent) {
  auto s = make_split(gold_of(1120, 106), {0.85, 1, true});
  EXPECT_EQ(s.train_ids.size(), 952u);
  EXPECT_EQ(s.test_ids.size(), 168u);
}

TEST(Split, StratifiedKeepsClassRatio) {
  auto gold = gold_of(100, 10);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto [train, test] = train_test_split(gold, {0.8, seed, true});
    EXPECT_EQ(positives_in(test), 2u);
    EXPECT_EQ(positives_in(train), 8u);
  }
}

TEST(Split, StratifiedNeedsBothClasses) {
  EXPECT_THROW(make_split(gold_of(10, 0), {0.8, 1, true}), Error);
  EXPECT_NO_THROW(make_split(gold_of(10, 0), {0.8, 1, false}));
  EXPECT_THROW(make_split(gold_of(1, 1), {0.8, 1, false}), Error);
}

TEST(Split, IsAPartitionWithinOneItemPerClass) {
  gen::Rng rng(44);
  for (int t = 0; t < 200; ++t) {
    const int n = rng.integer(4, 80);
    auto gold = gold_of(n, rng.integer(1, n - 1));
    const double f = 0.05 + 0.9 * rng.unit();
    auto s = make_split(gold, {f, static_cast<std::uint64_t>(t), true});
    std::set<std::string> train(s.train_ids.begin(), s.train_ids.end());
    std::set<std::string> test(s.test_ids.begin(), s.test_ids.end());
    for (const auto& id : test) EXPECT_FALSE(train.contains(id));
    EXPECT_EQ(train.size() + test.size(), static_cast<std::size_t>(n));
    EXPECT_EQ(train.size(), static_cast<std::size_t>(std::floor(n * f + 1e-9)));
    auto [tr, te] = apply_split(gold, s);
    const double share = static_cast<double>(positives_in(gold)) * static_cast<double>(train.size()) / n;
    EXPECT_LE(std::abs(static_cast<double>(positives_in(tr)) - share), 1.0);
  }
}

TEST(Split, FixedTestContractAcrossGolds) {
  gen::Rng rng(45);
  auto m = gen::matrix(gen::grid(rng, 50, 6));
  auto overall = majority_gold(m, m.annotator_ids(), TiePolicy::kPreferPositive);
  const std::vector<std::string> g1{"a0", "a1", "a2"}, g2{"a3", "a4", "a5"};
  auto s = make_split(overall, {0.8, 3, true});
  auto t0 = apply_split(overall, s).second;
  auto t1 = apply_split(majority_gold(m, g1, TiePolicy::kPreferPositive), s).second;
  auto t2 = apply_split(majority_gold(m, g2, TiePolicy::kPreferPositive), s).second;
  EXPECT_EQ(t0.ids(), t1.ids());
  EXPECT_EQ(t1.ids(), t2.ids());
  EXPECT_EQ(t0.ids(), s.test_ids);
}

TEST(Split, JsonRoundTrip) {
  auto s = make_split(gold_of(20, 6), {0.75, 99, true});
  EXPECT_EQ(split_from_json(to_json(s)), s);
}

TEST(GoldCsv, RoundTrip) {
  auto g = gold_of(5, 2);
  std::ostringstream out;
  write_gold_csv(g, LabelScheme::binary(), out);
  EXPECT_EQ(out.str().substr(0, 14), "item_id,label\n");
  std::istringstream in(out.str());
  EXPECT_EQ(read_gold_csv(in, LabelScheme::binary()).labels, g.labels);
}

TEST(TiePolicyNames, ParseAndPrint) {
  for (auto p : {TiePolicy::kPreferPositive, TiePolicy::kPreferNegative, TiePolicy::kPreferExpert, TiePolicy::kError}) {
    EXPECT_EQ(parse_tie_policy(to_string(p)), p);
  }
  EXPECT_FALSE(parse_tie_policy("coin-flip").has_value());
}
