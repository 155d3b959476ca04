#include "perspective/goldstd.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "json.hpp"
#include "perspective/csv.hpp"
#include "perspective/error.hpp"
#include "random.hpp"

namespace persp {
namespace {

using nlohmann::json;

void shuffle(std::vector<std::string>& ids, std::mt19937_64& rng) {
  for (std::size_t i = ids.size(); i > 1; --i) {
    std::swap(ids[i - 1], ids[detail::bounded(rng, i)]);
  }
}

std::size_t train_size(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 1e-9));
}

}  // namespace

std::optional<TiePolicy> parse_tie_policy(std::string_view name) {
  if (name == "prefer-positive") return TiePolicy::kPreferPositive;
  if (name == "prefer-negative") return TiePolicy::kPreferNegative;
  if (name == "prefer-expert") return TiePolicy::kPreferExpert;
  if (name == "error") return TiePolicy::kError;
  return std::nullopt;
}

const char* to_string(TiePolicy policy) {
  switch (policy) {
    case TiePolicy::kPreferPositive:
      return "prefer-positive";
    case TiePolicy::kPreferNegative:
      return "prefer-negative";
    case TiePolicy::kPreferExpert:
      return "prefer-expert";
    case TiePolicy::kError:
      return "error";
  }
  return "unknown";
}

GoldStandard majority_gold(const AnnotationMatrix& matrix, std::span<const std::size_t> annotators, TiePolicy policy,
                           std::string source) {
  if (annotators.empty()) throw Error("gold standard needs at least one annotator");
  for (auto j : annotators) {
    if (j >= matrix.annotator_count()) throw Error("annotator index out of range");
  }
  if (policy == TiePolicy::kPreferExpert &&
      std::none_of(annotators.begin(), annotators.end(), [&](std::size_t j) { return matrix.annotator(j).expert; })) {
    throw Error("prefer-expert tie policy but no expert annotator in '" + source + "'");
  }

  const auto& scheme = matrix.scheme();
  const std::size_t cats = scheme.size();
  const auto positive = static_cast<std::size_t>(scheme.positive());
  GoldStandard gold;
  gold.source = std::move(source);
  gold.tie_policy = to_string(policy);
  std::vector<std::size_t> counts(cats), expert_counts(cats);

  for (std::size_t i = 0; i < matrix.item_count(); ++i) {
    std::fill(counts.begin(), counts.end(), 0);
    std::fill(expert_counts.begin(), expert_counts.end(), 0);
    std::size_t n = 0;
    for (auto j : annotators) {
      Label l = matrix.at(i, j);
      if (l == kMissing) continue;
      ++counts[static_cast<std::size_t>(l)];
      if (matrix.annotator(j).expert) ++expert_counts[static_cast<std::size_t>(l)];
      ++n;
    }
    if (n == 0) {
      gold.excluded.push_back(matrix.item_id(i));
      continue;
    }
    const auto top = *std::max_element(counts.begin(), counts.end());
    std::vector<std::size_t> tied;
    for (std::size_t c = 0; c < cats; ++c) {
      if (counts[c] == top) tied.push_back(c);
    }
    std::size_t pick = tied.front();
    if (tied.size() > 1) {
      ++gold.tie_count;
      switch (policy) {
        case TiePolicy::kPreferPositive:
          if (std::find(tied.begin(), tied.end(), positive) != tied.end()) pick = positive;
          break;
        case TiePolicy::kPreferNegative: {
          auto it = std::find_if(tied.begin(), tied.end(), [&](std::size_t c) { return c != positive; });
          pick = *it;
          break;
        }
        case TiePolicy::kPreferExpert: {
          std::size_t best_count = 0;
          std::size_t holders = 0;
          for (auto c : tied) {
            if (expert_counts[c] > best_count) {
              best_count = expert_counts[c];
              pick = c;
              holders = 1;
            } else if (expert_counts[c] == best_count && best_count > 0) {
              ++holders;
            }
          }
          if (best_count == 0 || holders != 1) {
            throw Error("tie on item '" + matrix.item_id(i) + "' in '" + gold.source +
                        "' not resolved by expert annotators");
          }
          break;
        }
        case TiePolicy::kError:
          throw Error("tie on item '" + matrix.item_id(i) + "' in '" + gold.source + "'");
      }
    }
    gold.labels.push_back({matrix.item_id(i), static_cast<Label>(pick)});
  }
  return gold;
}

GoldStandard majority_gold(const AnnotationMatrix& matrix, std::span<const std::string> annotator_ids,
                           TiePolicy policy, std::string source) {
  std::vector<std::size_t> idx;
  for (const auto& id : annotator_ids) {
    auto j = matrix.find_annotator(id);
    if (!j) throw Error("unknown annotator '" + id + "'");
    idx.push_back(*j);
  }
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return majority_gold(matrix, idx, policy, std::move(source));
}

SplitManifest make_split(const GoldStandard& gold, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw Error("train fraction must lie strictly between 0 and 1");
  }
  if (gold.size() < 2) throw Error("split needs at least two items");

  SplitManifest split{spec.seed, spec.stratified, spec.train_fraction, {}, {}};
  std::mt19937_64 rng(spec.seed);
  const std::size_t n_train = train_size(gold.size(), spec.train_fraction);

  if (!spec.stratified) {
    auto ids = gold.ids();
    shuffle(ids, rng);
    split.train_ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test_ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
  } else {
    std::map<Label, std::vector<std::string>> by_class;
    for (const auto& l : gold.labels) by_class[l.label].push_back(l.item_id);
    if (by_class.size() < 2) throw Error("stratified split needs at least two classes present");

    // Largest-remainder apportionment of n_train across classes.
    std::vector<std::pair<Label, std::size_t>> quota;
    std::vector<std::pair<double, Label>> remainders;
    std::size_t assigned = 0;
    for (const auto& [label, ids] : by_class) {
      const double exact = static_cast<double>(ids.size()) * static_cast<double>(n_train) /
                           static_cast<double>(gold.size());
      auto base = static_cast<std::size_t>(std::floor(exact + 1e-9));
      base = std::min(base, ids.size());
      quota.emplace_back(label, base);
      remainders.emplace_back(exact - static_cast<double>(base), label);
      assigned += base;
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < n_train && r < remainders.size(); ++r) {
      for (auto& [label, q] : quota) {
        if (label == remainders[r].second && q < by_class[label].size()) {
          ++q;
          ++assigned;
        }
      }
    }
    for (const auto& [label, q] : quota) {
      auto ids = by_class[label];
      shuffle(ids, rng);
      split.train_ids.insert(split.train_ids.end(), ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(q));
      split.test_ids.insert(split.test_ids.end(), ids.begin() + static_cast<std::ptrdiff_t>(q), ids.end());
    }
  }
  std::sort(split.train_ids.begin(), split.train_ids.end());
  std::sort(split.test_ids.begin(), split.test_ids.end());
  return split;
}

std::pair<GoldStandard, GoldStandard> apply_split(const GoldStandard& gold, const SplitManifest& split) {
  std::set<std::string_view> train(split.train_ids.begin(), split.train_ids.end());
  std::set<std::string_view> test(split.test_ids.begin(), split.test_ids.end());
  GoldStandard tr = gold, te = gold;
  tr.labels.clear();
  te.labels.clear();
  tr.tie_count = te.tie_count = 0;
  for (const auto& l : gold.labels) {
    if (train.contains(l.item_id)) tr.labels.push_back(l);
    else if (test.contains(l.item_id)) te.labels.push_back(l);
  }
  tr.source = gold.source + ":train";
  te.source = gold.source + ":test";
  return {std::move(tr), std::move(te)};
}

std::pair<GoldStandard, GoldStandard> train_test_split(const GoldStandard& gold, const SplitSpec& spec) {
  return apply_split(gold, make_split(gold, spec));
}

std::string to_json(const SplitManifest& split) {
  json j{{"seed", split.seed},
         {"stratified", split.stratified},
         {"train_fraction", split.train_fraction},
         {"train_ids", split.train_ids},
         {"test_ids", split.test_ids}};
  return j.dump(2) + "\n";
}

SplitManifest split_from_json(const std::string& text) {
  try {
    auto j = json::parse(text);
    SplitManifest s;
    s.seed = j.at("seed").get<std::uint64_t>();
    s.stratified = j.at("stratified").get<bool>();
    s.train_fraction = j.value("train_fraction", 0.8);
    s.train_ids = j.at("train_ids").get<std::vector<std::string>>();
    s.test_ids = j.at("test_ids").get<std::vector<std::string>>();
    std::sort(s.train_ids.begin(), s.train_ids.end());
    std::sort(s.test_ids.begin(), s.test_ids.end());
    return s;
  } catch (const json::exception& e) {
    throw Error(std::string("invalid split manifest: ") + e.what());
  }
}

void write_gold_csv(const GoldStandard& gold, const LabelScheme& scheme, std::ostream& out) {
  out << "item_id,label\n";
  for (const auto& l : gold.labels) csv::write_row(out, {l.item_id, scheme.name(l.label)});
}

GoldStandard read_gold_csv(std::istream& in, const LabelScheme& scheme, const std::string& source) {
  auto records = csv::read(in, ',', source);
  if (records.empty() || records.front().fields.size() < 2 || records.front().fields[0] != "item_id" ||
      records.front().fields[1] != "label") {
    throw ParseError(source, records.empty() ? 1 : records.front().line, "expected header 'item_id,label'");
  }
  GoldStandard gold;
  gold.source = source;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != records.front().fields.size()) {
      throw ParseError(source, rec.line, "expected " + std::to_string(records.front().fields.size()) + " fields");
    }
    auto l = scheme.find(rec.fields[1]);
    if (!l) throw ParseError(source, rec.line, "label '" + rec.fields[1] + "' is not in the label scheme");
    gold.labels.push_back({rec.fields[0], *l});
  }
  gold.normalize();
  return gold;
}

GoldStandard read_gold_csv(const std::filesystem::path& path, const LabelScheme& scheme) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return read_gold_csv(in, scheme, path.string());
}

}  // namespace persp
