#include "perspective/agreement.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "perspective/error.hpp"
#include "perspective/report.hpp"

namespace persp {
namespace {

using nlohmann::json;

json kappa_json(const KappaResult& k) {
  return json{{"kappa", k.kappa ? json(*k.kappa) : json(nullptr)},
              {"status", to_string(k.status)},
              {"items_used", k.items_used}};
}

// Annotator index -> group index, or -1 when the annotator is outside the partition.
std::vector<int> group_of(const AnnotationMatrix& matrix, const Partition& partition) {
  std::vector<int> out(matrix.annotator_count(), -1);
  for (std::size_t w = 0; w < partition.k(); ++w) {
    for (const auto& id : partition.groups[w]) {
      auto j = matrix.find_annotator(id);
      if (!j) throw Error("partition names unknown annotator '" + id + "'");
      if (out[*j] != -1) throw Error("annotator '" + id + "' appears in two groups");
      out[*j] = static_cast<int>(w);
    }
  }
  return out;
}

}  // namespace

Rational chi_square_uniform_exact(std::span<const std::size_t> counts) {
  if (counts.empty()) throw Error("chi-square needs at least one category");
  Int128 n = 0;
  Int128 sum_sq = 0;
  for (auto c : counts) {
    n += c;
    sum_sq += static_cast<Int128>(c) * c;
  }
  if (n == 0) throw Error("empty annotation set");
  const Int128 cats = static_cast<Int128>(counts.size());
  // sum (n_c - n/C)^2 / (n/C) == (C * sum n_c^2 - n^2) / n
  return Rational(cats * sum_sq - n * n, n);
}

double chi_square_uniform(std::span<const std::size_t> counts) {
  return chi_square_uniform_exact(counts).to_double();
}

std::optional<AgreementScore> intra_agreement(std::span<const std::size_t> counts) {
  if (counts.size() < 2) throw Error("agreement needs at least two categories");
  std::size_t n = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (n < 2) return std::nullopt;
  const Rational chi2 = chi_square_uniform_exact(counts);
  const Rational a = chi2 / Rational(static_cast<Int128>(n) * static_cast<Int128>(counts.size() - 1));
  return AgreementScore{a, a.to_double(), n};
}

std::vector<std::size_t> category_counts(std::span<const Label> annotations, std::size_t category_count) {
  std::vector<std::size_t> counts(category_count, 0);
  for (Label l : annotations) {
    if (l == kMissing) continue;
    if (l < 0 || static_cast<std::size_t>(l) >= category_count) {
      throw Error("label index " + std::to_string(l) + " outside scheme");
    }
    ++counts[static_cast<std::size_t>(l)];
  }
  return counts;
}

std::optional<AgreementScore> intra_agreement(std::span<const Label> annotations, std::size_t category_count) {
  auto counts = category_counts(annotations, category_count);
  return intra_agreement(std::span<const std::size_t>(counts));
}

const char* to_string(KappaStatus status) {
  switch (status) {
    case KappaStatus::kDefined:
      return "defined";
    case KappaStatus::kNoItems:
      return "no-items";
    case KappaStatus::kDegenerateExpected:
      return "degenerate-expected-agreement";
  }
  return "unknown";
}

KappaResult fleiss_kappa(const AnnotationMatrix& matrix, std::span<const std::size_t> subset) {
  std::vector<std::size_t> scope(subset.begin(), subset.end());
  if (scope.empty()) {
    scope.resize(matrix.annotator_count());
    std::iota(scope.begin(), scope.end(), std::size_t{0});
  }
  for (auto j : scope) {
    if (j >= matrix.annotator_count()) throw Error("annotator index out of range");
  }
  std::sort(scope.begin(), scope.end());

  const std::size_t cats = matrix.scheme().size();
  KappaResult result;
  std::vector<double> totals(cats, 0.0);
  double total_annotations = 0.0;
  double agreement_sum = 0.0;
  std::vector<std::size_t> counts(cats);
  for (std::size_t i = 0; i < matrix.item_count(); ++i) {
    std::fill(counts.begin(), counts.end(), 0);
    std::size_t n = 0;
    for (auto j : scope) {
      Label l = matrix.at(i, j);
      if (l == kMissing) continue;
      ++counts[static_cast<std::size_t>(l)];
      ++n;
    }
    if (n < 2) {
      result.excluded_items.push_back(matrix.item_id(i));
      continue;
    }
    double same = 0.0;
    for (std::size_t c = 0; c < cats; ++c) {
      same += static_cast<double>(counts[c]) * static_cast<double>(counts[c] - (counts[c] > 0 ? 1 : 0));
      totals[c] += static_cast<double>(counts[c]);
    }
    agreement_sum += same / (static_cast<double>(n) * static_cast<double>(n - 1));
    total_annotations += static_cast<double>(n);
    ++result.items_used;
  }
  if (result.items_used == 0) {
    result.status = KappaStatus::kNoItems;
    return result;
  }
  if (std::count_if(totals.begin(), totals.end(), [](double t) { return t > 0; }) < 2) {
    result.status = KappaStatus::kDegenerateExpected;
    return result;
  }
  const double observed = agreement_sum / static_cast<double>(result.items_used);
  double expected = 0.0;
  for (double t : totals) {
    const double p = t / total_annotations;
    expected += p * p;
  }
  result.kappa = (observed - expected) / (1.0 - expected);
  result.status = KappaStatus::kDefined;
  return result;
}

KappaResult cohen_kappa(const AnnotationMatrix& matrix, std::size_t annotator_a, std::size_t annotator_b) {
  if (annotator_a >= matrix.annotator_count() || annotator_b >= matrix.annotator_count()) {
    throw Error("annotator index out of range");
  }
  const std::size_t cats = matrix.scheme().size();
  std::vector<std::size_t> ca(cats, 0), cb(cats, 0);
  std::size_t agree = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < matrix.item_count(); ++i) {
    Label la = matrix.at(i, annotator_a);
    Label lb = matrix.at(i, annotator_b);
    if (la == kMissing || lb == kMissing) continue;
    ++ca[static_cast<std::size_t>(la)];
    ++cb[static_cast<std::size_t>(lb)];
    if (la == lb) ++agree;
    ++n;
  }
  KappaResult result;
  result.items_used = n;
  if (n == 0) {
    result.status = KappaStatus::kNoItems;
    return result;
  }
  for (std::size_t c = 0; c < cats; ++c) {
    if (ca[c] == n && cb[c] == n) {
      result.status = KappaStatus::kDegenerateExpected;
      return result;
    }
  }
  const double dn = static_cast<double>(n);
  double expected = 0.0;
  for (std::size_t c = 0; c < cats; ++c) {
    // Product of integer counts first so the result is symmetric in a and b.
    expected += static_cast<double>(ca[c] * cb[c]) / (dn * dn);
  }
  const double observed = static_cast<double>(agree) / dn;
  result.kappa = (observed - expected) / (1.0 - expected);
  result.status = KappaStatus::kDefined;
  return result;
}

const char* to_string(PairTag tag) {
  switch (tag) {
    case PairTag::kUntagged:
      return "all";
    case PairTag::kIntra:
      return "intra";
    case PairTag::kInter:
      return "inter";
  }
  return "unknown";
}

PairwiseNetwork pairwise_network(const AnnotationMatrix& matrix, const std::optional<Partition>& partition) {
  std::vector<int> groups(matrix.annotator_count(), 0);
  if (partition) groups = group_of(matrix, *partition);

  PairwiseNetwork net;
  for (std::size_t a = 0; a < matrix.annotator_count(); ++a) {
    if (groups[a] < 0) continue;
    for (std::size_t b = a + 1; b < matrix.annotator_count(); ++b) {
      if (groups[b] < 0) continue;
      auto k = cohen_kappa(matrix, a, b);
      PairAgreement pair{matrix.annotator(a).id, matrix.annotator(b).id, k.kappa, k.items_used, PairTag::kUntagged,
                         std::nullopt};
      if (partition) {
        if (groups[a] == groups[b]) {
          pair.tag = PairTag::kIntra;
          pair.group = static_cast<std::size_t>(groups[a]);
        } else {
          pair.tag = PairTag::kInter;
        }
      }
      net.pairs.push_back(std::move(pair));
    }
  }

  std::vector<PairTag> tags = partition ? std::vector<PairTag>{PairTag::kIntra, PairTag::kInter}
                                        : std::vector<PairTag>{PairTag::kUntagged};
  for (auto tag : tags) {
    TagSummary s;
    s.tag = tag;
    double sum = 0.0;
    for (const auto& p : net.pairs) {
      if (p.tag != tag) continue;
      if (!p.kappa) {
        ++s.undefined;
        continue;
      }
      ++s.pairs;
      sum += *p.kappa;
      s.min = s.min ? std::min(*s.min, *p.kappa) : *p.kappa;
      s.max = s.max ? std::max(*s.max, *p.kappa) : *p.kappa;
    }
    if (s.pairs) s.mean = sum / static_cast<double>(s.pairs);
    net.summary.push_back(s);
  }
  return net;
}

AgreementReport agreement_report(const AnnotationMatrix& matrix, const std::optional<Partition>& partition) {
  AgreementReport report;
  report.overall = fleiss_kappa(matrix);
  if (partition) {
    for (std::size_t w = 0; w < partition->k(); ++w) {
      std::vector<std::size_t> members;
      for (const auto& id : partition->groups[w]) {
        auto j = matrix.find_annotator(id);
        if (!j) throw Error("partition names unknown annotator '" + id + "'");
        members.push_back(*j);
      }
      report.groups.emplace_back(partition->group_name(w), fleiss_kappa(matrix, members));
    }
  }
  report.network = pairwise_network(matrix, partition);
  return report;
}

std::string to_json(const AgreementReport& report) {
  json j;
  j["overall_kappa"] = kappa_json(report.overall);
  j["group_kappas"] = json::array();
  json excluded = json::object();
  excluded["overall"] = report.overall.excluded_items;
  for (const auto& [name, k] : report.groups) {
    json g = kappa_json(k);
    g["group"] = name;
    j["group_kappas"].push_back(g);
    excluded[name] = k.excluded_items;
  }
  json pairs = json::array();
  for (const auto& p : report.network.pairs) {
    json e{{"a", p.a},
           {"b", p.b},
           {"kappa", p.kappa ? json(*p.kappa) : json(nullptr)},
           {"support", p.support},
           {"tag", to_string(p.tag)}};
    if (p.group) e["group"] = *p.group + 1;
    pairs.push_back(e);
  }
  json summary = json::array();
  for (const auto& s : report.network.summary) {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    summary.push_back(json{{"tag", to_string(s.tag)},
                           {"pairs", s.pairs},
                           {"undefined", s.undefined},
                           {"min", opt(s.min)},
                           {"max", opt(s.max)},
                           {"mean", opt(s.mean)}});
  }
  j["pairwise"] = json{{"pairs", pairs}, {"summary", summary}};
  j["excluded_items"] = excluded;
  return j.dump(2) + "\n";
}

std::string to_text(const AgreementReport& report) {
  std::ostringstream out;
  report::TextTable kappas({"scope", "fleiss_kappa", "items", "excluded"});
  kappas.add_row({"overall", report::fixed_or(report.overall.kappa), std::to_string(report.overall.items_used),
                  std::to_string(report.overall.excluded_items.size())});
  for (const auto& [name, k] : report.groups) {
    kappas.add_row({name, report::fixed_or(k.kappa), std::to_string(k.items_used),
                    std::to_string(k.excluded_items.size())});
  }
  out << kappas.render() << '\n';

  report::TextTable pairs({"annotator_a", "annotator_b", "tag", "cohen_kappa", "support"});
  for (const auto& p : report.network.pairs) {
    pairs.add_row({p.a, p.b, to_string(p.tag), report::fixed_or(p.kappa), std::to_string(p.support)});
  }
  out << pairs.render() << '\n';

  report::TextTable summary({"tag", "pairs", "min", "max", "mean"});
  for (const auto& s : report.network.summary) {
    summary.add_row({to_string(s.tag), std::to_string(s.pairs), report::fixed_or(s.min), report::fixed_or(s.max),
                     report::fixed_or(s.mean)});
  }
  out << summary.render();
  return out.str();
}

}  // namespace persp
