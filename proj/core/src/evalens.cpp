#include "perspective/evalens.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "perspective/error.hpp"
#include "perspective/report.hpp"

namespace persp {
namespace {

using nlohmann::json;

void require_same_ids(const PredictionSet& a, const PredictionSet& b) {
  auto ia = a.ids();
  auto ib = b.ids();
  if (ia == ib) return;
  std::vector<std::string> diff;
  std::set_symmetric_difference(ia.begin(), ia.end(), ib.begin(), ib.end(), std::back_inserter(diff));
  std::string listed;
  for (std::size_t i = 0; i < diff.size() && i < 10; ++i) listed += (i ? ", " : "") + diff[i];
  if (diff.size() > 10) listed += ", ...";
  throw Error("prediction sets '" + a.source + "' and '" + b.source + "' cover different items (" +
              std::to_string(diff.size()) + " differ: " + listed + ")");
}

double safe_div(double num, double den, const std::string& flag, std::vector<std::string>& flags) {
  if (den == 0.0) {
    flags.push_back(flag);
    return 0.0;
  }
  return num / den;
}

}  // namespace

PredictionSet inclusive_ensemble(std::span<const PredictionSet> members, const LabelScheme& scheme) {
  if (members.size() < 2) throw Error("inclusive ensemble needs at least two members");
  if (!scheme.is_binary()) throw Error("inclusive ensemble needs a binary scheme");
  for (std::size_t m = 1; m < members.size(); ++m) require_same_ids(members[0], members[m]);
  const Label pos = scheme.positive();
  const Label neg = scheme.negative();

  PredictionSet out;
  out.source = "inclusive";
  const std::size_t n = members[0].size();
  for (std::size_t i = 0; i < n; ++i) {
    bool positive = false;
    bool all_scored = true;
    double best = 0.0;
    for (const auto& m : members) {
      const auto& p = m.predictions[i];
      positive = positive || p.label == pos;
      if (!p.score) {
        all_scored = false;
      } else {
        best = std::max(best, *p.score);
      }
    }
    out.predictions.push_back(
        {members[0].predictions[i].item_id, positive ? pos : neg, all_scored ? std::optional<double>(best) : std::nullopt});
  }
  return out;
}

MetricsReport evaluate(const PredictionSet& pred, const GoldStandard& gold, const LabelScheme& scheme) {
  const std::size_t cats = scheme.size();
  MetricsReport r;
  r.source = pred.source;
  r.confusion.assign(cats, std::vector<std::size_t>(cats, 0));
  for (const auto& g : gold.labels) {
    const Prediction* p = pred.find(g.item_id);
    if (!p) throw Error("'" + pred.source + "' has no prediction for gold item '" + g.item_id + "'");
    ++r.confusion[static_cast<std::size_t>(g.label)][static_cast<std::size_t>(p->label)];
    ++r.evaluated;
  }

  std::size_t correct = 0;
  for (std::size_t c = 0; c < cats; ++c) correct += r.confusion[c][c];
  r.accuracy = safe_div(static_cast<double>(correct), static_cast<double>(r.evaluated), "accuracy", r.flags);
  r.micro_precision = r.accuracy;

  const auto pos = static_cast<std::size_t>(scheme.positive());
  for (std::size_t c = 0; c < cats; ++c) {
    std::size_t predicted = 0, actual = 0;
    for (std::size_t o = 0; o < cats; ++o) {
      predicted += r.confusion[o][c];
      actual += r.confusion[c][o];
    }
    ClassMetrics m{scheme.name(static_cast<Label>(c)), 0.0, 0.0, 0.0, actual};
    const std::string tag = c == pos ? "pos" : scheme.name(static_cast<Label>(c));
    const double tp = static_cast<double>(r.confusion[c][c]);
    m.precision = safe_div(tp, static_cast<double>(predicted), "precision_" + tag, r.flags);
    m.recall = safe_div(tp, static_cast<double>(actual), "recall_" + tag, r.flags);
    m.f1 = safe_div(2.0 * m.precision * m.recall, m.precision + m.recall, "f1_" + tag, r.flags);
    r.macro_precision += m.precision;
    r.macro_recall += m.recall;
    r.macro_f1 += m.f1;
    r.per_class.push_back(m);
  }
  r.macro_precision /= static_cast<double>(cats);
  r.macro_recall /= static_cast<double>(cats);
  r.macro_f1 /= static_cast<double>(cats);

  r.precision_pos = r.per_class[pos].precision;
  r.recall_pos = r.per_class[pos].recall;
  r.f1_pos = r.per_class[pos].f1;
  r.tp = r.confusion[pos][pos];
  for (std::size_t c = 0; c < cats; ++c) {
    for (std::size_t o = 0; o < cats; ++o) {
      if (c == pos && o != pos) r.fn += r.confusion[c][o];
      if (c != pos && o == pos) r.fp += r.confusion[c][o];
      if (c != pos && o != pos) r.tn += r.confusion[c][o];
    }
  }
  return r;
}

DisagreementCensus classifier_disagreement(const PredictionSet& a, const PredictionSet& b, const LabelScheme& scheme) {
  require_same_ids(a, b);
  const Label pos = scheme.positive();
  DisagreementCensus c;
  c.source_a = a.source;
  c.source_b = b.source;
  c.compared = a.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& pa = a.predictions[i];
    const auto& pb = b.predictions[i];
    if (pa.label == pb.label) continue;
    ++c.diverging;
    c.diverging_ids.push_back(pa.item_id);
    if (pa.label == pos) ++c.a_positive_only;
    else if (pb.label == pos) ++c.b_positive_only;
  }
  c.percent = report::percent_value(c.diverging, c.compared);
  return c;
}

std::string to_json(const MetricsReport& r) {
  json per_class = json::array();
  for (const auto& m : r.per_class) {
    per_class.push_back(json{{"category", m.category},
                             {"precision", m.precision},
                             {"recall", m.recall},
                             {"f1", m.f1},
                             {"support", m.support}});
  }
  json j{{"source", r.source},
         {"evaluated", r.evaluated},
         {"accuracy", r.accuracy},
         {"precision_pos", r.precision_pos},
         {"recall_pos", r.recall_pos},
         {"f1_pos", r.f1_pos},
         {"macro_precision", r.macro_precision},
         {"macro_recall", r.macro_recall},
         {"macro_f1", r.macro_f1},
         {"micro_precision", r.micro_precision},
         {"per_class", per_class},
         {"confusion",
          {{"tp", r.tp}, {"fp", r.fp}, {"fn", r.fn}, {"tn", r.tn}, {"matrix", r.confusion}}},
         {"flags", r.flags}};
  return j.dump(2) + "\n";
}

std::string to_json(const DisagreementCensus& c) {
  json j{{"source_a", c.source_a},
         {"source_b", c.source_b},
         {"compared", c.compared},
         {"diverging", c.diverging},
         {"percent", c.percent},
         {"a_positive_b_negative", c.a_positive_only},
         {"b_positive_a_negative", c.b_positive_only},
         {"diverging_ids", c.diverging_ids}};
  return j.dump(2) + "\n";
}

std::string comparison_table(std::span<const MetricsReport> reports) {
  report::TextTable t({"classifier", "accuracy", "precision_pos", "recall_pos", "f1_pos", "macro_p", "macro_r",
                       "macro_f1"});
  for (const auto& r : reports) {
    t.add_row({r.source, report::fixed(r.accuracy), report::fixed(r.precision_pos), report::fixed(r.recall_pos),
               report::fixed(r.f1_pos), report::fixed(r.macro_precision), report::fixed(r.macro_recall),
               report::fixed(r.macro_f1)});
  }
  return t.render();
}

}  // namespace persp
