#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "perspective/types.hpp"

namespace persp {

/// OR-fusion: positive iff at least one member predicts the positive class.
/// Members must cover the same item ids (the error lists the difference).
/// Scores, when every member has one, are the member maximum.
PredictionSet inclusive_ensemble(std::span<const PredictionSet> members, const LabelScheme& scheme);

struct ClassMetrics {
  std::string category;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // gold items of this class
};

struct MetricsReport {
  std::string source;
  std::size_t evaluated = 0;
  double accuracy = 0.0;
  double precision_pos = 0.0;
  double recall_pos = 0.0;
  double f1_pos = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double micro_precision = 0.0;  // equals accuracy for single-label data
  std::vector<ClassMetrics> per_class;
  // confusion[gold][predicted]
  std::vector<std::vector<std::size_t>> confusion;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;  // positive class vs rest
  // Zero-division cells, reported as 0 (e.g. "precision_pos").
  std::vector<std::string> flags;
};

// Restricted to gold ids; throws if a gold item has no prediction.
MetricsReport evaluate(const PredictionSet& pred, const GoldStandard& gold, const LabelScheme& scheme);

struct DisagreementCensus {
  std::string source_a;
  std::string source_b;
  std::size_t compared = 0;
  std::size_t diverging = 0;
  double percent = 0.0;           // rounded to 0.1
  std::size_t a_positive_only = 0;  // a positive, b not
  std::size_t b_positive_only = 0;
  std::vector<std::string> diverging_ids;
};

DisagreementCensus classifier_disagreement(const PredictionSet& a, const PredictionSet& b, const LabelScheme& scheme);

std::string to_json(const MetricsReport& report);
std::string to_json(const DisagreementCensus& census);

// Side-by-side comparison, three decimals.
std::string comparison_table(std::span<const MetricsReport> reports);

}  // namespace persp
