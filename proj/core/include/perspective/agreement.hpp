#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "perspective/corpus.hpp"
#include "perspective/rational.hpp"
#include "perspective/types.hpp"

namespace persp {

/// Chi-square statistic of category counts against the uniform distribution:
/// sum_c (n_c - n/c)^2 / (n/c). Throws Error("empty annotation set") if all
/// counts are zero.
double chi_square_uniform(std::span<const std::size_t> counts);
Rational chi_square_uniform_exact(std::span<const std::size_t> counts);

/// Normalized chi-square agreement of one annotation multiset.
struct AgreementScore {
  Rational exact;
  double value = 0.0;  // in [0, 1]
  std::size_t support = 0;
};

// a = chi2 / (n (c - 1)): 1 for unanimity, 0 for a uniform split. The category
// count c is counts.size(). Undefined (nullopt) with fewer than 2 annotations.
std::optional<AgreementScore> intra_agreement(std::span<const std::size_t> counts);
// Missing cells are skipped.
std::optional<AgreementScore> intra_agreement(std::span<const Label> annotations, std::size_t category_count);

// Per-category counts of the non-missing labels.
std::vector<std::size_t> category_counts(std::span<const Label> annotations, std::size_t category_count);

enum class KappaStatus {
  kDefined,
  kNoItems,             // nothing with enough annotations in scope
  kDegenerateExpected,  // expected agreement is 1 (single category used)
};

const char* to_string(KappaStatus status);

struct KappaResult {
  std::optional<double> kappa;
  KappaStatus status = KappaStatus::kNoItems;
  std::size_t items_used = 0;
  // Items skipped for having fewer than two annotations in scope (Fleiss only).
  std::vector<std::string> excluded_items;
};

/// Fleiss' kappa over the annotators in `subset` (all annotators when empty).
/// Rater counts may vary per item; items with fewer than two in-scope
/// annotations are excluded and listed.
KappaResult fleiss_kappa(const AnnotationMatrix& matrix, std::span<const std::size_t> subset = {});

/// Cohen's kappa over the items both annotators labelled.
KappaResult cohen_kappa(const AnnotationMatrix& matrix, std::size_t annotator_a, std::size_t annotator_b);

enum class PairTag { kUntagged, kIntra, kInter };

const char* to_string(PairTag tag);

struct PairAgreement {
  std::string a;
  std::string b;
  std::optional<double> kappa;  // absent when undefined
  std::size_t support = 0;
  PairTag tag = PairTag::kUntagged;
  std::optional<std::size_t> group;  // set for intra pairs
};

struct TagSummary {
  PairTag tag = PairTag::kUntagged;
  std::size_t pairs = 0;    // defined pairs
  std::size_t undefined = 0;
  std::optional<double> min;
  std::optional<double> max;
  std::optional<double> mean;
};

struct PairwiseNetwork {
  std::vector<PairAgreement> pairs;  // every unordered pair, ids ascending
  std::vector<TagSummary> summary;
};

// Annotators outside the partition (when one is given) are left out.
PairwiseNetwork pairwise_network(const AnnotationMatrix& matrix, const std::optional<Partition>& partition = {});

struct AgreementReport {
  KappaResult overall;
  std::vector<std::pair<std::string, KappaResult>> groups;
  PairwiseNetwork network;
};

AgreementReport agreement_report(const AnnotationMatrix& matrix, const std::optional<Partition>& partition = {});

// JSON keys: overall_kappa, group_kappas, pairwise, excluded_items.
std::string to_json(const AgreementReport& report);
// Aligned-text tables for human reading.
std::string to_text(const AgreementReport& report);

}  // namespace persp
