#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "perspective/corpus.hpp"
#include "perspective/types.hpp"

namespace persp {

struct TokenizedDoc {
  std::string item_id;
  std::vector<std::string> tokens;
};

// Lowercased unigrams; URLs and @mentions dropped, hashtags unprefixed.
TokenizedDoc tokenize(std::string item_id, std::string_view text);
std::vector<TokenizedDoc> tokenize(const Corpus& corpus);

struct SparseVector {
  std::vector<std::uint32_t> index;  // ascending
  std::vector<double> value;

  double norm() const;
};

/// Smoothed TF-IDF: idf = ln((1 + D) / (1 + df)) + 1, rows L2-normalized.
class TfidfVectorizer {
 public:
  TfidfVectorizer() = default;
  // vocabulary must be sorted and unique, idf positive and aligned with it.
  TfidfVectorizer(std::vector<std::string> vocabulary, std::vector<double> idf);

  // Throws when every document is empty.
  static TfidfVectorizer fit(std::span<const TokenizedDoc> docs);

  // Out-of-vocabulary tokens contribute nothing; an all-OOV doc maps to zero.
  SparseVector transform(const TokenizedDoc& doc) const;

  std::size_t size() const noexcept { return vocabulary_.size(); }
  const std::vector<std::string>& vocabulary() const noexcept { return vocabulary_; }
  const std::vector<double>& idf() const noexcept { return idf_; }
  std::optional<std::uint32_t> index_of(std::string_view token) const;

 private:
  std::vector<std::string> vocabulary_;
  std::vector<double> idf_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

struct Hyperparams {
  double learning_rate = 2.0;  // 1/L for L2-normalized rows plus bias
  unsigned epochs = 1000;
  double l2 = 1e-4;
};

struct TrainingExample {
  SparseVector x;
  double y = 0.0;  // 1 for the positive class
};

// Mean logistic loss plus (l2 / 2) * ||w||^2; the bias is not penalized.
double training_objective(std::span<const double> weights, double bias, std::span<const TrainingExample> examples,
                          double l2);
// Analytic gradient of training_objective.
void training_gradient(std::span<const double> weights, double bias, std::span<const TrainingExample> examples,
                       double l2, std::vector<double>& grad_weights, double& grad_bias);

/// TF-IDF features plus a logistic-regression decision function.
struct LinearModel {
  TfidfVectorizer features;
  std::vector<double> weights;
  double bias = 0.0;
  Hyperparams hyperparams;
  std::uint64_t seed = 0;
  std::string positive = "1";
  std::string negative = "0";
  // Objective before every epoch, then after the last one.
  std::vector<double> loss_history;

  double score(const TokenizedDoc& doc) const;
};

/// Full-batch gradient descent from zero weights. Binary schemes only;
/// throws unless both classes occur in `labels`.
LinearModel train_linear(std::span<const TokenizedDoc> docs, std::span<const Label> labels, const LabelScheme& scheme,
                         const Hyperparams& hyperparams = {}, std::uint64_t seed = 0);

// Positive iff score >= 0.5.
PredictionSet predict(const LinearModel& model, std::span<const TokenizedDoc> docs, const LabelScheme& scheme,
                      std::string source = "reference");

std::string to_json(const LinearModel& model);
LinearModel model_from_json(const std::string& text);

struct ImportedPredictions {
  PredictionSet set;
  std::vector<std::string> warnings;
};

// CSV `item_id,label[,score]`. Unknown labels throw; ids absent from `gold`
// (when given) become warnings. The source is the file stem.
ImportedPredictions import_predictions(const std::filesystem::path& path, const LabelScheme& scheme,
                                       const GoldStandard* gold = nullptr);
ImportedPredictions import_predictions(std::istream& in, const LabelScheme& scheme, std::string source,
                                       const GoldStandard* gold = nullptr);

void write_predictions_csv(const PredictionSet& set, const LabelScheme& scheme, std::ostream& out);

}  // namespace persp
