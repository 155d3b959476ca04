#include "perspective/classify.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "json.hpp"
#include "perspective/csv.hpp"
#include "perspective/error.hpp"
#include "perspective/report.hpp"
#include "perspective/text.hpp"

namespace persp {
namespace {

using nlohmann::json;

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double dot(std::span<const double> w, const SparseVector& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.index.size(); ++i) s += w[x.index[i]] * x.value[i];
  return s;
}

}  // namespace

TokenizedDoc tokenize(std::string item_id, std::string_view text) { return {std::move(item_id), text::tokens(text)}; }

std::vector<TokenizedDoc> tokenize(const Corpus& corpus) {
  std::vector<TokenizedDoc> docs;
  docs.reserve(corpus.size());
  for (const auto& item : corpus) docs.push_back(tokenize(item.id, item.text));
  return docs;
}

double SparseVector::norm() const {
  double s = 0.0;
  for (double v : value) s += v * v;
  return std::sqrt(s);
}

TfidfVectorizer::TfidfVectorizer(std::vector<std::string> vocabulary, std::vector<double> idf)
    : vocabulary_(std::move(vocabulary)), idf_(std::move(idf)) {
  if (vocabulary_.size() != idf_.size()) throw Error("vocabulary and idf sizes differ");
  for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
    if (i && !(vocabulary_[i - 1] < vocabulary_[i])) throw Error("vocabulary must be sorted and unique");
    if (!(idf_[i] > 0.0)) throw Error("idf must be positive");
    index_.emplace(vocabulary_[i], static_cast<std::uint32_t>(i));
  }
}

TfidfVectorizer TfidfVectorizer::fit(std::span<const TokenizedDoc> docs) {
  std::map<std::string, std::size_t> df;
  bool any = false;
  for (const auto& d : docs) {
    std::set<std::string_view> seen(d.tokens.begin(), d.tokens.end());
    any = any || !seen.empty();
    for (auto t : seen) ++df[std::string(t)];
  }
  if (!any) throw Error("cannot fit TF-IDF: every document is empty");
  const double n = static_cast<double>(docs.size());
  std::vector<std::string> vocab;
  std::vector<double> idf;
  for (const auto& [token, count] : df) {
    vocab.push_back(token);
    idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return TfidfVectorizer(std::move(vocab), std::move(idf));
}

std::optional<std::uint32_t> TfidfVectorizer::index_of(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SparseVector TfidfVectorizer::transform(const TokenizedDoc& doc) const {
  std::map<std::uint32_t, double> tf;
  for (const auto& t : doc.tokens) {
    if (auto i = index_of(t)) tf[*i] += 1.0;
  }
  SparseVector v;
  double sq = 0.0;
  for (auto& [i, count] : tf) {
    count *= idf_[i];
    sq += count * count;
  }
  const double norm = std::sqrt(sq);
  for (const auto& [i, value] : tf) {
    v.index.push_back(i);
    v.value.push_back(value / norm);
  }
  return v;
}

double training_objective(std::span<const double> weights, double bias, std::span<const TrainingExample> examples,
                          double l2) {
  double loss = 0.0;
  for (const auto& ex : examples) {
    const double z = dot(weights, ex.x) + bias;
    loss += softplus(z) - ex.y * z;
  }
  loss /= static_cast<double>(examples.size());
  double sq = 0.0;
  for (double w : weights) sq += w * w;
  return loss + 0.5 * l2 * sq;
}

void training_gradient(std::span<const double> weights, double bias, std::span<const TrainingExample> examples,
                       double l2, std::vector<double>& grad_weights, double& grad_bias) {
  grad_weights.assign(weights.size(), 0.0);
  grad_bias = 0.0;
  const double inv_n = 1.0 / static_cast<double>(examples.size());
  for (const auto& ex : examples) {
    const double r = (sigmoid(dot(weights, ex.x) + bias) - ex.y) * inv_n;
    for (std::size_t i = 0; i < ex.x.index.size(); ++i) grad_weights[ex.x.index[i]] += r * ex.x.value[i];
    grad_bias += r;
  }
  for (std::size_t i = 0; i < weights.size(); ++i) grad_weights[i] += l2 * weights[i];
}

double LinearModel::score(const TokenizedDoc& doc) const {
  return sigmoid(dot(weights, features.transform(doc)) + bias);
}

LinearModel train_linear(std::span<const TokenizedDoc> docs, std::span<const Label> labels, const LabelScheme& scheme,
                         const Hyperparams& hyperparams, std::uint64_t seed) {
  if (!scheme.is_binary()) throw Error("the reference classifier supports binary schemes only");
  if (docs.size() != labels.size()) throw Error("documents and labels differ in length");
  if (hyperparams.learning_rate <= 0.0 || hyperparams.l2 < 0.0) throw Error("invalid hyperparameters");
  const Label positive = scheme.positive();
  const auto positives = std::count(labels.begin(), labels.end(), positive);
  if (positives == 0 || static_cast<std::size_t>(positives) == labels.size()) {
    throw Error("training data must contain both classes");
  }

  LinearModel model;
  model.features = TfidfVectorizer::fit(docs);
  model.hyperparams = hyperparams;
  model.seed = seed;
  model.positive = scheme.name(positive);
  model.negative = scheme.name(scheme.negative());
  model.weights.assign(model.features.size(), 0.0);

  std::vector<TrainingExample> examples;
  examples.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (labels[i] == kMissing) throw Error("missing label for training item '" + docs[i].item_id + "'");
    examples.push_back({model.features.transform(docs[i]), labels[i] == positive ? 1.0 : 0.0});
  }

  std::vector<double> grad;
  double grad_bias = 0.0;
  for (unsigned epoch = 0; epoch < hyperparams.epochs; ++epoch) {
    model.loss_history.push_back(training_objective(model.weights, model.bias, examples, hyperparams.l2));
    training_gradient(model.weights, model.bias, examples, hyperparams.l2, grad, grad_bias);
    for (std::size_t i = 0; i < grad.size(); ++i) model.weights[i] -= hyperparams.learning_rate * grad[i];
    model.bias -= hyperparams.learning_rate * grad_bias;
  }
  model.loss_history.push_back(training_objective(model.weights, model.bias, examples, hyperparams.l2));
  return model;
}

PredictionSet predict(const LinearModel& model, std::span<const TokenizedDoc> docs, const LabelScheme& scheme,
                      std::string source) {
  auto pos = scheme.find(model.positive);
  auto neg = scheme.find(model.negative);
  if (!pos || !neg || *pos != scheme.positive()) throw Error("model labels do not match the label scheme");
  PredictionSet set;
  set.source = std::move(source);
  for (const auto& d : docs) {
    const double s = model.score(d);
    set.predictions.push_back({d.item_id, s >= 0.5 ? *pos : *neg, s});
  }
  set.normalize();
  return set;
}

std::string to_json(const LinearModel& model) {
  json j{{"kind", "tfidf-logistic"},
         {"vocabulary", model.features.vocabulary()},
         {"idf", model.features.idf()},
         {"weights", model.weights},
         {"bias", model.bias},
         {"hyperparams",
          {{"learning_rate", model.hyperparams.learning_rate},
           {"epochs", model.hyperparams.epochs},
           {"l2", model.hyperparams.l2}}},
         {"seed", model.seed},
         {"positive", model.positive},
         {"negative", model.negative},
         {"final_loss", model.loss_history.empty() ? json(nullptr) : json(model.loss_history.back())}};
  return j.dump(1) + "\n";
}

LinearModel model_from_json(const std::string& text) {
  try {
    auto j = json::parse(text);
    if (j.value("kind", "") != "tfidf-logistic") throw Error("not a tfidf-logistic model");
    LinearModel m;
    m.features = TfidfVectorizer(j.at("vocabulary").get<std::vector<std::string>>(),
                                 j.at("idf").get<std::vector<double>>());
    m.weights = j.at("weights").get<std::vector<double>>();
    if (m.weights.size() != m.features.size()) throw Error("model weights and vocabulary differ in size");
    m.bias = j.at("bias").get<double>();
    const auto& h = j.at("hyperparams");
    m.hyperparams = {h.at("learning_rate").get<double>(), h.at("epochs").get<unsigned>(), h.at("l2").get<double>()};
    m.seed = j.at("seed").get<std::uint64_t>();
    m.positive = j.at("positive").get<std::string>();
    m.negative = j.at("negative").get<std::string>();
    if (const auto& f = j.value("final_loss", json()); f.is_number()) m.loss_history = {f.get<double>()};
    return m;
  } catch (const json::exception& e) {
    throw Error(std::string("invalid model JSON: ") + e.what());
  }
}

ImportedPredictions import_predictions(std::istream& in, const LabelScheme& scheme, std::string source,
                                       const GoldStandard* gold) {
  auto records = csv::read(in, ',', source);
  if (records.empty()) throw ParseError(source, 1, "missing header");
  const auto& header = records.front().fields;
  const bool has_score = header.size() == 3 && header[2] == "score";
  if (header.size() < 2 || header[0] != "item_id" || header[1] != "label" || (header.size() == 3 && !has_score) ||
      header.size() > 3) {
    throw ParseError(source, records.front().line, "expected header 'item_id,label[,score]'");
  }
  ImportedPredictions out;
  out.set.source = source;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size()) {
      throw ParseError(source, rec.line, "expected " + std::to_string(header.size()) + " fields");
    }
    auto label = scheme.find(rec.fields[1]);
    if (!label) throw ParseError(source, rec.line, "label '" + rec.fields[1] + "' is not in the label scheme");
    Prediction p{rec.fields[0], *label, std::nullopt};
    if (p.item_id.empty()) throw ParseError(source, rec.line, "empty item id");
    if (has_score && !rec.fields[2].empty()) {
      double v = 0;
      const auto& f = rec.fields[2];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw ParseError(source, rec.line, "score '" + f + "' is not a number");
      }
      p.score = v;
    }
    if (gold && !gold->find(p.item_id)) {
      out.warnings.push_back("line " + std::to_string(rec.line) + ": item '" + p.item_id + "' is not in the gold standard");
    }
    out.set.predictions.push_back(std::move(p));
  }
  out.set.normalize();
  return out;
}

ImportedPredictions import_predictions(const std::filesystem::path& path, const LabelScheme& scheme,
                                       const GoldStandard* gold) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return import_predictions(in, scheme, path.stem().string(), gold);
}

void write_predictions_csv(const PredictionSet& set, const LabelScheme& scheme, std::ostream& out) {
  const bool scores = std::any_of(set.predictions.begin(), set.predictions.end(),
                                  [](const Prediction& p) { return p.score.has_value(); });
  out << (scores ? "item_id,label,score\n" : "item_id,label\n");
  for (const auto& p : set.predictions) {
    std::vector<std::string> row{p.item_id, scheme.name(p.label)};
    if (scores) row.push_back(p.score ? report::shortest(*p.score) : "");
    csv::write_row(out, row);
  }
}

}  // namespace persp
