#include "perspective/types.hpp"

#include <algorithm>
#include <set>

#include "perspective/error.hpp"

namespace persp {

LabelScheme::LabelScheme(std::vector<std::string> categories, std::string positive)
    : categories_(std::move(categories)) {
  if (categories_.size() < 2) throw Error("label scheme needs at least two categories");
  std::set<std::string> seen;
  for (const auto& c : categories_) {
    if (c.empty()) throw Error("label scheme has an empty category name");
    if (!seen.insert(c).second) throw Error("label scheme repeats category '" + c + "'");
  }
  auto it = std::find(categories_.begin(), categories_.end(), positive);
  if (it == categories_.end()) throw Error("positive class '" + positive + "' is not a category");
  positive_ = static_cast<Label>(it - categories_.begin());
}

LabelScheme LabelScheme::binary() { return LabelScheme({"0", "1"}, "1"); }

const std::string& LabelScheme::name(Label label) const {
  if (label < 0 || static_cast<std::size_t>(label) >= categories_.size()) {
    throw Error("label index " + std::to_string(label) + " outside scheme");
  }
  return categories_[static_cast<std::size_t>(label)];
}

std::optional<Label> LabelScheme::find(std::string_view name) const {
  for (std::size_t i = 0; i < categories_.size(); ++i) {
    if (categories_[i] == name) return static_cast<Label>(i);
  }
  return std::nullopt;
}

Label LabelScheme::negative() const {
  if (!is_binary()) throw Error("negative class is only defined for binary schemes");
  return positive_ == 0 ? 1 : 0;
}

std::optional<Label> GoldStandard::find(std::string_view item_id) const {
  auto it = std::lower_bound(labels.begin(), labels.end(), item_id,
                             [](const LabeledItem& l, std::string_view id) { return l.item_id < id; });
  if (it == labels.end() || it->item_id != item_id) return std::nullopt;
  return it->label;
}

std::vector<std::string> GoldStandard::ids() const {
  std::vector<std::string> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(l.item_id);
  return out;
}

void GoldStandard::normalize() {
  std::sort(labels.begin(), labels.end(),
            [](const LabeledItem& a, const LabeledItem& b) { return a.item_id < b.item_id; });
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (labels[i].item_id == labels[i - 1].item_id) {
      throw Error("gold standard lists item '" + labels[i].item_id + "' twice");
    }
  }
}

const Prediction* PredictionSet::find(std::string_view item_id) const {
  auto it = std::lower_bound(predictions.begin(), predictions.end(), item_id,
                             [](const Prediction& p, std::string_view id) { return p.item_id < id; });
  if (it == predictions.end() || it->item_id != item_id) return nullptr;
  return &*it;
}

std::vector<std::string> PredictionSet::ids() const {
  std::vector<std::string> out;
  out.reserve(predictions.size());
  for (const auto& p : predictions) out.push_back(p.item_id);
  return out;
}

void PredictionSet::normalize() {
  std::sort(predictions.begin(), predictions.end(),
            [](const Prediction& a, const Prediction& b) { return a.item_id < b.item_id; });
  for (std::size_t i = 1; i < predictions.size(); ++i) {
    if (predictions[i].item_id == predictions[i - 1].item_id) {
      throw Error("prediction set '" + source + "' lists item '" + predictions[i].item_id + "' twice");
    }
  }
}

std::string Partition::group_name(std::size_t w) const {
  if (w < names.size() && !names[w].empty()) return names[w];
  return "group" + std::to_string(w + 1);
}

}  // namespace persp
