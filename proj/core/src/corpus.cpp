#include "perspective/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "perspective/csv.hpp"
#include "perspective/error.hpp"
#include "perspective/text.hpp"

namespace persp {
namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return in;
}

bool parse_flag(std::string_view v) {
  auto s = text::to_lower(v);
  return s == "1" || s == "true" || s == "yes" || s == "y";
}

}  // namespace

std::vector<std::string> AnnotationMatrix::annotator_ids() const {
  std::vector<std::string> ids;
  ids.reserve(annotators_.size());
  for (const auto& a : annotators_) ids.push_back(a.id);
  return ids;
}

std::optional<std::size_t> AnnotationMatrix::find_item(std::string_view id) const {
  auto it = std::lower_bound(items_.begin(), items_.end(), id);
  if (it == items_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - items_.begin());
}

std::optional<std::size_t> AnnotationMatrix::find_annotator(std::string_view id) const {
  auto it = std::lower_bound(annotators_.begin(), annotators_.end(), id,
                             [](const Annotator& a, std::string_view v) { return a.id < v; });
  if (it == annotators_.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - annotators_.begin());
}

std::size_t AnnotationMatrix::missing_count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), kMissing));
}

AnnotationMatrix AnnotationMatrix::restrict_items(std::span<const std::string> keep) const {
  std::set<std::string_view> wanted(keep.begin(), keep.end());
  AnnotationMatrix out(scheme_);
  out.annotators_ = annotators_;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (!wanted.contains(items_[i])) continue;
    out.items_.push_back(items_[i]);
    auto r = row(i);
    out.cells_.insert(out.cells_.end(), r.begin(), r.end());
  }
  return out;
}

AnnotationMatrix AnnotationMatrix::with_annotator_meta(std::span<const Annotator> meta) const {
  AnnotationMatrix out = *this;
  for (const auto& m : meta) {
    if (auto j = out.find_annotator(m.id)) {
      out.annotators_[*j].group = m.group;
      out.annotators_[*j].expert = m.expert;
    }
  }
  return out;
}

AnnotationMatrix::Builder& AnnotationMatrix::Builder::add(std::string item_id, std::string annotator_id,
                                                          std::string_view label) {
  auto l = scheme_.find(label);
  if (!l) throw Error("label '" + std::string(label) + "' is not in the label scheme");
  return add(std::move(item_id), std::move(annotator_id), *l);
}

AnnotationMatrix::Builder& AnnotationMatrix::Builder::add(std::string item_id, std::string annotator_id,
                                                          Label label) {
  if (item_id.empty()) throw Error("empty item id");
  if (annotator_id.empty()) throw Error("empty annotator id");
  if (label < 0 || static_cast<std::size_t>(label) >= scheme_.size()) {
    throw Error("label index " + std::to_string(label) + " is not in the label scheme");
  }
  items_.try_emplace(item_id, true);
  annotators_.try_emplace(annotator_id, Annotator{annotator_id, std::nullopt, false});
  auto [it, inserted] = cells_.try_emplace({item_id, annotator_id}, label);
  if (!inserted) {
    throw Error("duplicate annotation for item '" + item_id + "' by annotator '" + annotator_id + "'");
  }
  return *this;
}

AnnotationMatrix::Builder& AnnotationMatrix::Builder::declare_item(std::string item_id) {
  if (item_id.empty()) throw Error("empty item id");
  items_.try_emplace(std::move(item_id), true);
  return *this;
}

AnnotationMatrix::Builder& AnnotationMatrix::Builder::declare_annotator(Annotator annotator) {
  if (annotator.id.empty()) throw Error("empty annotator id");
  annotators_[annotator.id] = annotator;
  return *this;
}

AnnotationMatrix AnnotationMatrix::Builder::build() const {
  if (cells_.empty()) throw Error("no annotations");
  AnnotationMatrix m(scheme_);
  for (const auto& [id, _] : items_) m.items_.push_back(id);
  for (const auto& [id, a] : annotators_) m.annotators_.push_back(a);
  m.cells_.assign(m.items_.size() * m.annotators_.size(), kMissing);
  for (const auto& [key, label] : cells_) {
    auto i = *m.find_item(key.first);
    auto j = *m.find_annotator(key.second);
    m.cells_[i * m.annotators_.size() + j] = label;
  }
  for (std::size_t i = 0; i < m.items_.size(); ++i) {
    auto r = m.row(i);
    if (std::all_of(r.begin(), r.end(), [](Label l) { return l == kMissing; })) {
      throw Error("item '" + m.items_[i] + "' has no annotations");
    }
  }
  return m;
}

std::optional<AnnotationFormat> parse_annotation_format(std::string_view name) {
  if (name == "long-csv") return AnnotationFormat::LongCsv;
  if (name == "wide-tsv") return AnnotationFormat::WideTsv;
  return std::nullopt;
}

LoadedAnnotations load_annotations(std::istream& in, AnnotationFormat format, const LabelScheme& scheme,
                                   const std::string& source) {
  const char sep = format == AnnotationFormat::LongCsv ? ',' : '\t';
  auto records = csv::read(in, sep, source);
  if (records.empty()) throw ParseError(source, 1, "missing header");
  const auto& header = records.front().fields;
  AnnotationMatrix::Builder builder(scheme);
  Corpus texts;

  auto with_line = [&](std::size_t line, auto&& fn) {
    try {
      fn();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(source, line, e.what());
    }
  };

  if (format == AnnotationFormat::LongCsv) {
    if (header != std::vector<std::string>{"item_id", "annotator_id", "label"}) {
      throw ParseError(source, records.front().line, "expected header 'item_id,annotator_id,label'");
    }
    if (records.size() == 1) throw Error(source + ": no annotations");
    for (std::size_t r = 1; r < records.size(); ++r) {
      const auto& rec = records[r];
      if (rec.fields.size() != 3) {
        throw ParseError(source, rec.line, "expected 3 fields, found " + std::to_string(rec.fields.size()));
      }
      with_line(rec.line, [&] { builder.add(rec.fields[0], rec.fields[1], rec.fields[2]); });
    }
  } else {
    if (header.size() < 3 || header[0] != "item_id" || header[1] != "text") {
      throw ParseError(source, records.front().line, "expected header 'item_id<TAB>text<TAB><annotator>...'");
    }
    std::set<std::string> seen_annotators;
    for (std::size_t c = 2; c < header.size(); ++c) {
      if (header[c].empty() || !seen_annotators.insert(header[c]).second) {
        throw ParseError(source, records.front().line, "empty or repeated annotator id '" + header[c] + "'");
      }
      builder.declare_annotator(Annotator{header[c], std::nullopt, false});
    }
    std::set<std::string> seen_items;
    bool any = false;
    for (std::size_t r = 1; r < records.size(); ++r) {
      const auto& rec = records[r];
      if (rec.fields.size() != header.size()) {
        throw ParseError(source, rec.line,
                         "expected " + std::to_string(header.size()) + " fields, found " +
                             std::to_string(rec.fields.size()));
      }
      const auto& id = rec.fields[0];
      if (id.empty()) throw ParseError(source, rec.line, "empty item id");
      if (!seen_items.insert(id).second) throw ParseError(source, rec.line, "duplicate item '" + id + "'");
      bool annotated = false;
      for (std::size_t c = 2; c < header.size(); ++c) {
        if (rec.fields[c].empty()) continue;
        with_line(rec.line, [&] { builder.add(id, header[c], rec.fields[c]); });
        annotated = true;
      }
      if (!annotated) throw ParseError(source, rec.line, "item '" + id + "' has no annotations");
      any = true;
      texts.push_back(CorpusItem{id, rec.fields[1], {}});
    }
    if (!any) throw Error(source + ": no annotations");
  }
  return {builder.build(), std::move(texts)};
}

LoadedAnnotations load_annotations(const std::filesystem::path& path, AnnotationFormat format,
                                   const LabelScheme& scheme) {
  auto in = open_input(path);
  return load_annotations(in, format, scheme, path.string());
}

void write_long_csv(const AnnotationMatrix& matrix, std::ostream& out) {
  out << "item_id,annotator_id,label\n";
  for (std::size_t i = 0; i < matrix.item_count(); ++i) {
    for (std::size_t j = 0; j < matrix.annotator_count(); ++j) {
      Label l = matrix.at(i, j);
      if (l == kMissing) continue;
      csv::write_row(out, {matrix.item_id(i), matrix.annotator(j).id, matrix.scheme().name(l)});
    }
  }
}

std::vector<Annotator> load_annotator_meta(std::istream& in, const std::string& source) {
  auto records = csv::read(in, ',', source);
  if (records.empty()) throw ParseError(source, 1, "missing header");
  const auto& header = records.front().fields;
  if (header.empty() || header[0] != "annotator_id") {
    throw ParseError(source, records.front().line, "expected header starting with 'annotator_id'");
  }
  std::optional<std::size_t> group_col, expert_col;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c] == "group") group_col = c;
    if (header[c] == "expert") expert_col = c;
  }
  std::vector<Annotator> out;
  std::set<std::string> seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size()) {
      throw ParseError(source, rec.line, "expected " + std::to_string(header.size()) + " fields");
    }
    Annotator a;
    a.id = rec.fields[0];
    if (a.id.empty()) throw ParseError(source, rec.line, "empty annotator id");
    if (!seen.insert(a.id).second) throw ParseError(source, rec.line, "duplicate annotator '" + a.id + "'");
    if (group_col && !rec.fields[*group_col].empty()) a.group = rec.fields[*group_col];
    if (expert_col) a.expert = parse_flag(rec.fields[*expert_col]);
    out.push_back(std::move(a));
  }
  std::sort(out.begin(), out.end(), [](const Annotator& a, const Annotator& b) { return a.id < b.id; });
  return out;
}

std::vector<Annotator> load_annotator_meta(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_annotator_meta(in, path.string());
}

void write_annotator_meta(const AnnotationMatrix& matrix, std::ostream& out) {
  out << "annotator_id,group,expert\n";
  for (const auto& a : matrix.annotators()) {
    csv::write_row(out, {a.id, a.group.value_or(""), a.expert ? "1" : "0"});
  }
}

Corpus load_texts(std::istream& in, const std::string& source) {
  Corpus out;
  std::set<std::string> seen;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source, number, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("text") || !j["id"].is_string() ||
        !j["text"].is_string()) {
      throw ParseError(source, number, "expected an object with string 'id' and 'text'");
    }
    CorpusItem item{j["id"].get<std::string>(), j["text"].get<std::string>(), {}};
    if (item.id.empty()) throw ParseError(source, number, "empty id");
    if (!seen.insert(item.id).second) throw ParseError(source, number, "duplicate id '" + item.id + "'");
    if (j.contains("meta")) {
      if (!j["meta"].is_object()) throw ParseError(source, number, "'meta' must be an object");
      for (const auto& [k, v] : j["meta"].items()) {
        item.meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
      }
    }
    out.push_back(std::move(item));
  }
  return out;
}

Corpus load_texts(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_texts(in, path.string());
}

void write_texts(const Corpus& corpus, std::ostream& out) {
  for (const auto& item : corpus) {
    nlohmann::json j{{"id", item.id}, {"text", item.text}};
    if (!item.meta.empty()) j["meta"] = item.meta;
    out << j.dump() << '\n';
  }
}

Corpus deduplicate(const Corpus& items) {
  Corpus out;
  std::unordered_set<std::string> seen;
  for (const auto& item : items) {
    if (seen.insert(text::dedup_key(item.text)).second) out.push_back(item);
  }
  return out;
}

Corpus keyword_filter(const Corpus& items, std::span<const std::string> keywords) {
  if (keywords.empty()) throw Error("keyword list is empty");
  std::unordered_set<std::string> wanted;
  for (const auto& k : keywords) wanted.insert(text::to_lower(k));
  Corpus out;
  for (const auto& item : items) {
    auto toks = text::tokens(item.text);
    if (std::any_of(toks.begin(), toks.end(), [&](const std::string& t) { return wanted.contains(t); })) {
      out.push_back(item);
    }
  }
  return out;
}

std::vector<std::pair<std::string, std::size_t>> keyword_frequencies(const Corpus& items,
                                                                      std::span<const std::string> keywords) {
  if (keywords.empty()) throw Error("keyword list is empty");
  std::vector<std::pair<std::string, std::size_t>> table;
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& k : keywords) {
    auto key = text::to_lower(k);
    if (slot.try_emplace(key, table.size()).second) table.emplace_back(key, 0);
  }
  for (const auto& item : items) {
    for (const auto& t : text::tokens(item.text)) {
      if (auto it = slot.find(t); it != slot.end()) ++table[it->second].second;
    }
  }
  return table;
}

LabelDistribution label_distribution(const AnnotationMatrix& matrix) {
  const auto& scheme = matrix.scheme();
  LabelDistribution d{std::vector<std::size_t>(scheme.size(), 0), 0};
  std::vector<std::size_t> counts(scheme.size());
  for (std::size_t i = 0; i < matrix.item_count(); ++i) {
    std::fill(counts.begin(), counts.end(), 0);
    for (Label l : matrix.row(i)) {
      if (l != kMissing) ++counts[static_cast<std::size_t>(l)];
    }
    auto best = *std::max_element(counts.begin(), counts.end());
    std::size_t pick = static_cast<std::size_t>(scheme.positive());
    if (counts[pick] != best) {
      pick = static_cast<std::size_t>(std::find(counts.begin(), counts.end(), best) - counts.begin());
    }
    ++d.counts[pick];
    ++d.total;
  }
  return d;
}

LabelDistribution label_distribution(const AnnotationMatrix& matrix, const GoldStandard& gold) {
  LabelDistribution d{std::vector<std::size_t>(matrix.scheme().size(), 0), 0};
  for (const auto& l : gold.labels) {
    if (!matrix.find_item(l.item_id)) throw Error("gold item '" + l.item_id + "' is not in the annotation matrix");
    matrix.scheme().name(l.label);
    ++d.counts[static_cast<std::size_t>(l.label)];
    ++d.total;
  }
  return d;
}

}  // namespace persp
