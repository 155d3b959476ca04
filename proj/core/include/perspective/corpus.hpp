#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "perspective/types.hpp"

namespace persp {

struct CorpusItem {
  std::string id;
  std::string text;
  std::map<std::string, std::string> meta;

  bool operator==(const CorpusItem&) const = default;
};

using Corpus = std::vector<CorpusItem>;

struct Annotator {
  std::string id;
  std::optional<std::string> group;
  bool expert = false;

  bool operator==(const Annotator&) const = default;
};

/// Items x annotators grid of category labels with MISSING cells.
///
/// Items and annotators are kept sorted by id, so two matrices holding the
/// same annotations compare equal regardless of input order.
class AnnotationMatrix {
 public:
  class Builder;

  const LabelScheme& scheme() const noexcept { return scheme_; }
  std::size_t item_count() const noexcept { return items_.size(); }
  std::size_t annotator_count() const noexcept { return annotators_.size(); }

  const std::vector<std::string>& items() const noexcept { return items_; }
  const std::vector<Annotator>& annotators() const noexcept { return annotators_; }
  const std::string& item_id(std::size_t i) const { return items_.at(i); }
  const Annotator& annotator(std::size_t j) const { return annotators_.at(j); }
  std::vector<std::string> annotator_ids() const;

  Label at(std::size_t item, std::size_t annotator) const {
    return cells_[item * annotators_.size() + annotator];
  }
  std::span<const Label> row(std::size_t item) const {
    return {cells_.data() + item * annotators_.size(), annotators_.size()};
  }

  std::optional<std::size_t> find_item(std::string_view id) const;
  std::optional<std::size_t> find_annotator(std::string_view id) const;

  std::size_t missing_count() const;

  // Keeps only the listed items (unknown ids are ignored).
  AnnotationMatrix restrict_items(std::span<const std::string> keep) const;
  // Overwrites group/expert metadata for the annotators listed; others keep theirs.
  AnnotationMatrix with_annotator_meta(std::span<const Annotator> meta) const;

  bool operator==(const AnnotationMatrix&) const = default;

 private:
  AnnotationMatrix(LabelScheme scheme) : scheme_(std::move(scheme)) {}

  LabelScheme scheme_;
  std::vector<std::string> items_;
  std::vector<Annotator> annotators_;
  std::vector<Label> cells_;
};

class AnnotationMatrix::Builder {
 public:
  explicit Builder(LabelScheme scheme) : scheme_(std::move(scheme)) {}

  // Throws on an unknown label or a repeated (item, annotator) pair.
  Builder& add(std::string item_id, std::string annotator_id, std::string_view label);
  Builder& add(std::string item_id, std::string annotator_id, Label label);
  // Registers an item/annotator even if it ends up with no annotations.
  Builder& declare_item(std::string item_id);
  Builder& declare_annotator(Annotator annotator);

  // Validates: at least one annotation, every item annotated at least once.
  AnnotationMatrix build() const;

 private:
  LabelScheme scheme_;
  std::map<std::pair<std::string, std::string>, Label> cells_;
  std::map<std::string, Annotator> annotators_;
  std::map<std::string, bool> items_;
};

enum class AnnotationFormat { LongCsv, WideTsv };

std::optional<AnnotationFormat> parse_annotation_format(std::string_view name);

struct LoadedAnnotations {
  AnnotationMatrix matrix;
  // Texts carried inline by wide-tsv; empty for long-csv.
  Corpus texts;
};

LoadedAnnotations load_annotations(std::istream& in, AnnotationFormat format, const LabelScheme& scheme,
                                   const std::string& source = "<input>");
LoadedAnnotations load_annotations(const std::filesystem::path& path, AnnotationFormat format,
                                   const LabelScheme& scheme);

// Canonical long-csv: header, then rows ordered by item id then annotator id.
void write_long_csv(const AnnotationMatrix& matrix, std::ostream& out);

// Companion annotator file: header `annotator_id,group,expert`.
std::vector<Annotator> load_annotator_meta(const std::filesystem::path& path);
std::vector<Annotator> load_annotator_meta(std::istream& in, const std::string& source = "<input>");
void write_annotator_meta(const AnnotationMatrix& matrix, std::ostream& out);

// JSON-lines text corpus: one {"id","text"[,"meta"]} object per line.
Corpus load_texts(const std::filesystem::path& path);
Corpus load_texts(std::istream& in, const std::string& source = "<input>");
void write_texts(const Corpus& corpus, std::ostream& out);

Corpus deduplicate(const Corpus& items);

// Throws if keywords is empty.
Corpus keyword_filter(const Corpus& items, std::span<const std::string> keywords);

// Token occurrences (not items) per keyword, in keyword order.
std::vector<std::pair<std::string, std::size_t>> keyword_frequencies(const Corpus& items,
                                                                      std::span<const std::string> keywords);

struct LabelDistribution {
  std::vector<std::size_t> counts;  // per scheme category
  std::size_t total = 0;
};

// Over the per-item majority of raw annotations (ties go to the positive
// class when it is tied, else the lowest category index).
LabelDistribution label_distribution(const AnnotationMatrix& matrix);
// Over the gold labels; throws if gold mentions an item absent from the matrix.
LabelDistribution label_distribution(const AnnotationMatrix& matrix, const GoldStandard& gold);

}  // namespace persp
