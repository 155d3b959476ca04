#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "perspective/corpus.hpp"
#include "perspective/types.hpp"

namespace persp {

/// Two planted annotator groups with opposed triggers: group A marks items
/// containing `marker_a` positive, group B marks items containing `marker_b`
/// positive. Everything else is filler text.
struct SyntheticSpec {
  std::size_t items = 600;
  std::size_t group_size = 3;
  std::size_t filler_vocabulary = 200;
  std::size_t filler_tokens = 8;
  double marker_rate = 0.3;  // independent per marker
  double noise = 0.0;        // per-annotation flip probability
  std::uint64_t seed = 7;
  std::string marker_a = "tokx";
  std::string marker_b = "toky";
};

struct SyntheticDataset {
  Corpus corpus;
  AnnotationMatrix matrix;
  Partition planted;  // names "A", "B"
};

// Deterministic for a given spec; texts are unique.
SyntheticDataset make_synthetic(const SyntheticSpec& spec);

// Writes annotations.csv, texts.jsonl and annotators.csv into dir.
void write_synthetic(const SyntheticDataset& data, const std::filesystem::path& dir);

}  // namespace persp
