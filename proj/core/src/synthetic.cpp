#include "perspective/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <unordered_set>

#include "perspective/error.hpp"
#include "random.hpp"

namespace persp {

SyntheticDataset make_synthetic(const SyntheticSpec& spec) {
  if (spec.items == 0 || spec.group_size == 0 || spec.filler_vocabulary == 0) {
    throw Error("synthetic spec has an empty dimension");
  }
  std::mt19937_64 rng(spec.seed);
  const auto scheme = LabelScheme::binary();
  AnnotationMatrix::Builder builder(scheme);
  Partition planted{{{}, {}}, {"A", "B"}};
  for (std::size_t g = 0; g < 2; ++g) {
    for (std::size_t a = 1; a <= spec.group_size; ++a) {
      std::string id = std::string(g == 0 ? "a" : "b") + std::to_string(a);
      builder.declare_annotator(Annotator{id, planted.names[g], false});
      planted.groups[g].push_back(id);
    }
  }
  std::sort(planted.groups[0].begin(), planted.groups[0].end());
  std::sort(planted.groups[1].begin(), planted.groups[1].end());

  Corpus corpus;
  std::unordered_set<std::string> seen;
  const int width = static_cast<int>(std::to_string(spec.items).size());
  for (std::size_t i = 0; i < spec.items; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "t%0*zu", width, i + 1);
    const std::string id = buf;
    const bool has_a = detail::unit(rng) < spec.marker_rate;
    const bool has_b = detail::unit(rng) < spec.marker_rate;
    std::string text;
    do {
      std::vector<std::string> words;
      for (std::size_t t = 0; t < spec.filler_tokens; ++t) {
        words.push_back("w" + std::to_string(detail::bounded(rng, spec.filler_vocabulary)));
      }
      if (has_a) words.insert(words.begin() + static_cast<std::ptrdiff_t>(detail::bounded(rng, words.size() + 1)), spec.marker_a);
      if (has_b) words.insert(words.begin() + static_cast<std::ptrdiff_t>(detail::bounded(rng, words.size() + 1)), spec.marker_b);
      text.clear();
      for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
    } while (!seen.insert(text).second);
    corpus.push_back(CorpusItem{id, text, {}});

    for (std::size_t g = 0; g < 2; ++g) {
      const bool trigger = g == 0 ? has_a : has_b;
      for (const auto& annotator : planted.groups[g]) {
        bool positive = trigger;
        if (spec.noise > 0.0 && detail::unit(rng) < spec.noise) positive = !positive;
        builder.add(id, annotator, positive ? scheme.positive() : scheme.negative());
      }
    }
  }
  return {std::move(corpus), builder.build(), std::move(planted)};
}

void write_synthetic(const SyntheticDataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error("cannot write '" + (dir / name).string() + "'");
    return out;
  };
  {
    auto out = open("annotations.csv");
    write_long_csv(data.matrix, out);
  }
  {
    auto out = open("texts.jsonl");
    write_texts(data.corpus, out);
  }
  {
    auto out = open("annotators.csv");
    write_annotator_meta(data.matrix, out);
  }
}

}  // namespace persp
