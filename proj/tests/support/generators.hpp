#pragma once

// Hand-rolled random generators for property tests. Deterministic per seed.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "perspective/corpus.hpp"

namespace gen {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [lo, hi]. Modulo bias is irrelevant for test data.
  int integer(int lo, int hi) {
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool coin(double p = 0.5) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

inline std::string annotator_name(int j) { return "a" + std::to_string(j); }

inline std::string item_name(int i) {
  std::string s = std::to_string(i);
  return "i" + std::string(s.size() < 3 ? 3 - s.size() : 0, '0') + s;
}

// items x annotators labels in [0, categories), with an optional missing rate.
// Every row keeps at least one label.
inline oracle::Grid grid(Rng& rng, int items, int annotators, int categories = 2, double missing = 0.0) {
  oracle::Grid g(static_cast<std::size_t>(items), std::vector<int>(static_cast<std::size_t>(annotators)));
  for (auto& row : g) {
    for (auto& cell : row) cell = rng.coin(missing) ? -1 : rng.integer(0, categories - 1);
    bool any = false;
    for (int v : row) any = any || v >= 0;
    if (!any) row[0] = rng.integer(0, categories - 1);
  }
  return g;
}

inline std::vector<std::string> category_names(int categories) {
  std::vector<std::string> names;
  for (int c = 0; c < categories; ++c) names.push_back(std::to_string(c));
  return names;
}

inline persp::AnnotationMatrix matrix(const oracle::Grid& g, int categories = 2) {
  persp::AnnotationMatrix::Builder b(persp::LabelScheme(category_names(categories), std::to_string(categories - 1)));
  for (std::size_t j = 0; j < g.front().size(); ++j) b.declare_annotator({annotator_name(static_cast<int>(j)), {}, false});
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g[i].size(); ++j) {
      if (g[i][j] >= 0) b.add(item_name(static_cast<int>(i)), annotator_name(static_cast<int>(j)), g[i][j]);
    }
  }
  return b.build();
}

}  // namespace gen
