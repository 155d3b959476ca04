#pragma once

#include <cstdint>
#include <limits>
#include <random>

// Portable draws over mt19937_64 (whose output sequence is fixed by the
// standard, unlike the std distributions).
namespace persp::detail {

inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = kMax - kMax % bound;
  for (;;) {
    const std::uint64_t v = rng();
    if (v < limit) return v % bound;
  }
}

// Uniform in [0, 1) with 53 random bits.
inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace persp::detail
