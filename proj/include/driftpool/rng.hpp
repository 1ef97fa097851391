#pragma once

#include <cstdint>
#include <random>

namespace driftpool {

// Portable random source: std::mt19937_64 is fully specified by the standard,
// while the standard distributions are not, so the mappings below are fixed.
//   uniform01: top 53 bits of one draw, scaled by 2^-53, in [0, 1).
//   normal:    Box-Muller on two uniform01 draws (u1 mapped to (0, 1]),
//              cosine branch only, no caching.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  double normal(double mean, double stddev);

 private:
  std::mt19937_64 engine_;
};

}  // namespace driftpool
