#pragma once

#include <cstdint>
#include <limits>

namespace psm {

// SplitMix64 (Steele, Lea & Flood). The state advances by the golden-ratio
// increment 0x9E3779B97F4A7C15 and each output is the state passed through
// the variant-13 finaliser:
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   z =  z ^ (z >> 31)
// Every derived draw below is specified so any implementation can reproduce
// the exact stream from a seed.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next(); }
  std::uint64_t next();

  // Top 53 bits scaled by 2^-53: uniform on [0, 1).
  double uniform();

  // Uniform on {0, ..., bound - 1}: draws are rejected while below
  // (2^64 - bound) mod bound, then reduced modulo bound. `bound` must be > 0.
  std::uint64_t uniform_index(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

// Standard normals by the Box-Muller transform. Each pair consumes two
// uniforms u1, u2 from the generator, with r = sqrt(-2 ln(1 - u1)) and
// t = 2 pi u2; r cos t is returned first and r sin t on the following call.
class NormalSampler {
 public:
  explicit NormalSampler(SplitMix64& rng) : rng_(rng) {}

  double operator()();

 private:
  SplitMix64& rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace psm
