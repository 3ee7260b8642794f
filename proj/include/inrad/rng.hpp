#pragma once

#include <cstdint>
#include <random>

namespace inrad {

// Seeded generator with platform-independent draws. The std distributions are
// implementation-defined, so uniform and normal variates are derived from the
// raw 64-bit engine output here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  // [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  // Standard normal using Box-Muller; no cached second variate.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Independent stream derived from this seed, e.g. one per layer.
  Rng fork(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace inrad
