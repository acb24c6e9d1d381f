#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace l1select {

/// Seeded generator with a platform-independent output stream.
///
/// Bits come from std::mt19937_64, whose sequence is fixed by the standard.
/// The standard distributions are not (their algorithms are unspecified), so
/// conversions are done here: uniform() keeps the top 53 bits of one draw and
/// scales by 2^-53, below(n) uses rejection on the low-bias range.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n); n must be positive.
  std::size_t below(std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace l1select
