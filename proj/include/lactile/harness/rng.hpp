#pragma once

#include <cstdint>
#include <random>

namespace lactile::harness {

/// Seeded generator whose derived draws depend only on the raw 64-bit stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  /// Integer in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  /// Double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * unit(); }

  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace lactile::harness
