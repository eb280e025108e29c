#pragma once

// Smooth dyadic pieces of the kernel 1/y:
//   chi(t)   = ramp((8 - |t|) / 4),  ramp(s) = h(s) / (h(s) + h(1 - s)),  h(s) = e^{-1/s} (s > 0)
//   rho(y)   = chi(y) - chi(2y)                 supported in 2 < |y| < 8
//   psi(y)   = rho(y) / y                       odd
//   psi_k(y) = 2^k psi(2^k y) = rho(2^k y) / y
// so that sum_{k=0}^{K} psi_k(y) = (chi(y) - chi(2^{K+1} y)) / y = 1/y
// for 4 * 2^-K <= |y| <= 1/2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "lactile/error.hpp"

namespace lactile {

struct KernelBump {
  static double h(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

  static double ramp(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = h(s);
    return a / (a + h(1.0 - s));
  }

  /// Even cutoff: 1 on |t| <= 4, 0 on |t| >= 8.
  static double chi(double t) { return ramp((8.0 - std::abs(t)) / 4.0); }

  static double rho(double y) { return chi(y) - chi(2.0 * y); }

  static double psi(double y) { return y == 0.0 ? 0.0 : rho(y) / y; }

  /// psi_k(y) = 2^k psi(2^k y), evaluated as rho(2^k y) / y.
  static double psi_k(int k, double y) {
    if (y == 0.0) return 0.0;
    return rho(std::ldexp(y, k)) / y;
  }
};

/// Nonzero samples of psi_k at grid differences d / N, d in (-N/2, N/2).
struct KernelTaps {
  int level = 0;
  std::vector<std::int64_t> offset;  // d
  std::vector<double> value;         // psi_k(d / N)
};

inline KernelTaps kernel_taps(int m, int k) {
  detail::require(k >= 0 && k <= m, "kernel_taps: level out of range");
  KernelTaps taps;
  taps.level = k;
  const std::int64_t n = std::int64_t{1} << m;
  // Support of psi_k is 2^{1-k} < |y| < 2^{3-k}; only look there.
  const std::int64_t reach = std::min<std::int64_t>(n / 2 - 1, (std::int64_t{8} << m) >> k);
  for (std::int64_t d = -reach; d <= reach; ++d) {
    const double v = KernelBump::psi_k(k, static_cast<double>(d) / static_cast<double>(n));
    if (v != 0.0) {
      taps.offset.push_back(d);
      taps.value.push_back(v);
    }
  }
  return taps;
}

}  // namespace lactile
