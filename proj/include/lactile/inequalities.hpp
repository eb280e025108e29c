#pragma once

// Ratios behind the lacunary exponential-sum inequalities: the exp(L^2)
// bound for lacunary series, moment growth for frequencies 2^j, its dual
// coefficient bound, dyadic BMO of lacunary series, and the coefficient
// bound on a level-set interval for general f.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "lactile/dyadic.hpp"
#include "lactile/error.hpp"
#include "lactile/grid.hpp"
#include "lactile/norms.hpp"

namespace lactile {

/// Coefficients a_j attached to the frequencies n_j of a lacunary sequence.
class CoefficientVector {
 public:
  CoefficientVector(std::vector<Complex> values, LacunarySequence seq) : values_(std::move(values)), seq_(std::move(seq)) {
    detail::require(values_.size() == static_cast<std::size_t>(seq_.count()),
                    "CoefficientVector: one coefficient per sequence member");
    for (const auto& v : values_) {
      detail::require(std::isfinite(v.real()) && std::isfinite(v.imag()), "CoefficientVector: non-finite entry");
    }
  }

  std::span<const Complex> values() const { return values_; }
  const LacunarySequence& sequence() const { return seq_; }
  std::size_t size() const { return values_.size(); }

  double l2_norm() const {
    double acc = 0.0;
    for (const auto& v : values_) acc += std::norm(v);
    return std::sqrt(acc);
  }

  CoefficientVector scaled(double c) const {
    std::vector<Complex> v(values_.begin(), values_.end());
    for (auto& x : v) x *= c;
    return {std::move(v), seq_};
  }

 private:
  std::vector<Complex> values_;
  LacunarySequence seq_;
};

/// sum_j a_j e_{n_j} on the 2^m grid.
inline GridFunction synthesize(const CoefficientVector& a, int m) {
  Spectrum s(m);
  detail::check_cutoff(s.size(), a.sequence().max());
  for (std::size_t j = 0; j < a.size(); ++j) s.coeff(a.sequence()[static_cast<int>(j)]) += a.values()[j];
  return from_spectrum(s);
}

/// ||sum a_j e_{n_j}||_{exp L^2} / ||a||_2.
inline double zygmund_ratio(const CoefficientVector& a, int m) {
  const double norm = a.l2_norm();
  if (norm == 0.0) return 0.0;
  return orlicz_norm(synthesize(a, m), gauges::exp_l2()) / norm;
}

/// ||sum a_j e_{2^j}||_p / (sqrt(p) ||a||_2) for even p.
inline double khinchin_moment_ratio(const CoefficientVector& a, int p, int m) {
  detail::require(p >= 2 && p % 2 == 0, "khinchin_moment_ratio: p must be an even integer >= 2");
  detail::require(a.sequence().alpha() == 2, "khinchin_moment_ratio: frequencies must be 2^j");
  const double norm = a.l2_norm();
  if (norm == 0.0) return 0.0;
  return lp_norm(synthesize(a, m), static_cast<double>(p)) / (std::sqrt(static_cast<double>(p)) * norm);
}

/// (sum_{2^j < N/2} |c_{2^j}(f)|^2)^{1/2}.
inline double dyadic_coefficient_l2(const GridFunction& f) {
  const Spectrum s = to_spectrum(f);
  double acc = 0.0;
  for (std::int64_t n = 1; n <= s.max_frequency(); n *= 2) acc += std::norm(s.coeff(n));
  return std::sqrt(acc);
}

/// ||{c_{2^j}(f)}||_{l^2} / ||f||_{L (log L)^alpha}.
inline double coeff_dual_ratio(const GridFunction& f, double alpha) {
  detail::require(alpha > 0.0, "coeff_dual_ratio: alpha must be positive");
  const double den = orlicz_norm(f, gauges::l_log_l(alpha));
  if (den == 0.0) return 0.0;
  return dyadic_coefficient_l2(f) / den;
}

/// sup over dyadic space intervals I of the mean over I of |f - mean_I f|.
inline double dyadic_bmo_norm(const GridFunction& f) {
  const int m = f.scale();
  double best = 0.0;
  for (int l = 0; l < m; ++l) {
    const std::size_t len = std::size_t{1} << (m - l);
    for (std::size_t b = 0; b < f.size(); b += len) {
      Complex mean{};
      for (std::size_t i = b; i < b + len; ++i) mean += f[i];
      mean /= static_cast<double>(len);
      double dev = 0.0;
      for (std::size_t i = b; i < b + len; ++i) dev += std::abs(f[i] - mean);
      best = std::max(best, dev / static_cast<double>(len));
    }
  }
  return best;
}

struct CoefficientBound {
  double lhs = 0.0;
  double rhs = 0.0;
  bool clamped = false;  // log term replaced by log 2
  double ratio() const { return rhs > 0.0 ? lhs / rhs : 0.0; }
};

/// lhs = (sum_l |int_I f e_{-c_l}|^2 / |I|)^{1/2} over members c_l < N/2;
/// rhs = 2^-k lambda (log(||f||_inf / (2^-k lambda)))^{1/2} |I|^{1/2}, the
/// log taken at least log 2.
inline CoefficientBound general_coeff_bound(const GridFunction& f, const DyadicInterval& I, const LacunarySequence& seq,
                                            int k, double lambda) {
  const int m = f.scale();
  detail::require(I.side == Side::Space && I.level <= m, "general_coeff_bound: need a space interval of level <= m");
  detail::require(lambda > 0.0 && k >= 0, "general_coeff_bound: need lambda > 0 and k >= 0");
  CoefficientBound out;
  const double sup = lp_norm(f, std::numeric_limits<double>::infinity());
  if (sup == 0.0) return out;

  const auto n = static_cast<std::int64_t>(f.size());
  const double inv_n = 1.0 / static_cast<double>(n);
  double acc = 0.0;
  for (auto c : seq.values()) {
    if (c >= n / 2) break;
    Complex integral{};
    for (auto x = I.sample_begin(m); x < I.sample_end(m); ++x) {
      const auto t = static_cast<std::int64_t>((static_cast<std::int64_t>(x) * c) % n);
      integral += f[x] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(n));
    }
    acc += std::norm(integral * inv_n);
  }
  out.lhs = std::sqrt(acc / I.length());

  const double level = std::ldexp(lambda, -k);
  double lg = std::log(sup / level);
  if (!(lg >= std::numbers::ln2)) {
    lg = std::numbers::ln2;
    out.clamped = true;
  }
  out.rhs = level * std::sqrt(lg) * std::sqrt(I.length());
  return out;
}

inline double general_coeff_bound_ratio(const GridFunction& f, const DyadicInterval& I, const LacunarySequence& seq,
                                        int k, double lambda) {
  return general_coeff_bound(f, I, seq, k, lambda).ratio();
}

}  // namespace lactile
