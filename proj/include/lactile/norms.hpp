#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "lactile/error.hpp"
#include "lactile/grid.hpp"

namespace lactile {

/// ((1/N) sum |f|^p)^{1/p}; p = infinity gives the max.
inline double lp_norm(const GridFunction& f, double p) {
  if (!(p >= 1.0)) throw ConfigError("lp_norm: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : f.samples()) m = std::max(m, std::abs(v));
    return m;
  }
  double acc = 0.0;
  for (const auto& v : f.samples()) acc += std::pow(std::abs(v), p);
  return std::pow(acc / static_cast<double>(f.size()), 1.0 / p);
}

/// sup_t t |{|g| > t}|, evaluated exactly: with |g| sorted descending,
/// max_i v_i * i / N.
inline double weak_l1_norm(const GridFunction& g) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::abs(g[i]);
  std::sort(v.begin(), v.end(), std::greater<>());
  double best = 0.0;
  const double n = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) best = std::max(best, v[i] * static_cast<double>(i + 1) / n);
  return best;
}

/// Young function phi: [0, inf) -> [0, inf], phi(0) = 0, increasing, convex.
struct OrliczGauge {
  std::string name;
  std::function<double(double)> phi;

  double operator()(double t) const { return phi(t); }
};

namespace gauges {

inline OrliczGauge l1() {
  return {"L1", [](double t) { return t; }};
}

inline OrliczGauge lp(double p) {
  return {"L" + std::to_string(p), [p](double t) { return std::pow(t, p); }};
}

/// exp(L^2): e^{t^2} - 1.
inline OrliczGauge exp_l2() {
  return {"expL2", [](double t) { return std::expm1(t * t); }};
}

/// L (log L)^alpha: t (ln(e + t))^alpha.
inline OrliczGauge l_log_l(double alpha) {
  return {"LlogL^" + std::to_string(alpha),
          [alpha](double t) { return t * std::pow(std::log(std::numbers::e + t), alpha); }};
}

/// L log log L: t ln(ln(e^e + t)).
inline OrliczGauge l_loglog_l() {
  static const double ee = std::exp(std::numbers::e);
  return {"LloglogL", [](double t) { return t * std::log(std::log(ee + t)); }};
}

/// L log log L log log log L: t ln(ln(e^e + t)) ln(ln(ln(e^{e^e} + t))).
inline OrliczGauge l_loglog_logloglog_l() {
  static const double ee = std::exp(std::numbers::e);
  static const double eee = std::exp(ee);
  return {"LloglogLlogloglogL", [](double t) {
            return t * std::log(std::log(ee + t)) * std::log(std::log(std::log(eee + t)));
          }};
}

}  // namespace gauges

/// Checks phi(0) = 0, strict increase and midpoint convexity on a sample of points.
inline bool gauge_is_valid(const OrliczGauge& g, const std::vector<double>& points) {
  if (g(0.0) != 0.0) return false;
  std::vector<double> pts = points;
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i] > pts[i - 1] && !(g(pts[i]) > g(pts[i - 1]))) return false;
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double mid = g(0.5 * (pts[i] + pts[j]));
      const double chord = 0.5 * (g(pts[i]) + g(pts[j]));
      if (mid > chord * (1.0 + 1e-12) + 1e-300) return false;
    }
  }
  return true;
}

struct LuxemburgOptions {
  double rel_tol = 1e-9;
  int max_iterations = 200;
  int max_bracket_steps = 2000;
};

/// Luxemburg norm inf{c > 0 : mean phi(|f| / c) <= 1} by bracketing and bisection.
inline double orlicz_norm(const GridFunction& f, const OrliczGauge& gauge, LuxemburgOptions opt = {}) {
  std::vector<double> a(f.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    a[i] = std::abs(f[i]);
    sup = std::max(sup, a[i]);
  }
  if (sup == 0.0) return 0.0;

  const double inv_n = 1.0 / static_cast<double>(a.size());
  auto modular = [&](double c) {
    double acc = 0.0;
    for (double v : a) {
      acc += gauge(v / c);
      if (!std::isfinite(acc)) return std::numeric_limits<double>::infinity();
    }
    return acc * inv_n;
  };

  // Invariant: modular(lo) > 1 >= modular(hi).
  double hi = sup;
  int steps = 0;
  while (!(modular(hi) <= 1.0)) {
    hi *= 2.0;
    if (++steps > opt.max_bracket_steps || !std::isfinite(hi)) throw GaugeError("orlicz_norm: no upper bracket for " + gauge.name);
  }
  double lo = hi;
  steps = 0;
  do {
    lo *= 0.5;
    if (++steps > opt.max_bracket_steps || lo == 0.0) throw GaugeError("orlicz_norm: no lower bracket for " + gauge.name);
  } while (modular(lo) <= 1.0);
  hi = std::min(hi, 2.0 * lo);

  for (int it = 0; it < opt.max_iterations && (hi - lo) > opt.rel_tol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (modular(mid) <= 1.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace lactile
