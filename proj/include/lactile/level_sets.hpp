#pragma once

// Dyadic averages of |f|, the level collections I_k of maximal dyadic
// intervals with average above lambda 2^-k, the dyadic maximal function and
// the exceptional set F_bad = {M f > lambda / 2}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lactile/dyadic.hpp"
#include "lactile/error.hpp"
#include "lactile/grid.hpp"

namespace lactile {

/// Pyramid of sums of |f| over every dyadic interval, built bottom-up.
class DyadicSums {
 public:
  explicit DyadicSums(const GridFunction& f) : m_(f.scale()), sums_(static_cast<std::size_t>(f.scale()) + 1) {
    sums_[static_cast<std::size_t>(m_)].resize(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) sums_[static_cast<std::size_t>(m_)][i] = std::abs(f[i]);
    for (int l = m_ - 1; l >= 0; --l) {
      auto& cur = sums_[static_cast<std::size_t>(l)];
      const auto& fine = sums_[static_cast<std::size_t>(l) + 1];
      cur.resize(std::size_t{1} << l);
      for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = fine[2 * i] + fine[2 * i + 1];
    }
  }

  int scale() const { return m_; }
  double sum(int level, std::int64_t index) const {
    return sums_[static_cast<std::size_t>(level)][static_cast<std::size_t>(index)];
  }
  /// Mean of |f| over the interval; division by a power of two is exact.
  double mean(int level, std::int64_t index) const { return std::ldexp(sum(level, index), level - m_); }
  double mean(const DyadicInterval& I) const { return mean(I.level, I.index); }

 private:
  int m_;
  std::vector<std::vector<double>> sums_;
};

/// Per-sample sup over dyadic intervals containing x of the mean of |f|.
inline std::vector<double> dyadic_maximal(const DyadicSums& sums) {
  const int m = sums.scale();
  const std::size_t n = std::size_t{1} << m;
  std::vector<double> best(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double b = 0.0;
    for (int l = 0; l <= m; ++l) b = std::max(b, sums.mean(l, static_cast<std::int64_t>(i >> (m - l))));
    best[i] = b;
  }
  return best;
}

inline std::vector<double> dyadic_maximal(const GridFunction& f) { return dyadic_maximal(DyadicSums(f)); }

/// Pairwise disjoint dyadic space intervals on a 2^m grid, sorted by position.
class IntervalSet {
 public:
  IntervalSet() = default;
  IntervalSet(int m, std::vector<DyadicInterval> items) : m_(m), items_(std::move(items)) {
    std::sort(items_.begin(), items_.end(), [m](const auto& a, const auto& b) {
      return a.sample_begin(m) < b.sample_begin(m);
    });
  }

  std::span<const DyadicInterval> items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  /// The member containing Q (Q included), if any.
  std::optional<DyadicInterval> containing(const DyadicInterval& q) const {
    const auto qb = q.sample_begin(m_);
    auto it = std::upper_bound(items_.begin(), items_.end(), qb,
                               [this](std::size_t v, const DyadicInterval& d) { return v < d.sample_begin(m_); });
    if (it == items_.begin()) return std::nullopt;
    --it;
    if (it->contains(q)) return *it;
    return std::nullopt;
  }

  /// Members contained in Q (Q itself included).
  std::span<const DyadicInterval> inside(const DyadicInterval& q) const {
    const auto qb = q.sample_begin(m_);
    const auto qe = q.sample_end(m_);
    auto lo = std::lower_bound(items_.begin(), items_.end(), qb,
                               [this](const DyadicInterval& d, std::size_t v) { return d.sample_begin(m_) < v; });
    auto hi = std::lower_bound(lo, items_.end(), qe,
                               [this](const DyadicInterval& d, std::size_t v) { return d.sample_begin(m_) < v; });
    // A member starting inside Q is either inside Q or contains it; the latter only when it starts at qb.
    if (lo != hi && lo->level < q.level) return {};
    return {lo, hi};
  }

  /// Members strictly inside Q.
  bool has_proper_subinterval(const DyadicInterval& q) const {
    for (const auto& d : inside(q)) {
      if (d.level > q.level) return true;
    }
    return false;
  }

  bool intersects(const DyadicInterval& q) const { return containing(q).has_value() || !inside(q).empty(); }

  double measure() const {
    double t = 0.0;
    for (const auto& d : items_) t += d.length();
    return t;
  }

 private:
  int m_ = 0;
  std::vector<DyadicInterval> items_;
};

/// I_k for k = 0..k_max together with their unions.
struct LevelSets {
  double lambda = 0.0;
  int m = 0;
  std::vector<IntervalSet> levels;
  int k_max = 0;
  bool reaches_full = false;
  // first_level[i] = min{k : x_i in union of I_k}; k_max + 1 when never.
  std::vector<int> first_level;

  const IntervalSet& at(int k) const { return levels[static_cast<std::size_t>(k)]; }
  int count() const { return static_cast<int>(levels.size()); }
  bool in_union(int k, std::size_t i) const { return k >= 0 && first_level[i] <= k; }
  bool union_is_torus(int k) const {
    return k >= 0 && k < count() && at(k).size() == 1 && at(k).items()[0].level == 0;
  }
  double union_measure(int k) const { return k < 0 ? 0.0 : at(std::min(k, count() - 1)).measure(); }
};

/// Maximal dyadic intervals I with mean(|f|, I) > threshold.
inline std::vector<DyadicInterval> maximal_intervals_above(const DyadicSums& sums, double threshold) {
  const int m = sums.scale();
  std::vector<DyadicInterval> out;
  // Depth-first over the dyadic tree; stop descending at the first qualifying node.
  std::vector<DyadicInterval> stack{DyadicInterval::torus()};
  while (!stack.empty()) {
    const DyadicInterval I = stack.back();
    stack.pop_back();
    if (sums.mean(I) > threshold) {
      out.push_back(I);
    } else if (I.level < m && sums.sum(I.level, I.index) > 0.0) {
      stack.push_back(DyadicInterval::space(I.level + 1, 2 * I.index + 1));
      stack.push_back(DyadicInterval::space(I.level + 1, 2 * I.index));
    }
  }
  return out;
}

inline LevelSets level_intervals(const GridFunction& f, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw ConfigError("level_intervals: lambda must lie in (0, 1)");
  const int m = f.scale();
  const DyadicSums sums(f);
  LevelSets ls;
  ls.lambda = lambda;
  ls.m = m;
  for (int k = 0; k <= m; ++k) {
    ls.levels.emplace_back(m, maximal_intervals_above(sums, std::ldexp(lambda, -k)));
    ls.k_max = k;
    if (ls.union_is_torus(k)) {
      ls.reaches_full = true;
      break;
    }
  }
  const auto maxf = dyadic_maximal(sums);
  ls.first_level.assign(f.size(), ls.k_max + 1);
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (int k = 0; k <= ls.k_max; ++k) {
      if (maxf[i] > std::ldexp(lambda, -k)) {
        ls.first_level[i] = k;
        break;
      }
    }
  }
  return ls;
}

/// Sample mask of the union of D-fold dilations (about the center, torus
/// periodic) of the given intervals; D |I| >= 1 covers the whole torus.
inline std::vector<char> dilated_mask(int m, std::span<const DyadicInterval> intervals, std::int64_t factor) {
  const std::size_t n = std::size_t{1} << m;
  const auto nn = static_cast<std::int64_t>(n);
  // Difference array over the samples, one +1/-1 pair per (unwrapped) arc.
  std::vector<std::int64_t> diff(n + 1, 0);
  auto mark = [&](std::int64_t a, std::int64_t b) {
    ++diff[static_cast<std::size_t>(a)];
    --diff[static_cast<std::size_t>(b)];
  };
  for (const auto& c : intervals) {
    const SampleArc arc = dilation_samples(m, c, factor);
    if (arc.full) return std::vector<char>(n, 1);
    const std::int64_t a = ((arc.first % nn) + nn) % nn;
    const std::int64_t len = arc.last - arc.first;
    if (a + len <= nn) {
      mark(a, a + len);
    } else {
      mark(a, nn);
      mark(0, a + len - nn);
    }
  }
  std::vector<char> mask(n, 0);
  std::int64_t run = 0;
  for (std::size_t i = 0; i < n; ++i) {
    run += diff[i];
    mask[i] = run > 0 ? 1 : 0;
  }
  return mask;
}

struct BadSet {
  std::vector<char> mask;                 // {M f > lambda / 2}
  std::vector<DyadicInterval> components; // its maximal dyadic pieces
  std::int64_t dilation = 1000;
  std::vector<char> dilated;              // dilation * F_bad

  std::size_t count() const { return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1)); }
};

inline constexpr std::int64_t kBadSetDilation = 1000;

inline BadSet f_bad(const GridFunction& f, double lambda, std::int64_t dilation = kBadSetDilation) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw ConfigError("f_bad: lambda must lie in (0, 1)");
  const auto maxf = dyadic_maximal(f);
  BadSet bad;
  bad.dilation = dilation;
  bad.mask.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) bad.mask[i] = maxf[i] > 0.5 * lambda ? 1 : 0;
  bad.components = dyadic_components(f.scale(), bad.mask);
  bad.dilated = dilated_mask(f.scale(), bad.components, dilation);
  return bad;
}

}  // namespace lactile
