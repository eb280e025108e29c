#pragma once

// Iterated Vitali selection of dyadic space intervals with disjoint
// 100-fold dilations, and the measure inequalities it is built for.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <map>
#include <utility>
#include <span>
#include <string>
#include <vector>

#include "lactile/dyadic.hpp"
#include "lactile/error.hpp"
#include "lactile/level_sets.hpp"

namespace lactile {

inline constexpr std::int64_t kCoverDilation = 100;
inline constexpr double kRoundRatioFloor = 1.0 / 500.0;

/// Half-open arc [start, start + len) of the torus in units of 2^-res;
/// len == 2^res is the whole torus.
struct TorusArc {
  std::int64_t start = 0;
  std::int64_t len = 0;
};

namespace detail {

/// Units 2^-res with res = 1 + the finest level, so every dilation center is integral.
inline int arc_resolution(std::span<const DyadicInterval> intervals) {
  int res = 1;
  for (const auto& j : intervals) {
    require(j.side == Side::Space && j.level >= 0 && j.level <= 60, "greedy_cover: need space intervals of level <= 60");
    res = std::max(res, j.level + 1);
  }
  return res;
}

inline TorusArc dilated_arc(const DyadicInterval& j, std::int64_t factor, int res) {
  const std::int64_t unit = std::int64_t{1} << res;
  const std::int64_t len = std::int64_t{1} << (res - j.level);
  if (len >= (unit + factor - 1) / factor) return {0, unit};  // factor |J| >= 1
  const std::int64_t center = j.index * len + len / 2;
  const std::int64_t start = center - factor * (len / 2);
  return {((start % unit) + unit) % unit, factor * len};
}

/// Selected arcs keyed by start; pairwise disjoint by construction.
class ArcSet {
 public:
  explicit ArcSet(std::int64_t unit) : unit_(unit) {}

  bool meets(const TorusArc& a) const {
    if (arcs_.empty()) return false;
    if (a.len >= unit_) return true;
    // Some selected arc contains a.start: it is the cyclic predecessor-or-equal.
    auto it = arcs_.upper_bound(a.start);
    const auto& pred = it == arcs_.begin() ? *std::prev(arcs_.end()) : *std::prev(it);
    if (mod(a.start - pred.first) < pred.second) return true;
    // Some selected arc starts inside a.
    auto nxt = arcs_.lower_bound(a.start);
    const std::int64_t end = a.start + a.len;
    if (nxt != arcs_.end() && nxt->first < end) return true;
    return end > unit_ && arcs_.begin()->first < end - unit_;
  }

  void insert(const TorusArc& a) { arcs_.emplace(a.start, a.len); }

 private:
  std::int64_t mod(std::int64_t v) const { return ((v % unit_) + unit_) % unit_; }
  std::int64_t unit_;
  std::map<std::int64_t, std::int64_t> arcs_;
};

/// Two arcs of the same resolution meet.
inline bool arcs_meet(const TorusArc& a, const TorusArc& b, std::int64_t unit) {
  if (a.len >= unit || b.len >= unit) return a.len > 0 && b.len > 0;
  auto mod = [unit](std::int64_t v) { return ((v % unit) + unit) % unit; };
  return mod(b.start - a.start) < a.len || mod(a.start - b.start) < b.len;
}

}  // namespace detail

struct CoverRounds {
  std::vector<DyadicInterval> input;
  std::vector<std::vector<std::size_t>> rounds;  // indices into input, in selection order
  std::vector<std::size_t> round_of;             // round of each input interval
  int resolution = 1;

  std::size_t size() const { return rounds.size(); }

  std::vector<DyadicInterval> round(std::size_t r) const {
    std::vector<DyadicInterval> out;
    for (auto i : rounds[r]) out.push_back(input[i]);
    return out;
  }
};

/// Each round scans the remaining intervals from largest to smallest
/// (ties: leftmost) and selects those whose 100-dilation misses every
/// dilation already selected in the round; the rest pass to the next round.
inline CoverRounds greedy_cover(std::vector<DyadicInterval> intervals) {
  CoverRounds out;
  out.resolution = detail::arc_resolution(intervals);
  out.input = std::move(intervals);
  out.round_of.assign(out.input.size(), 0);
  const int res = out.resolution;
  const std::int64_t unit = std::int64_t{1} << res;

  std::vector<std::size_t> pool(out.input.size());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  std::stable_sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = out.input[a];
    const auto& y = out.input[b];
    if (x.level != y.level) return x.level < y.level;
    return (x.index << (res - x.level)) < (y.index << (res - y.level));
  });

  while (!pool.empty()) {
    detail::ArcSet selected(unit);
    std::vector<std::size_t> chosen;
    std::vector<std::size_t> deferred;
    for (auto i : pool) {
      const TorusArc arc = detail::dilated_arc(out.input[i], kCoverDilation, res);
      if (selected.meets(arc)) {
        deferred.push_back(i);
      } else {
        selected.insert(arc);
        chosen.push_back(i);
        out.round_of[i] = out.rounds.size();
      }
    }
    out.rounds.push_back(std::move(chosen));
    pool = std::move(deferred);
  }
  return out;
}

/// Measure of a finite union of dyadic space intervals.
inline double union_measure(std::span<const DyadicInterval> intervals) {
  if (intervals.empty()) return 0.0;
  const int res = detail::arc_resolution(intervals) - 1;
  std::vector<std::pair<std::int64_t, int>> v;  // (left end in units 2^-res, level)
  v.reserve(intervals.size());
  for (const auto& j : intervals) v.emplace_back(j.index << (res - j.level), j.level);
  std::sort(v.begin(), v.end());
  // Dyadic intervals are nested or disjoint: skip any that start before the covered end.
  std::int64_t covered_end = 0;
  double total = 0.0;
  for (const auto& [start, level] : v) {
    if (start < covered_end) continue;
    covered_end = start + (std::int64_t{1} << (res - level));
    total += std::ldexp(1.0, -level);
  }
  return total;
}

struct RoundReport {
  std::vector<double> round_measure;  // |B_r|
  std::vector<double> ratio;          // |B_l| / sum_{r >= l} |B_r|
  double min_ratio = 1.0;
};

inline RoundReport round_ratios(const CoverRounds& c) {
  RoundReport rep;
  for (std::size_t r = 0; r < c.size(); ++r) {
    const auto members = c.round(r);
    rep.round_measure.push_back(union_measure(members));
  }
  rep.ratio.assign(c.size(), 1.0);
  double tail = 0.0;
  for (std::size_t r = c.size(); r-- > 0;) {
    tail += rep.round_measure[r];
    rep.ratio[r] = tail > 0.0 ? rep.round_measure[r] / tail : 1.0;
    rep.min_ratio = std::min(rep.min_ratio, rep.ratio[r]);
  }
  return rep;
}

/// Minimum round ratio; throws when it drops below 1/500.
inline RoundReport check_round_inequality(const CoverRounds& c) {
  RoundReport rep = round_ratios(c);
  if (rep.min_ratio < kRoundRatioFloor) {
    throw InvariantViolation("check_round_inequality: round ratio " + std::to_string(rep.min_ratio) +
                             " below 1/500");
  }
  return rep;
}

/// Partition of the input and disjointness of dilations within each round.
inline bool rounds_well_formed(const CoverRounds& c) {
  std::vector<int> seen(c.input.size(), 0);
  const std::int64_t unit = std::int64_t{1} << c.resolution;
  for (std::size_t r = 0; r < c.size(); ++r) {
    const auto& idx = c.rounds[r];
    if (idx.empty()) return false;
    for (auto i : idx) {
      if (i >= seen.size() || c.round_of[i] != r) return false;
      ++seen[i];
    }
    for (std::size_t a = 0; a < idx.size(); ++a) {
      const auto da = detail::dilated_arc(c.input[idx[a]], kCoverDilation, c.resolution);
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        const auto db = detail::dilated_arc(c.input[idx[b]], kCoverDilation, c.resolution);
        if (detail::arcs_meet(da, db, unit)) return false;
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

/// sum_J |J|^{1/2} |100J n G|^{1/2} / (|U J|^{1/2} |U 100J n G|^{1/2}) on a
/// 2^m grid, G a sample mask; 0 when G misses every dilation.
inline double msum_ratio(std::span<const DyadicInterval> intervals, const std::vector<char>& g_mask) {
  const std::size_t n = g_mask.size();
  detail::require(n >= 2 && (n & (n - 1)) == 0, "msum_ratio: mask size must be a power of two");
  const int m = static_cast<int>(std::lround(std::log2(static_cast<double>(n))));
  const auto nn = static_cast<std::int64_t>(n);
  std::vector<std::int64_t> prefix(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + (g_mask[i] ? 1 : 0);
  auto count = [&](std::int64_t a, std::int64_t b) {  // samples of G in [a, b), cyclic, b - a <= n
    auto wrap = [&](std::int64_t v) { return ((v % nn) + nn) % nn; };
    const std::int64_t len = b - a;
    const std::int64_t s = wrap(a);
    if (s + len <= nn) return prefix[static_cast<std::size_t>(s + len)] - prefix[static_cast<std::size_t>(s)];
    return (prefix[n] - prefix[static_cast<std::size_t>(s)]) + prefix[static_cast<std::size_t>(s + len - nn)];
  };

  double lhs = 0.0;
  for (const auto& j : intervals) {
    detail::require(j.side == Side::Space && j.level <= m, "msum_ratio: interval finer than the grid");
    const SampleArc arc = dilation_samples(m, j, kCoverDilation);
    const auto hits = arc.full ? prefix[n] : count(arc.first, arc.last);
    lhs += std::sqrt(j.length()) * std::sqrt(static_cast<double>(hits) / static_cast<double>(n));
  }
  const auto dil = dilated_mask(m, intervals, kCoverDilation);
  std::int64_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) hits += (dil[i] && g_mask[i]) ? 1 : 0;
  if (hits == 0) return 0.0;
  const double rhs = std::sqrt(union_measure(intervals)) * std::sqrt(static_cast<double>(hits) / static_cast<double>(n));
  return lhs / rhs;
}

}  // namespace lactile
