#pragma once

// Exact dyadic intervals on the unit torus (space) and on the nonnegative
// integer frequency axis.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lactile/error.hpp"

namespace lactile {

enum class Side { Space, Frequency };

inline const char* to_string(Side s) { return s == Side::Space ? "space" : "frequency"; }

/// Space:     [index * 2^-level, (index + 1) * 2^-level), index taken mod 2^level.
/// Frequency: [index * 2^level, (index + 1) * 2^level) in integer frequency units.
struct DyadicInterval {
  Side side = Side::Space;
  int level = 0;
  std::int64_t index = 0;

  static DyadicInterval space(int level, std::int64_t index) {
    detail::require(level >= 0 && level <= 62, "DyadicInterval: level out of range");
    const std::int64_t count = std::int64_t{1} << level;
    return {Side::Space, level, ((index % count) + count) % count};
  }

  static DyadicInterval frequency(int level, std::int64_t index) {
    detail::require(level >= 0 && level <= 62, "DyadicInterval: level out of range");
    detail::require(index >= 0, "DyadicInterval: negative frequency index");
    return {Side::Frequency, level, index};
  }

  static DyadicInterval torus() { return space(0, 0); }

  /// Length |I| (space) or |omega| (frequency).
  double length() const {
    return side == Side::Space ? std::ldexp(1.0, -level) : std::ldexp(1.0, level);
  }

  // Frequency endpoints [lo, hi).
  std::int64_t freq_lo() const { return index << level; }
  std::int64_t freq_hi() const { return (index + 1) << level; }
  bool contains_frequency(std::int64_t n) const { return n >= freq_lo() && n < freq_hi(); }

  // Space sample range [begin, end) on the 2^m grid, requires level <= m.
  std::size_t sample_begin(int m) const { return static_cast<std::size_t>(index) << (m - level); }
  std::size_t sample_end(int m) const { return static_cast<std::size_t>(index + 1) << (m - level); }
  std::size_t sample_count(int m) const { return std::size_t{1} << (m - level); }
  bool contains_sample(int m, std::size_t i) const {
    return level <= m && (static_cast<std::int64_t>(i >> (m - level)) == index);
  }

  DyadicInterval parent() const {
    detail::require(level > 0 || side == Side::Frequency, "DyadicInterval: the torus has no parent");
    return side == Side::Space ? space(level - 1, index >> 1) : frequency(level + 1, index >> 1);
  }

  /// Set containment (same side).
  bool contains(const DyadicInterval& o) const {
    if (o.side != side) return false;
    if (side == Side::Space) return o.level >= level && (o.index >> (o.level - level)) == index;
    return o.level <= level && (o.index >> (level - o.level)) == index;
  }

  bool intersects(const DyadicInterval& o) const { return contains(o) || o.contains(*this); }

  std::string str() const {
    return std::string(to_string(side)) + "(" + std::to_string(level) + "," + std::to_string(index) + ")";
  }

  friend auto operator<=>(const DyadicInterval&, const DyadicInterval&) = default;
};

/// Samples s (mod N) of the b-fold dilation of a space interval about its
/// center, as [first, last); `full` when b |I| >= 1.
struct SampleArc {
  std::int64_t first = 0;
  std::int64_t last = 0;
  bool full = false;
};

inline SampleArc dilation_samples(int m, const DyadicInterval& I, std::int64_t factor) {
  const auto n = std::int64_t{1} << m;
  const auto len = static_cast<std::int64_t>(I.sample_count(m));
  if (factor * len >= n) return {0, n, true};
  // Doubled coordinates: samples s with 2s in [2b + L - bL, 2b + L + bL).
  const auto b = static_cast<std::int64_t>(I.sample_begin(m));
  const std::int64_t lo2 = 2 * b + len - factor * len;
  const std::int64_t hi2 = 2 * b + len + factor * len;
  auto ceil_half = [](std::int64_t v) { return v >= 0 ? (v + 1) / 2 : -((-v) / 2); };
  return {ceil_half(lo2), ceil_half(hi2), false};
}

/// Maximal dyadic space intervals whose samples all lie in `mask` (grid 2^m).
inline std::vector<DyadicInterval> dyadic_components(int m, const std::vector<char>& mask) {
  std::vector<DyadicInterval> out;
  const std::size_t n = mask.size();
  std::size_t i = 0;
  while (i < n) {
    if (!mask[i]) {
      ++i;
      continue;
    }
    // Largest aligned block starting at i fully inside the mask.
    int level = m;
    while (level > 0) {
      const std::size_t len = std::size_t{1} << (m - level + 1);
      if (i % len != 0 || i + len > n) break;
      bool full = true;
      for (std::size_t s = i; s < i + len && full; ++s) full = mask[s] != 0;
      if (!full) break;
      --level;
    }
    out.push_back(DyadicInterval::space(level, static_cast<std::int64_t>(i >> (m - level))));
    i += std::size_t{1} << (m - level);
  }
  return out;
}

}  // namespace lactile
