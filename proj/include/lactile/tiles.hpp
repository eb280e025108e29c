#pragma once

// Time-frequency tiles P = [omega, I] with |omega| |I| = 1, their sets
// E(P) = {x in I : N(x) in omega}, masses, and tree decompositions.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lactile/dyadic.hpp"
#include "lactile/error.hpp"
#include "lactile/grid.hpp"

namespace lactile {

/// Tiles live at levels kTileMargin <= k <= m - kTileMargin.
inline constexpr int kTileMargin = 5;
inline constexpr int kMinTileGrid = 2 * kTileMargin;

inline int min_tile_level(int /*m*/) { return kTileMargin; }
inline int max_tile_level(int m) { return m - kTileMargin; }

struct Tile {
  DyadicInterval omega;   // frequency side, level k
  DyadicInterval space;   // space side, level k

  static Tile make(int level, std::int64_t space_index, std::int64_t freq_index) {
    return {DyadicInterval::frequency(level, freq_index), DyadicInterval::space(level, space_index)};
  }

  int level() const { return space.level; }

  /// Deterministic order: (level, space index, frequency index).
  friend std::strong_ordering operator<=>(const Tile& a, const Tile& b) {
    if (auto c = a.space.level <=> b.space.level; c != 0) return c;
    if (auto c = a.space.index <=> b.space.index; c != 0) return c;
    return a.omega.index <=> b.omega.index;
  }
  friend bool operator==(const Tile& a, const Tile& b) { return (a <=> b) == 0; }

  std::string str() const { return "[" + omega.str() + "," + space.str() + "]"; }
};

/// Number of frequency intervals of length 2^k inside [0, N/2).
inline std::int64_t frequency_slots(int m, int k) { return std::int64_t{1} << (m - 1 - k); }

/// Position of a tile inside the level-major enumeration of all_tiles.
inline std::size_t tile_ordinal(int m, const Tile& p) {
  const std::size_t per_level = std::size_t{1} << (m - 1);
  const auto k = static_cast<std::size_t>(p.level() - min_tile_level(m));
  return k * per_level + static_cast<std::size_t>(p.space.index * frequency_slots(m, p.level()) + p.omega.index);
}

/// Every tile with level in [5, m-5] and omega inside [0, N/2).
inline std::vector<Tile> all_tiles(int m) {
  detail::require(m >= kMinTileGrid, "all_tiles: grid exponent must be >= " + std::to_string(kMinTileGrid));
  std::vector<Tile> out;
  out.reserve(static_cast<std::size_t>(max_tile_level(m) - min_tile_level(m) + 1) << (m - 1));
  for (int k = min_tile_level(m); k <= max_tile_level(m); ++k) {
    const std::int64_t spaces = std::int64_t{1} << k;
    const std::int64_t freqs = frequency_slots(m, k);
    for (std::int64_t s = 0; s < spaces; ++s) {
      for (std::int64_t w = 0; w < freqs; ++w) out.push_back(Tile::make(k, s, w));
    }
  }
  return out;
}

inline void check_selector(const FrequencySelector& sel) {
  const auto half = std::int64_t{1} << (sel.m - 1);
  for (auto n : sel.freq) {
    detail::require(n >= 0 && n < half, "FrequencySelector: value outside [0, N/2)");
  }
}

/// The tile at level k that contains (x_i, N(x_i)).
inline Tile tile_of_sample(int m, int k, std::size_t i, const FrequencySelector& sel) {
  return Tile::make(k, static_cast<std::int64_t>(i >> (m - k)), sel[i] >> k);
}

/// E(P) as sample indices, increasing.
inline std::vector<std::size_t> e_set(const Tile& p, const FrequencySelector& sel) {
  const int m = sel.m;
  std::vector<std::size_t> out;
  for (std::size_t i = p.space.sample_begin(m); i < p.space.sample_end(m); ++i) {
    if (p.omega.contains_frequency(sel[i])) out.push_back(i);
  }
  return out;
}

/// A(P) = |E(P)| / |I_P|.
inline double mass(const Tile& p, const FrequencySelector& sel) {
  return static_cast<double>(e_set(p, sel).size()) / static_cast<double>(p.space.sample_count(sel.m));
}

/// Bucket n >= 0 holds tiles with 2^{-n-1} < A(P) <= 2^{-n}; zero mass goes to `null_bucket`.
struct MassPartition {
  std::map<int, std::vector<Tile>> buckets;
  std::vector<Tile> null_bucket;

  std::size_t total() const {
    std::size_t t = null_bucket.size();
    for (const auto& [n, v] : buckets) t += v.size();
    return t;
  }
};

/// Mass bucket of |E| / len from integers: the n with count 2^n <= len < count 2^{n+1}, or -1 when count = 0.
inline int mass_bucket(std::size_t count, std::size_t len) {
  if (count == 0) return -1;
  int n = 0;
  while ((count << (n + 1)) <= len) ++n;
  return n;
}

inline MassPartition mass_partition(const std::vector<Tile>& tiles, const FrequencySelector& sel) {
  MassPartition out;
  for (const auto& p : tiles) {
    const int n = mass_bucket(e_set(p, sel).size(), p.space.sample_count(sel.m));
    if (n < 0) {
      out.null_bucket.push_back(p);
    } else {
      out.buckets[n].push_back(p);
    }
  }
  return out;
}

/// Tiles whose frequency intervals all contain `freq`.
struct Tree {
  std::int64_t freq = 0;
  std::vector<Tile> tiles;
  DyadicInterval top;

  bool well_formed() const {
    return std::all_of(tiles.begin(), tiles.end(), [&](const Tile& p) { return p.omega.contains_frequency(freq); });
  }
};

/// Greedy maximal trees: take the unassigned tile with the largest |I|
/// (ties: lowest frequency index, then lowest space index), use the left end
/// of its omega as the tree frequency, and absorb every unassigned tile whose
/// omega contains it.
inline std::vector<Tree> decompose_trees(std::vector<Tile> family) {
  std::sort(family.begin(), family.end(), [](const Tile& a, const Tile& b) {
    if (a.level() != b.level()) return a.level() < b.level();
    if (a.omega.index != b.omega.index) return a.omega.index < b.omega.index;
    return a.space.index < b.space.index;
  });
  family.erase(std::unique(family.begin(), family.end()), family.end());
  std::vector<char> used(family.size(), 0);
  std::vector<Tree> trees;
  for (std::size_t root = 0; root < family.size(); ++root) {
    if (used[root]) continue;
    Tree t;
    t.freq = family[root].omega.freq_lo();
    t.top = family[root].space;
    for (std::size_t j = root; j < family.size(); ++j) {
      if (!used[j] && family[j].omega.contains_frequency(t.freq)) {
        used[j] = 1;
        t.tiles.push_back(family[j]);
      }
    }
    trees.push_back(std::move(t));
  }
  return trees;
}

}  // namespace lactile
