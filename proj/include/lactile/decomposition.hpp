#pragma once

// The (f, lambda)-lacunary classification of tiles: cluster tiles, the
// oscillating (P2) and non-oscillating (P1) families attached to each anchor
// interval of I_k, and the residual tiles.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lactile/dyadic.hpp"
#include "lactile/error.hpp"
#include "lactile/grid.hpp"
#include "lactile/level_sets.hpp"
#include "lactile/tiles.hpp"

namespace lactile {

inline constexpr int kStarPieces = 14;
inline constexpr int kMaxMultiplicity = 14;

/// The 14 dyadic intervals of length |I_P| making up
/// I_{P*} = [c - 17/2 |I|, c - 3/2 |I|] u [c + 3/2 |I|, c + 17/2 |I|]:
/// indices idx-8..idx-2 then idx+2..idx+8, mod 2^k.
inline std::array<DyadicInterval, kStarPieces> i_star(const Tile& p) {
  std::array<DyadicInterval, kStarPieces> out;
  const int k = p.level();
  const auto idx = p.space.index;
  std::size_t r = 0;
  for (std::int64_t d = -8; d <= -2; ++d) out[r++] = DyadicInterval::space(k, idx + d);
  for (std::int64_t d = 2; d <= 8; ++d) out[r++] = DyadicInterval::space(k, idx + d);
  return out;
}

/// 0 in b * omega (dilation about the center, half-open), b a positive integer.
inline bool dilation_contains_zero(const DyadicInterval& omega, std::int64_t b) {
  // Scaled by 2 / |omega|: center 2j + 1, half-width b.
  const std::int64_t c = 2 * omega.index + 1;
  return c - b <= 0 && 0 < c + b;
}

/// 2 omega_1 and 2 omega_2 intersect (half-open dilations about the centers).
inline bool doubled_frequencies_meet(const DyadicInterval& a, const DyadicInterval& b) {
  // Twice the endpoints of 2 omega = [(j - 1/2) 2^k, (j + 3/2) 2^k).
  auto lo = [](const DyadicInterval& w) { return (2 * w.index - 1) << w.level; };
  auto hi = [](const DyadicInterval& w) { return (2 * w.index + 3) << w.level; };
  return lo(a) < hi(b) && lo(b) < hi(a);
}

inline bool is_cluster(const Tile& p, std::int64_t alpha) { return dilation_contains_zero(p.omega, 10 * alpha); }

enum class LabelKind { Cluster, P2, P1, Residual };

inline const char* to_string(LabelKind k) {
  switch (k) {
    case LabelKind::Cluster: return "cluster";
    case LabelKind::P2: return "P2";
    case LabelKind::P1: return "P1";
    case LabelKind::Residual: return "residual";
  }
  return "?";
}

/// One membership of a tile. For P2/P1, `k` is the level index and `anchor`
/// the space interval of P_O (its frequency interval is [0, |anchor|^-1));
/// for Residual, `k` is l and `r` the piece of I_{P*} (-1 when the whole
/// I_{P*} qualifies, the l = 0 case). Pieces are numbered 0..13.
struct Label {
  LabelKind kind = LabelKind::Cluster;
  int k = -1;
  DyadicInterval anchor{};
  int r = -1;

  friend auto operator<=>(const Label&, const Label&) = default;
};

struct Classification {
  int m = 0;
  double lambda = 0.0;
  std::int64_t alpha = 2;
  std::vector<Tile> tiles;
  std::vector<std::vector<Label>> labels;

  /// #{k : tile in P_k^{1,2}(P_O) for some anchor}.
  int multiplicity(std::size_t t) const {
    std::set<int> ks;
    for (const auto& l : labels[t]) {
      if (l.kind == LabelKind::P1 || l.kind == LabelKind::P2) ks.insert(l.k);
    }
    return static_cast<int>(ks.size());
  }

  bool has(std::size_t t, LabelKind kind) const {
    return std::any_of(labels[t].begin(), labels[t].end(), [kind](const Label& l) { return l.kind == kind; });
  }

  int max_multiplicity() const {
    int best = 0;
    for (std::size_t t = 0; t < tiles.size(); ++t) best = std::max(best, multiplicity(t));
    return best;
  }

  std::size_t uncovered() const {
    return static_cast<std::size_t>(
        std::count_if(labels.begin(), labels.end(), [](const auto& v) { return v.empty(); }));
  }
};

struct ClassifyOptions {
  bool enforce_invariants = true;
};

/// Labels every tile from the raw definitions:
///  Cluster   0 in 10 alpha omega_P;
///  P2 / P1   for k with I_k not the whole torus, an anchor J in I_k and a
///            piece Q of I_{P*} with J inside Q such that every member of
///            I_{k+1} meeting Q contains Q; P2 when 2 omega_P misses
///            2 [0, |J|^-1), P1 otherwise; only for non-cluster tiles;
///  Residual  l >= 1: a piece Q inside a member of I_l and disjoint from the
///            union of I_{l-1}; l = 0: I_{P*} inside the dilated F_bad, or f
///            vanishing on I_{P*}.
inline Classification classify(const std::vector<Tile>& tiles, const GridFunction& f, const LevelSets& ls,
                               const BadSet& bad, std::int64_t alpha, ClassifyOptions opt = {}) {
  const int m = f.scale();
  detail::require(ls.m == m, "classify: level sets computed on a different grid");
  const DyadicSums sums(f);
  std::vector<std::size_t> dilated_prefix(f.size() + 1, 0);
  for (std::size_t i = 0; i < f.size(); ++i) dilated_prefix[i + 1] = dilated_prefix[i] + (bad.dilated[i] ? 1 : 0);
  auto inside_dilated = [&](const DyadicInterval& q) {
    const auto b = q.sample_begin(m);
    const auto e = q.sample_end(m);
    return dilated_prefix[e] - dilated_prefix[b] == e - b;
  };

  Classification out;
  out.m = m;
  out.lambda = ls.lambda;
  out.alpha = alpha;
  out.tiles = tiles;
  out.labels.resize(tiles.size());

  for (std::size_t t = 0; t < tiles.size(); ++t) {
    const Tile& p = tiles[t];
    auto& labels = out.labels[t];
    const auto star = i_star(p);
    const bool cluster = is_cluster(p, alpha);
    if (cluster) labels.push_back({LabelKind::Cluster, -1, {}, -1});

    if (!cluster) {
      for (int k = 0; k < ls.count(); ++k) {
        if (ls.union_is_torus(k)) break;
        if (k + 1 >= ls.count()) break;  // I_{k+1} beyond the grid cap
        const IntervalSet& cur = ls.at(k);
        const IntervalSet& next = ls.at(k + 1);
        for (int r = 0; r < kStarPieces; ++r) {
          const DyadicInterval& q = star[static_cast<std::size_t>(r)];
          if (next.has_proper_subinterval(q)) continue;
          for (const auto& anchor : cur.inside(q)) {
            const DyadicInterval anchor_omega = DyadicInterval::frequency(anchor.level, 0);
            const bool meet = doubled_frequencies_meet(p.omega, anchor_omega);
            labels.push_back({meet ? LabelKind::P1 : LabelKind::P2, k, anchor, r});
          }
        }
      }
    }

    bool all_dilated = true;
    bool f_vanishes = true;
    for (const auto& q : star) {
      all_dilated = all_dilated && inside_dilated(q);
      f_vanishes = f_vanishes && sums.sum(q.level, q.index) == 0.0;
    }
    if (all_dilated || f_vanishes) labels.push_back({LabelKind::Residual, 0, {}, -1});
    for (int l = 1; l < ls.count(); ++l) {
      for (int r = 0; r < kStarPieces; ++r) {
        const DyadicInterval& q = star[static_cast<std::size_t>(r)];
        if (ls.at(l).containing(q) && !ls.at(l - 1).intersects(q)) {
          labels.push_back({LabelKind::Residual, l, {}, r});
        }
      }
    }

    if (opt.enforce_invariants) {
      if (labels.empty()) throw InvariantViolation("classify: tile " + p.str() + " carries no label");
      if (out.multiplicity(t) > kMaxMultiplicity) {
        throw InvariantViolation("classify: tile " + p.str() + " exceeds multiplicity 14");
      }
    }
  }
  return out;
}

inline Classification classify(const std::vector<Tile>& tiles, const GridFunction& f, double lambda,
                               const LacunarySequence& seq, ClassifyOptions opt = {}) {
  return classify(tiles, f, level_intervals(f, lambda), f_bad(f, lambda), seq.alpha(), opt);
}

/// Tiles of P_k^2(P_O) and P_k^1(P_O) for one (k, anchor), as indices into
/// Classification::tiles, deduplicated over pieces r.
struct AnchorFamily {
  int k = 0;
  DyadicInterval anchor;
  std::vector<std::size_t> oscillating;      // P2
  std::vector<std::size_t> non_oscillating;  // P1
};

inline std::vector<AnchorFamily> anchor_families(const Classification& c) {
  std::map<std::pair<int, DyadicInterval>, AnchorFamily> groups;
  for (std::size_t t = 0; t < c.tiles.size(); ++t) {
    for (const auto& l : c.labels[t]) {
      if (l.kind != LabelKind::P1 && l.kind != LabelKind::P2) continue;
      auto& fam = groups[{l.k, l.anchor}];
      fam.k = l.k;
      fam.anchor = l.anchor;
      auto& dst = l.kind == LabelKind::P2 ? fam.oscillating : fam.non_oscillating;
      if (dst.empty() || dst.back() != t) dst.push_back(t);
    }
  }
  std::vector<AnchorFamily> out;
  out.reserve(groups.size());
  for (auto& [key, fam] : groups) out.push_back(std::move(fam));
  return out;
}

inline std::vector<Tile> family_tiles(const Classification& c, const std::vector<std::size_t>& idx) {
  std::vector<Tile> out;
  out.reserve(idx.size());
  for (auto t : idx) out.push_back(c.tiles[t]);
  return out;
}

/// max over P1 families and their maximal trees of c_l |I_{P_O}|.
inline double max_tree_oscillation(const Classification& c) {
  double best = 0.0;
  for (const auto& fam : anchor_families(c)) {
    for (const auto& tree : decompose_trees(family_tiles(c, fam.non_oscillating))) {
      best = std::max(best, static_cast<double>(tree.freq) * fam.anchor.length());
    }
  }
  return best;
}

}  // namespace lactile
