#pragma once

// The grouped dual terms that bound int f sum_P T_P*(g):
//   cluster   || sum_{P cluster} T_P* g ||
//   P2        || sum_k sum_{I_O in I_k} 1_{I_O} T^{P2_k(I_O)*} g ||
//   P1        || sum_k sum_{I_O in I_k} 1_{I_O} T^{P1_k(I_O)*} g ||
//   residual  sum_k 2^-k lambda int_{union I_k} |T_k* g|
// the first three in L^1(|f| dx).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <set>
#include <utility>
#include <vector>

#include "lactile/covering.hpp"
#include "lactile/decomposition.hpp"
#include "lactile/grid.hpp"
#include "lactile/level_sets.hpp"
#include "lactile/operators.hpp"

namespace lactile::harness {

struct GroupMasses {
  double cluster = 0.0;
  double p2 = 0.0;
  double p1 = 0.0;
  double residual = 0.0;
};

/// Pointwise group sums before integration; residual holds sum_k T_k* g on the shells.
struct GroupFields {
  std::vector<Complex> cluster, p2, p1, residual;
};

inline GroupFields group_fields(const TileOperators& ops, const Classification& cls, const LevelSets& ls,
                                const GridFunction& g, const FrequencySelector& sel) {
  const std::size_t n = ops.size();
  const int m = ops.scale();
  GroupFields out{std::vector<Complex>(n), std::vector<Complex>(n), std::vector<Complex>(n), std::vector<Complex>(n)};
  std::vector<Complex> scratch(n);
  for (std::size_t t = 0; t < cls.tiles.size(); ++t) {
    const Tile& p = cls.tiles[t];
    const auto star = i_star(p);
    std::array<int, kStarPieces> shell{};
    bool any_shell = false;
    for (int r = 0; r < kStarPieces; ++r) {
      shell[static_cast<std::size_t>(r)] = TileOperators::shell_level(ls, star[static_cast<std::size_t>(r)]);
      any_shell = any_shell || shell[static_cast<std::size_t>(r)] >= 0;
    }
    std::set<std::pair<int, DyadicInterval>> p2_anchors, p1_anchors;
    bool cluster = false;
    for (const auto& l : cls.labels[t]) {
      if (l.kind == LabelKind::Cluster) cluster = true;
      if (l.kind == LabelKind::P2) p2_anchors.insert({l.k, l.anchor});
      if (l.kind == LabelKind::P1) p1_anchors.insert({l.k, l.anchor});
    }
    if (!cluster && !any_shell && p2_anchors.empty() && p1_anchors.empty()) continue;

    ops.accumulate_T_P_star(g, p, sel, scratch);
    auto add_range = [&](std::vector<Complex>& dst, const DyadicInterval& I) {
      for (auto y = I.sample_begin(m); y < I.sample_end(m); ++y) dst[y] += scratch[y];
    };
    for (int r = 0; r < kStarPieces; ++r) {
      const auto& q = star[static_cast<std::size_t>(r)];
      if (cluster) add_range(out.cluster, q);
      if (shell[static_cast<std::size_t>(r)] >= 0) add_range(out.residual, q);
    }
    for (const auto& [k, anchor] : p2_anchors) add_range(out.p2, anchor);
    for (const auto& [k, anchor] : p1_anchors) add_range(out.p1, anchor);
    for (const auto& q : star) {
      for (auto y = q.sample_begin(m); y < q.sample_end(m); ++y) scratch[y] = Complex{};
    }
  }
  return out;
}

inline GroupMasses group_masses(const TileOperators& ops, const Classification& cls, const LevelSets& ls,
                                const GridFunction& f, const GridFunction& g, const FrequencySelector& sel) {
  const GroupFields h = group_fields(ops, cls, ls, g, sel);
  const double inv_n = 1.0 / static_cast<double>(ops.size());
  GroupMasses out;
  for (std::size_t y = 0; y < ops.size(); ++y) {
    const double w = std::abs(f[y]);
    out.cluster += w * std::abs(h.cluster[y]);
    out.p2 += w * std::abs(h.p2[y]);
    out.p1 += w * std::abs(h.p1[y]);
    const int k = ls.first_level[y];
    if (k <= ls.k_max) out.residual += std::ldexp(ls.lambda, -k) * std::abs(h.residual[y]);
  }
  out.cluster *= inv_n;
  out.p2 *= inv_n;
  out.p1 *= inv_n;
  out.residual *= inv_n;
  return out;
}

/// max over k of msum_ratio(I_{k+1}, G).
inline double max_msum_ratio(const LevelSets& ls, const std::vector<char>& g_mask) {
  double best = 0.0;
  for (int k = 0; k + 1 < ls.count(); ++k) {
    best = std::max(best, msum_ratio(ls.at(k + 1).items(), g_mask));
  }
  return best;
}

/// Largest tree-cut ratio over up to `limit` oscillating families, spread evenly.
inline double lemma1_max_ratio(const TileOperators& ops, const Classification& cls, const GridFunction& g,
                               const FrequencySelector& sel, int limit) {
  std::vector<AnchorFamily> fams;
  for (auto& fam : anchor_families(cls)) {
    if (!fam.oscillating.empty()) fams.push_back(std::move(fam));
  }
  if (fams.empty() || limit <= 0) return 0.0;
  const std::size_t take = std::min<std::size_t>(fams.size(), static_cast<std::size_t>(limit));
  double best = 0.0;
  for (std::size_t i = 0; i < take; ++i) {
    const auto& fam = fams[i * fams.size() / take];
    const auto b = tree_cut_bound(ops, g, fam.anchor, family_tiles(cls, fam.oscillating), sel);
    best = std::max(best, b.ratio());
  }
  return best;
}

}  // namespace lactile::harness
