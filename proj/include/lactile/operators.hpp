#pragma once

// The model operator
//   T f(x)   = sum_k (1/N) sum_y e^{-2 pi i N(x) y} psi_k(x - y) f(y)
// over the tile levels k in [5, m-5], its tile pieces
//   T_P f(x) = [(1/N) sum_y e^{-2 pi i N(x) y} psi_k(x - y) f(y)] 1_{E(P)}(x),
// their exact discrete adjoints (with respect to (1/N) sum u conj(v))
//   T_P* g(y) = (1/N) sum_{x in E(P)} e^{2 pi i N(x) y} psi_k(x - y) g(x),
// and the averaging / square-function / shell operators built from them.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <vector>

#include "lactile/decomposition.hpp"
#include "lactile/dyadic.hpp"
#include "lactile/error.hpp"
#include "lactile/fft.hpp"
#include "lactile/grid.hpp"
#include "lactile/kernel.hpp"
#include "lactile/level_sets.hpp"
#include "lactile/tiles.hpp"

namespace lactile {

class TileOperators {
 public:
  explicit TileOperators(int m) : m_(m), n_(std::size_t{1} << m), twiddle_(n_) {
    detail::require(m >= kMinTileGrid, "TileOperators: grid exponent must be >= 10");
    for (std::size_t t = 0; t < n_; ++t) {
      twiddle_[t] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(n_));
    }
    for (int k = min_tile_level(m); k <= max_tile_level(m); ++k) taps_.push_back(kernel_taps(m, k));
  }

  int scale() const { return m_; }
  std::size_t size() const { return n_; }

  const KernelTaps& taps(int level) const {
    return taps_[static_cast<std::size_t>(level - min_tile_level(m_))];
  }

  /// exp(2 pi i n y / N) for integer n, y.
  Complex character(std::int64_t n, std::int64_t y) const {
    const auto mask = static_cast<std::int64_t>(n_ - 1);
    return twiddle_[static_cast<std::size_t>((n * y) & mask)];
  }

  std::size_t wrap(std::int64_t i) const { return static_cast<std::size_t>(i & static_cast<std::int64_t>(n_ - 1)); }

  /// T f through one FFT convolution per distinct selector value.
  GridFunction apply_T(const GridFunction& f, const FrequencySelector& sel) const {
    check(f, sel);
    std::vector<Complex> kernel(n_, 0.0);
    for (const auto& t : taps_) {
      for (std::size_t j = 0; j < t.offset.size(); ++j) kernel[wrap(t.offset[j])] += t.value[j];
    }
    fft::transform(kernel, fft::Direction::Forward);

    std::map<std::int64_t, std::vector<std::size_t>> by_freq;
    for (std::size_t i = 0; i < n_; ++i) by_freq[sel[i]].push_back(i);

    GridFunction out(m_);
    const double scale = 1.0 / (static_cast<double>(n_) * static_cast<double>(n_));
    std::vector<Complex> buf(n_);
    for (const auto& [freq, points] : by_freq) {
      for (std::size_t y = 0; y < n_; ++y) buf[y] = std::conj(character(freq, static_cast<std::int64_t>(y))) * f[y];
      fft::transform(buf, fft::Direction::Forward);
      for (std::size_t j = 0; j < n_; ++j) buf[j] *= kernel[j];
      fft::transform(buf, fft::Direction::Backward);
      for (auto x : points) out[x] = buf[x] * scale;
    }
    return out;
  }

  /// Adds T_P f into `out`.
  void accumulate_T_P(const GridFunction& f, const Tile& p, const FrequencySelector& sel, std::span<Complex> out) const {
    const auto& t = taps(p.level());
    const double inv = 1.0 / static_cast<double>(n_);
    for (std::size_t x = p.space.sample_begin(m_); x < p.space.sample_end(m_); ++x) {
      const auto freq = sel[x];
      if (!p.omega.contains_frequency(freq)) continue;
      Complex acc{};
      for (std::size_t j = 0; j < t.offset.size(); ++j) {
        const std::size_t y = wrap(static_cast<std::int64_t>(x) - t.offset[j]);
        acc += std::conj(character(freq, static_cast<std::int64_t>(y))) * (t.value[j] * f[y]);
      }
      out[x] += acc * inv;
    }
  }

  GridFunction apply_T_P(const GridFunction& f, const Tile& p, const FrequencySelector& sel) const {
    check(f, sel);
    check_tile(p);
    GridFunction out(m_);
    accumulate_T_P(f, p, sel, out.samples());
    return out;
  }

  /// Adds T_P* g into `out`; touches only samples of I_{P*}.
  void accumulate_T_P_star(const GridFunction& g, const Tile& p, const FrequencySelector& sel,
                           std::span<Complex> out) const {
    const auto& t = taps(p.level());
    const double inv = 1.0 / static_cast<double>(n_);
    for (std::size_t x = p.space.sample_begin(m_); x < p.space.sample_end(m_); ++x) {
      const auto freq = sel[x];
      if (!p.omega.contains_frequency(freq) || g[x] == Complex{}) continue;
      const Complex gx = g[x] * inv;
      for (std::size_t j = 0; j < t.offset.size(); ++j) {
        const std::size_t y = wrap(static_cast<std::int64_t>(x) - t.offset[j]);
        out[y] += character(freq, static_cast<std::int64_t>(y)) * (t.value[j] * gx);
      }
    }
  }

  GridFunction apply_T_P_star(const GridFunction& g, const Tile& p, const FrequencySelector& sel) const {
    check(g, sel);
    check_tile(p);
    GridFunction out(m_);
    accumulate_T_P_star(g, p, sel, out.samples());
    return out;
  }

  /// sum over the family of T_P* g, in family order.
  GridFunction apply_T_star_family(const GridFunction& g, std::span<const Tile> family,
                                   const FrequencySelector& sel) const {
    check(g, sel);
    GridFunction out(m_);
    for (const auto& p : family) {
      check_tile(p);
      accumulate_T_P_star(g, p, sel, out.samples());
    }
    return out;
  }

  /// sum_{P in tree} T_P* g multiplied by e^{-2 pi i c y}: the tree shifted to frequency 0.
  GridFunction demodulated_tree_adjoint(const GridFunction& g, const Tree& tree, const FrequencySelector& sel) const {
    GridFunction u = apply_T_star_family(g, tree.tiles, sel);
    for (std::size_t y = 0; y < n_; ++y) u[y] *= std::conj(character(tree.freq, static_cast<std::int64_t>(y)));
    return u;
  }

  /// 1_I sum_l e^{2 pi i c_l y} Lambda_I(demodulated tree adjoint of tree l).
  GridFunction t_c_approximant(const GridFunction& g, const DyadicInterval& anchor, std::span<const Tree> trees,
                               const FrequencySelector& sel) const {
    check(g, sel);
    GridFunction out(m_);
    const auto b = anchor.sample_begin(m_);
    const auto e = anchor.sample_end(m_);
    for (const auto& tree : trees) {
      const GridFunction v = demodulated_tree_adjoint(g, tree, sel);
      Complex mean{};
      for (auto y = b; y < e; ++y) mean += v[y];
      mean /= static_cast<double>(e - b);
      for (auto y = b; y < e; ++y) out[y] += character(tree.freq, static_cast<std::int64_t>(y)) * mean;
    }
    return out;
  }

  /// (sum_l |T^{tree_l *} g|^2)^{1/2}.
  GridFunction square_function(const GridFunction& g, std::span<const Tree> trees, const FrequencySelector& sel) const {
    check(g, sel);
    std::vector<double> acc(n_, 0.0);
    for (const auto& tree : trees) {
      const GridFunction u = apply_T_star_family(g, tree.tiles, sel);
      for (std::size_t y = 0; y < n_; ++y) acc[y] += std::norm(u[y]);
    }
    GridFunction out(m_);
    for (std::size_t y = 0; y < n_; ++y) out[y] = std::sqrt(acc[y]);
    return out;
  }

  /// T_k* g = sum_P chi_P^k T_P* g where chi_P^k keeps the pieces Q of I_{P*}
  /// lying inside the union of I_k and missing the union of I_{k-1}.
  GridFunction residual_T_k(const GridFunction& g, int k, const LevelSets& ls, std::span<const Tile> tiles,
                            const FrequencySelector& sel) const {
    check(g, sel);
    GridFunction out(m_);
    std::vector<Complex> scratch(n_, Complex{});
    for (const auto& p : tiles) {
      check_tile(p);
      std::array<bool, kStarPieces> keep{};
      bool any = false;
      const auto star = i_star(p);
      for (int r = 0; r < kStarPieces; ++r) {
        keep[static_cast<std::size_t>(r)] = shell_level(ls, star[static_cast<std::size_t>(r)]) == k;
        any = any || keep[static_cast<std::size_t>(r)];
      }
      if (!any) continue;
      accumulate_T_P_star(g, p, sel, scratch);
      for (int r = 0; r < kStarPieces; ++r) {
        const auto& q = star[static_cast<std::size_t>(r)];
        for (auto y = q.sample_begin(m_); y < q.sample_end(m_); ++y) {
          if (keep[static_cast<std::size_t>(r)]) out[y] += scratch[y];
          scratch[y] = Complex{};
        }
      }
    }
    return out;
  }

  /// The k with Q inside the union of I_k and disjoint from the union of I_{k-1}, or -1.
  static int shell_level(const LevelSets& ls, const DyadicInterval& q) {
    const int m = ls.m;
    const int first = ls.first_level[q.sample_begin(m)];
    if (first > ls.k_max) return -1;
    for (auto i = q.sample_begin(m); i < q.sample_end(m); ++i) {
      if (ls.first_level[i] != first) return -1;
    }
    return first;
  }

 private:
  void check(const GridFunction& f, const FrequencySelector& sel) const {
    detail::require(f.scale() == m_ && sel.m == m_ && sel.size() == n_, "TileOperators: grid size mismatch");
  }
  void check_tile(const Tile& p) const {
    detail::require(p.level() >= min_tile_level(m_) && p.level() <= max_tile_level(m_),
                    "TileOperators: tile level outside the clamped range");
  }

  int m_;
  std::size_t n_;
  std::vector<Complex> twiddle_;
  std::vector<KernelTaps> taps_;
};

/// Lambda_I g = (mean of g over I) 1_I.
inline GridFunction lambda_proj(const GridFunction& g, const DyadicInterval& I) {
  const int m = g.scale();
  detail::require(I.side == Side::Space && I.level <= m, "lambda_proj: need a space interval of level <= m");
  Complex mean{};
  for (auto y = I.sample_begin(m); y < I.sample_end(m); ++y) mean += g[y];
  mean /= static_cast<double>(I.sample_count(m));
  GridFunction out(m);
  for (auto y = I.sample_begin(m); y < I.sample_end(m); ++y) out[y] = mean;
  return out;
}

/// Both sides of the tree-cut estimate on the anchor interval I:
///   lhs = max_{y in I} |T^{fam*} g - T_c g|,
///   rhs = sum_P (|I| / |I_P|) (int_{E(P)} |g|) / |I_P|.
struct TreeCutBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio() const { return rhs > 0.0 ? lhs / rhs : 0.0; }
};

inline TreeCutBound tree_cut_bound(const TileOperators& ops, const GridFunction& g, const DyadicInterval& anchor,
                                   const std::vector<Tile>& family, const FrequencySelector& sel) {
  const int m = ops.scale();
  const auto trees = decompose_trees(family);
  const GridFunction exact = ops.apply_T_star_family(g, family, sel);
  const GridFunction approx = ops.t_c_approximant(g, anchor, trees, sel);
  TreeCutBound out;
  for (auto y = anchor.sample_begin(m); y < anchor.sample_end(m); ++y) {
    out.lhs = std::max(out.lhs, std::abs(exact[y] - approx[y]));
  }
  const double inv_n = 1.0 / static_cast<double>(ops.size());
  for (const auto& p : family) {
    double mass_g = 0.0;
    for (auto x : e_set(p, sel)) mass_g += std::abs(g[x]) * inv_n;
    const double lp = p.space.length();
    out.rhs += (anchor.length() / lp) * (mass_g / lp);
  }
  return out;
}

}  // namespace lactile
