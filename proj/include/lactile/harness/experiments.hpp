#pragma once

// Experiment drivers behind the CLI subcommands. Each returns a RunResult
// whose rows and checks depend only on the configuration.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lactile/covering.hpp"
#include "lactile/decomposition.hpp"
#include "lactile/grid.hpp"
#include "lactile/harness/config.hpp"
#include "lactile/harness/families.hpp"
#include "lactile/harness/parallel.hpp"
#include "lactile/harness/propositions.hpp"
#include "lactile/harness/report.hpp"
#include "lactile/harness/rng.hpp"
#include "lactile/inequalities.hpp"
#include "lactile/kernel.hpp"
#include "lactile/level_sets.hpp"
#include "lactile/norms.hpp"
#include "lactile/operators.hpp"
#include "lactile/tiles.hpp"

namespace lactile::harness {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// log log(10 + t), natural logarithms.
inline double loglog10(double t) { return std::log(std::log(10.0 + t)); }

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline Json config_json(const ExperimentConfig& c) {
  Json j;
  j["m"] = c.m;
  j["alpha"] = c.alpha;
  j["J"] = c.J;
  j["seed"] = c.seed;
  j["instances"] = c.instances;
  j["refine"] = c.refine;
  j["family"] = {{"kind", c.family.kind}, {"s_min", c.family.s_min},   {"s_max", c.family.s_max},
                 {"level", c.family.level}, {"density", c.family.density}, {"count", c.family.count},
                 {"width_level", c.family.width_level}};
  j["lambda"] = c.lambda;
  j["gbar"] = c.gbar;
  j["lemma1_families"] = c.lemma1_families;
  j["cover"] = {{"families", c.cover.families}, {"max_intervals", c.cover.max_intervals}, {"grid", c.cover.grid}};
  j["ineq"] = {{"m", c.ineq.m}, {"instances", c.ineq.instances}, {"J", c.ineq.J},
               {"p", c.ineq.p}, {"alphas", c.ineq.alphas}, {"level", c.ineq.level}};
  return j;
}

// ---------------------------------------------------------------------------
// Operator identities

/// max |y sum_{k=0}^{K} psi_k(y) - 1| over grid points with 8 2^-K <= |y| <= 1/2, K = m - 5.
inline double kernel_telescoping_error(int m) {
  const int K = m - kTileMargin;
  const std::int64_t n = std::int64_t{1} << m;
  double worst = 0.0;
  for (std::int64_t d = 1; d <= n / 2; ++d) {
    const double y = static_cast<double>(d) / static_cast<double>(n);
    if (y < std::ldexp(8.0, -K)) continue;
    for (double s : {y, -y}) {
      double sum = 0.0;
      for (int k = 0; k <= K; ++k) sum += KernelBump::psi_k(k, s);
      worst = std::max(worst, std::abs(s * sum - 1.0));
    }
  }
  return worst;
}

inline GridFunction random_complex(int m, Rng& rng) {
  GridFunction f(m);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  return f;
}

inline FrequencySelector random_selector(int m, Rng& rng) {
  FrequencySelector sel{m, std::vector<std::int64_t>(std::size_t{1} << m)};
  const auto half = std::uint64_t{1} << (m - 1);
  for (auto& v : sel.freq) v = static_cast<std::int64_t>(rng.below(half));
  return sel;
}

/// max_x |sum_P T_P f(x) - T f(x)| / max_x |T f(x)| for a random (f, selector).
inline double discret_identity_error(const TileOperators& ops, std::uint64_t seed) {
  Rng rng(seed);
  const int m = ops.scale();
  const GridFunction f = random_complex(m, rng);
  const FrequencySelector sel = random_selector(m, rng);
  const GridFunction t = ops.apply_T(f, sel);
  GridFunction sum(m);
  for (const auto& p : all_tiles(m)) ops.accumulate_T_P(f, p, sel, sum.samples());
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    err = std::max(err, std::abs(sum[i] - t[i]));
    scale = std::max(scale, std::abs(t[i]));
  }
  return scale > 0.0 ? err / scale : err;
}

/// max over `count` random (P, f, g) of |<T_P f, g> - <f, T_P* g>| / (||f||_2 ||g||_2).
inline double adjointness_error(const TileOperators& ops, std::uint64_t seed, int count) {
  Rng rng(seed);
  const int m = ops.scale();
  const auto tiles = all_tiles(m);
  double worst = 0.0;
  for (int c = 0; c < count; ++c) {
    const Tile& p = tiles[rng.below(tiles.size())];
    const GridFunction f = random_complex(m, rng);
    const GridFunction g = random_complex(m, rng);
    const FrequencySelector sel = random_selector(m, rng);
    const Complex lhs = inner(ops.apply_T_P(f, p, sel), g);
    const Complex rhs = inner(f, ops.apply_T_P_star(g, p, sel));
    worst = std::max(worst, std::abs(lhs - rhs) / (lp_norm(f, 2.0) * lp_norm(g, 2.0)));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Main theorem sweep

/// Top samples of |S| whose count attains the weak norm: the extremal dual set.
inline std::vector<char> extremal_set(const GridFunction& s) {
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return std::abs(s[a]) > std::abs(s[b]); });
  double best = -1.0;
  std::size_t take = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double v = std::abs(s[order[i]]) * static_cast<double>(i + 1);
    if (v > best) {
      best = v;
      take = i + 1;
    }
  }
  std::vector<char> mask(s.size(), 0);
  for (std::size_t i = 0; i < take; ++i) mask[order[i]] = 1;
  return mask;
}

inline double mask_measure(const std::vector<char>& mask) {
  return static_cast<double>(std::count(mask.begin(), mask.end(), 1)) / static_cast<double>(mask.size());
}

/// W = ||sup_j |S_{n_j} f| ||_{1,inf} against ||f||_1 log log(10 + ||f||_inf / ||f||_1),
/// the extremal-set normalization, and pointwise domination by the full maximal partial sum.
inline ReportRow sweep_row(const Instance& inst, int m, const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const LacunarySequence seq(cfg.alpha, cfg.J);
  const GridFunction f = inst.f.render(m);
  ReportRow row;
  row.experiment = "sweep";
  row.id = inst.id;
  row.seed = inst.seed;
  row.m = m;
  row.l1 = lp_norm(f, 1.0);
  row.linf = lp_norm(f, kInf);

  const GridFunction lac = lacunary_maximal(f, seq);
  const GridFunction full = carleson_maximal(f, seq);
  row.weak = weak_l1_norm(lac);
  bool dominated = true;
  double gap = kInf;
  for (std::size_t i = 0; i < f.size(); ++i) {
    dominated = dominated && lac[i].real() <= full[i].real();
    gap = std::min(gap, full[i].real() - lac[i].real());
  }
  const auto gbar = extremal_set(lac);
  const double g = mask_measure(gbar);
  const double shape = row.l1 > 0.0 ? row.l1 * loglog10(row.linf / row.l1) : 0.0;
  const double shape_g = row.l1 > 0.0 ? row.l1 * loglog10(g * row.linf / row.l1) : 0.0;
  const GridFunction tf = TileOperators(m).apply_T(f, linearize(f, seq));

  row.set("ratio", shape > 0.0 ? row.weak / shape : 0.0);
  row.set("ratio_g", shape_g > 0.0 ? row.weak / shape_g : 0.0);
  row.set("gbar", g);
  row.set("loglog", row.l1 > 0.0 ? loglog10(row.linf / row.l1) : 0.0);
  row.set("weak_full", weak_l1_norm(full));
  row.set("weak_T", weak_l1_norm(tf));
  row.set("dominated", dominated ? 1.0 : 0.0);
  row.set("min_gap", gap);
  row.runtime = seconds_since(t0);
  return row;
}

struct RunOptions {
  unsigned threads = 1;
};

inline std::vector<ReportRow> sweep_main_theorem(const ExperimentConfig& cfg, int m, const RunOptions& opt = {}) {
  const auto insts = make_instances(cfg);
  std::vector<ReportRow> rows(insts.size());
  parallel_for(insts.size(), opt.threads, [&](std::size_t i) { rows[i] = sweep_row(insts[i], m, cfg); });
  return rows;
}

inline double column_max(const std::vector<ReportRow>& rows, const std::string& key) {
  double best = 0.0;
  for (const auto& r : rows) best = std::max(best, r.value(key));
  return best;
}

inline bool column_finite_nonneg(const std::vector<ReportRow>& rows, const std::string& key) {
  return std::all_of(rows.begin(), rows.end(), [&](const ReportRow& r) {
    const double v = r.value(key);
    return std::isfinite(v) && v >= 0.0;
  });
}

inline double relative_drift(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

inline RunResult run_sweep(const ExperimentConfig& cfg, const RunOptions& opt = {}) {
  RunResult r;
  r.command = "sweep";
  r.config = config_json(cfg);
  r.rows = sweep_main_theorem(cfg, cfg.m, opt);
  const double c_main = column_max(r.rows, "ratio");
  r.summary["C_main"] = c_main;
  r.summary["C_main_g"] = column_max(r.rows, "ratio_g");
  bool dominated = true;
  for (const auto& row : r.rows) dominated = dominated && row.value("dominated") == 1.0;
  r.plot = {"weak norm ratio of the lacunary maximal function", "log log(10 + ||f||_inf / ||f||_1)", "ratio", {}};
  Series s{"m=" + std::to_string(cfg.m), {}};
  for (const auto& row : r.rows) s.points.emplace_back(row.value("loglog"), row.value("ratio"));
  r.plot.series.push_back(s);
  if (cfg.refine) {
    auto fine = sweep_main_theorem(cfg, cfg.m + 2, opt);
    const double c_fine = column_max(fine, "ratio");
    r.summary["C_main_refined"] = c_fine;
    r.summary["refine_drift"] = relative_drift(c_main, c_fine);
    r.checks.push_back(check_le("sweep.refine_drift", relative_drift(c_main, c_fine), 0.15));
    Series t{"m=" + std::to_string(cfg.m + 2), {}};
    for (const auto& row : fine) {
      t.points.emplace_back(row.value("loglog"), row.value("ratio"));
      dominated = dominated && row.value("dominated") == 1.0;
    }
    r.plot.series.push_back(t);
    r.rows.insert(r.rows.end(), fine.begin(), fine.end());
  }
  r.checks.push_back(check_true("sweep.lacunary_dominated_by_full", dominated));
  r.checks.push_back(check_true("sweep.ratios_finite", column_finite_nonneg(r.rows, "ratio")));
  return r;
}

// ---------------------------------------------------------------------------
// Proposition report

/// Random union of level-`level` pieces avoiding the support of f.
inline std::vector<char> random_gbar(const GridFunction& f, int level, double density, Rng& rng) {
  const int m = f.scale();
  level = std::clamp(level, 1, m);
  std::vector<char> mask(f.size(), 0);
  std::vector<std::int64_t> free;
  for (std::int64_t i = 0; i < (std::int64_t{1} << level); ++i) {
    const auto I = DyadicInterval::space(level, i);
    bool empty = true;
    for (auto x = I.sample_begin(m); x < I.sample_end(m) && empty; ++x) empty = f[x] == Complex{};
    if (empty) free.push_back(i);
  }
  if (free.empty()) return mask;
  std::vector<std::int64_t> pick;
  for (auto i : free) {
    if (rng.chance(density)) pick.push_back(i);
  }
  if (pick.empty()) pick.push_back(free[rng.below(free.size())]);
  for (auto i : pick) {
    const auto I = DyadicInterval::space(level, i);
    for (auto x = I.sample_begin(m); x < I.sample_end(m); ++x) mask[x] = 1;
  }
  return mask;
}

inline double lambda_for(const ExperimentConfig& cfg, double f_l1, double gbar, Rng& rng) {
  if (cfg.lambda_is_fixed()) return cfg.fixed_lambda();
  if (cfg.lambda == "random") return rng.uniform(0.02, 0.98);
  if (gbar <= 0.0) return 0.5;
  return std::clamp(f_l1 / gbar, 1e-6, 0.5);
}

/// Group masses for G = Gbar \ 1000 F_bad and for Gbar itself, each divided by
/// its bound shape: ||f||_1, ||f||_1 log log(10 + |G| ||f||_inf / ||f||_1), ||f||_1, ||f||_1.
inline ReportRow proposition_report(const ExperimentConfig& cfg, const Instance& inst, int m, const std::string& gbar_kind) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(inst.seed ^ 0x9e3779b97f4a7c15ULL);
  const LacunarySequence seq(cfg.alpha, cfg.J);
  const GridFunction f = inst.f.render(m);
  ReportRow row;
  row.experiment = "props";
  row.id = inst.id + "/" + gbar_kind;
  row.seed = inst.seed;
  row.m = m;
  row.l1 = lp_norm(f, 1.0);
  row.linf = lp_norm(f, kInf);

  const GridFunction lac = lacunary_maximal(f, seq);
  row.weak = weak_l1_norm(lac);
  std::vector<char> gbar = gbar_kind == "extremal" ? extremal_set(lac) : random_gbar(f, cfg.family.level, 0.3, rng);
  if (std::count(gbar.begin(), gbar.end(), 1) == 0) gbar = extremal_set(lac);
  const double gbar_measure = mask_measure(gbar);
  row.lambda = lambda_for(cfg, row.l1, gbar_measure, rng);

  const LevelSets ls = level_intervals(f, row.lambda);
  const BadSet bad = f_bad(f, row.lambda);
  const Classification cls = classify(all_tiles(m), f, ls, bad, cfg.alpha);
  const FrequencySelector sel = linearize(f, seq);
  const TileOperators ops(m);

  std::vector<char> g(gbar.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = gbar[i] && !bad.dilated[i] ? 1 : 0;
  const double g_measure = mask_measure(g);
  row.set("gbar", gbar_measure);
  row.set("g", g_measure);
  row.set("g_over_gbar", gbar_measure > 0.0 ? g_measure / gbar_measure : 0.0);

  auto emit = [&](const std::vector<char>& mask, double measure, const std::string& tag) {
    const GridFunction gi = GridFunction::indicator(m, mask);
    const GroupMasses gm = group_masses(ops, cls, ls, f, gi, sel);
    const double s1 = row.l1;
    const double s2 = row.l1 > 0.0 ? row.l1 * loglog10(measure * row.linf / row.l1) : 0.0;
    auto ratio = [](double v, double s) { return s > 0.0 ? v / s : 0.0; };
    row.set("cluster_" + tag, gm.cluster);
    row.set("zyg_" + tag, gm.p2);
    row.set("p1_" + tag, gm.p1);
    row.set("resid_" + tag, gm.residual);
    row.set("r_cluster_" + tag, ratio(gm.cluster, s1));
    row.set("r_zyg_" + tag, ratio(gm.p2, s2));
    row.set("r_p1_" + tag, ratio(gm.p1, s1));
    row.set("r_resid_" + tag, ratio(gm.residual, s1));
  };
  emit(g, g_measure, "G");
  emit(gbar, gbar_measure, "Gbar");
  row.set("lemma1", lemma1_max_ratio(ops, cls, GridFunction::indicator(m, gbar), sel, cfg.lemma1_families));
  row.set("msum", max_msum_ratio(ls, gbar));
  row.set("multiplicity", cls.max_multiplicity());
  row.runtime = seconds_since(t0);
  return row;
}

inline const std::vector<std::string>& prop_ratio_columns() {
  static const std::vector<std::string> cols{"r_cluster_G", "r_zyg_G", "r_p1_G", "r_resid_G",
                                             "r_cluster_Gbar", "r_zyg_Gbar", "r_p1_Gbar", "r_resid_Gbar"};
  return cols;
}

inline std::string gbar_kind_for(const ExperimentConfig& cfg, std::size_t i) {
  if (cfg.gbar == "alternate") return i % 2 == 0 ? "extremal" : "random";
  return cfg.gbar;
}

inline RunResult run_props(const ExperimentConfig& cfg, const RunOptions& opt = {}) {
  RunResult r;
  r.command = "props";
  r.config = config_json(cfg);
  const auto insts = make_instances(cfg);
  r.rows.resize(insts.size());
  parallel_for(insts.size(), opt.threads,
               [&](std::size_t i) { r.rows[i] = proposition_report(cfg, insts[i], cfg.m, gbar_kind_for(cfg, i)); });
  for (const auto& col : prop_ratio_columns()) {
    r.summary[col] = column_max(r.rows, col);
    r.checks.push_back(check_true("props." + col + "_finite", column_finite_nonneg(r.rows, col)));
  }
  r.summary["lemma1"] = column_max(r.rows, "lemma1");
  r.summary["msum"] = column_max(r.rows, "msum");
  r.summary["multiplicity"] = column_max(r.rows, "multiplicity");
  r.checks.push_back(check_le("props.multiplicity", column_max(r.rows, "multiplicity"), kMaxMultiplicity));
  r.plot = {"grouped dual terms over their bound shapes", "log log(10 + |Gbar| / |F|)", "ratio", {}};
  for (const auto& col : {"r_cluster_Gbar", "r_zyg_Gbar", "r_p1_Gbar", "r_resid_Gbar"}) {
    Series s{col, {}};
    for (const auto& row : r.rows) {
      if (row.l1 > 0.0) s.points.emplace_back(loglog10(row.value("gbar") * row.linf / row.l1), row.value(col));
    }
    r.plot.series.push_back(s);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Decomposition report

struct LevelSetAudit {
  bool antichain = true;      // members of each I_k pairwise disjoint
  bool above = true;          // mean > lambda 2^-k on every member
  bool maximal = true;        // no dyadic ancestor of a member qualifies
  bool complete = true;       // union of I_k = {M f > lambda 2^-k}
  bool nested = true;         // union I_k inside union I_{k+1}
  bool shell = true;          // |f| <= 2^{1-l} lambda on shell l, and f = 0 there for indicators
};

inline LevelSetAudit audit_level_sets(const GridFunction& f, const LevelSets& ls, bool indicator) {
  LevelSetAudit a;
  const int m = f.scale();
  const DyadicSums sums(f);
  const auto maxf = dyadic_maximal(sums);
  std::vector<char> prev(f.size(), 0);
  for (int k = 0; k < ls.count(); ++k) {
    const double thr = std::ldexp(ls.lambda, -k);
    std::vector<char> cover(f.size(), 0);
    for (const auto& I : ls.at(k).items()) {
      a.above = a.above && sums.mean(I) > thr;
      for (DyadicInterval up = I; up.level > 0;) {
        up = up.parent();
        a.maximal = a.maximal && !(sums.mean(up) > thr);
      }
      for (auto i = I.sample_begin(m); i < I.sample_end(m); ++i) {
        a.antichain = a.antichain && !cover[i];
        cover[i] = 1;
      }
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
      a.complete = a.complete && (cover[i] == 1) == (maxf[i] > thr);
      a.nested = a.nested && (!prev[i] || cover[i]);
      if (k >= 1 && cover[i] && !prev[i]) {
        a.shell = a.shell && std::abs(f[i]) <= std::ldexp(ls.lambda, 1 - k);
        if (indicator) a.shell = a.shell && f[i] == Complex{};
      }
    }
    prev = std::move(cover);
  }
  return a;
}

inline ReportRow decomposition_report(const ExperimentConfig& cfg, const Instance& inst, int m, Json* detail) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(inst.seed ^ 0x51ed2701f3a5c9b1ULL);
  const LacunarySequence seq(cfg.alpha, cfg.J);
  const GridFunction f = inst.f.render(m);
  ReportRow row;
  row.experiment = "decompose";
  row.id = inst.id;
  row.seed = inst.seed;
  row.m = m;
  row.l1 = lp_norm(f, 1.0);
  row.linf = lp_norm(f, kInf);
  const GridFunction lac = lacunary_maximal(f, seq);
  row.weak = weak_l1_norm(lac);
  row.lambda = lambda_for(cfg, row.l1, mask_measure(extremal_set(lac)), rng);

  const LevelSets ls = level_intervals(f, row.lambda);
  const BadSet bad = f_bad(f, row.lambda);
  const auto tiles = all_tiles(m);
  const Classification cls = classify(tiles, f, ls, bad, cfg.alpha, {.enforce_invariants = false});
  const FrequencySelector sel = linearize(f, seq);
  const LevelSetAudit audit = audit_level_sets(f, ls, inst.f.is_indicator());

  std::map<std::string, std::size_t> by_kind;
  std::map<std::pair<int, std::string>, std::size_t> by_level_kind;
  for (std::size_t t = 0; t < tiles.size(); ++t) {
    std::set<std::pair<int, std::string>> seen;
    std::set<std::string> kinds;
    for (const auto& l : cls.labels[t]) {
      kinds.insert(to_string(l.kind));
      seen.insert({l.kind == LabelKind::Cluster ? -1 : l.k, to_string(l.kind)});
    }
    for (const auto& k : kinds) ++by_kind[k];
    for (const auto& key : seen) ++by_level_kind[key];
  }
  std::size_t p2_trees = 0, p1_trees = 0, families = 0;
  for (const auto& fam : anchor_families(cls)) {
    ++families;
    p2_trees += decompose_trees(family_tiles(cls, fam.oscillating)).size();
    p1_trees += decompose_trees(family_tiles(cls, fam.non_oscillating)).size();
  }
  const MassPartition masses = mass_partition(tiles, sel);

  row.set("tiles", static_cast<double>(tiles.size()));
  for (const char* k : {"cluster", "P2", "P1", "residual"}) row.set(std::string("n_") + k, static_cast<double>(by_kind[k]));
  row.set("uncovered", static_cast<double>(cls.uncovered()));
  row.set("multiplicity", cls.max_multiplicity());
  row.set("families", static_cast<double>(families));
  row.set("p2_trees", static_cast<double>(p2_trees));
  row.set("p1_trees", static_cast<double>(p1_trees));
  row.set("tree_oscillation", max_tree_oscillation(cls));
  row.set("mass_buckets", static_cast<double>(masses.buckets.size()));
  row.set("null_mass_tiles", static_cast<double>(masses.null_bucket.size()));
  row.set("k_max", ls.k_max);
  row.set("ok_coverage", cls.uncovered() == 0 ? 1.0 : 0.0);
  row.set("ok_multiplicity", cls.max_multiplicity() <= kMaxMultiplicity ? 1.0 : 0.0);
  row.set("ok_antichain", audit.antichain ? 1.0 : 0.0);
  row.set("ok_above", audit.above ? 1.0 : 0.0);
  row.set("ok_maximal", audit.maximal ? 1.0 : 0.0);
  row.set("ok_complete", audit.complete ? 1.0 : 0.0);
  row.set("ok_nested", audit.nested ? 1.0 : 0.0);
  row.set("ok_shell", audit.shell ? 1.0 : 0.0);
  row.set("ok_tree_oscillation", max_tree_oscillation(cls) < 2.0 ? 1.0 : 0.0);

  if (detail) {
    Json counts = Json::array();
    for (const auto& [key, count] : by_level_kind) counts.push_back({{"k", key.first}, {"label", key.second}, {"tiles", count}});
    Json hist = Json::array();
    for (const auto& [n, v] : masses.buckets) hist.push_back({{"bucket", n}, {"tiles", v.size()}});
    Json levels = Json::array();
    for (int k = 0; k < ls.count(); ++k) levels.push_back({{"k", k}, {"intervals", ls.at(k).size()}, {"measure", ls.union_measure(k)}});
    (*detail) = {{"id", inst.id}, {"levels", levels}, {"labels", counts}, {"mass_histogram", hist}};
  }
  row.runtime = seconds_since(t0);
  return row;
}

inline const std::vector<std::string>& decomposition_ok_columns() {
  static const std::vector<std::string> cols{"ok_coverage", "ok_multiplicity", "ok_antichain", "ok_above", "ok_maximal",
                                             "ok_complete", "ok_nested", "ok_shell", "ok_tree_oscillation"};
  return cols;
}

inline RunResult run_decompose(const ExperimentConfig& cfg, const RunOptions& opt = {}) {
  RunResult r;
  r.command = "decompose";
  r.config = config_json(cfg);
  const auto insts = make_instances(cfg);
  r.rows.resize(insts.size());
  std::vector<Json> details(insts.size());
  parallel_for(insts.size(), opt.threads,
               [&](std::size_t i) { r.rows[i] = decomposition_report(cfg, insts[i], cfg.m, &details[i]); });
  for (const auto& col : decomposition_ok_columns()) {
    bool all = true;
    for (const auto& row : r.rows) all = all && row.value(col) == 1.0;
    r.checks.push_back(check_true("decompose." + col, all));
  }
  r.summary["max_multiplicity"] = r.rows.empty() ? 0.0 : column_max(r.rows, "multiplicity");
  r.summary["max_tree_oscillation"] = r.rows.empty() ? 0.0 : column_max(r.rows, "tree_oscillation");
  r.summary["instances"] = Json::array();
  for (auto& d : details) r.summary["instances"].push_back(std::move(d));
  return r;
}

// ---------------------------------------------------------------------------
// Covering stress

/// Disjoint dyadic intervals of level <= max_level: leaves of a random
/// refinement that keeps splitting near recent splits, then a random subset.
inline std::vector<DyadicInterval> random_disjoint_family(Rng& rng, int max_level, int max_count) {
  const auto target = static_cast<std::size_t>(1 + rng.below(static_cast<std::uint64_t>(max_count)));
  std::vector<DyadicInterval> leaves{DyadicInterval::torus()};
  std::size_t last = 0;
  std::size_t guard = 0;
  while (leaves.size() < 3 * target && guard++ < 20 * target + 64) {
    const std::size_t pick = rng.chance(0.6) ? last : static_cast<std::size_t>(rng.below(leaves.size()));
    const DyadicInterval I = leaves[pick];
    if (I.level >= max_level) continue;
    leaves[pick] = DyadicInterval::space(I.level + 1, 2 * I.index);
    leaves.push_back(DyadicInterval::space(I.level + 1, 2 * I.index + 1));
    last = rng.chance(0.5) ? pick : leaves.size() - 1;
  }
  for (std::size_t i = leaves.size(); i > 1; --i) std::swap(leaves[i - 1], leaves[rng.below(i)]);
  leaves.resize(std::min(target, leaves.size()));
  return leaves;
}

inline std::vector<char> random_sample_set(Rng& rng, int m, int level) {
  std::vector<char> mask(std::size_t{1} << m, 0);
  const double density = rng.uniform(0.05, 0.6);
  for (std::int64_t i = 0; i < (std::int64_t{1} << level); ++i) {
    if (!rng.chance(density)) continue;
    const auto I = DyadicInterval::space(level, i);
    for (auto x = I.sample_begin(m); x < I.sample_end(m); ++x) mask[x] = 1;
  }
  return mask;
}

inline ReportRow cover_row(const ExperimentConfig& cfg, std::size_t i) {
  const std::uint64_t seed = cfg.seed + i;
  Rng rng(seed);
  const int grid = cfg.cover.grid;
  const auto family = random_disjoint_family(rng, grid, cfg.cover.max_intervals);
  const auto gmask = random_sample_set(rng, grid, std::max(1, grid - 4));
  const CoverRounds rounds = greedy_cover(family);
  const RoundReport rep = round_ratios(rounds);
  ReportRow row;
  row.experiment = "cover";
  row.id = "family#" + std::to_string(i);
  row.seed = seed;
  row.m = grid;
  row.set("intervals", static_cast<double>(family.size()));
  row.set("rounds", static_cast<double>(rounds.size()));
  row.set("well_formed", rounds_well_formed(rounds) ? 1.0 : 0.0);
  row.set("min_ratio", rep.min_ratio);
  row.set("msum", msum_ratio(family, gmask));
  return row;
}

inline RunResult run_cover_stress(const ExperimentConfig& cfg, const RunOptions& opt = {}) {
  RunResult r;
  r.command = "cover-stress";
  r.config = config_json(cfg);
  const auto count = static_cast<std::size_t>(cfg.cover.families);
  r.rows.resize(count);
  parallel_for(count, opt.threads, [&](std::size_t i) { r.rows[i] = cover_row(cfg, i); });
  bool formed = true;
  double min_ratio = 1.0, msum = 0.0, rounds = 0.0;
  for (const auto& row : r.rows) {
    formed = formed && row.value("well_formed") == 1.0;
    min_ratio = std::min(min_ratio, row.value("min_ratio"));
    msum = std::max(msum, row.value("msum"));
    rounds = std::max(rounds, row.value("rounds"));
  }
  r.summary["families"] = count;
  r.summary["min_round_ratio"] = min_ratio;
  r.summary["C_msum"] = msum;
  r.summary["max_rounds"] = rounds;
  r.checks.push_back(check_true("cover.partition_and_disjoint_dilations", formed));
  r.checks.push_back(check_ge("cover.min_round_ratio", min_ratio, kRoundRatioFloor));
  r.checks.push_back(check_le("cover.msum", msum, 500.0));
  return r;
}

// ---------------------------------------------------------------------------
// Inequality corpus

inline CoefficientVector random_coefficients(Rng& rng, std::int64_t alpha, int J) {
  std::vector<Complex> a(static_cast<std::size_t>(J));
  for (auto& v : a) v = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  CoefficientVector c(std::move(a), LacunarySequence(alpha, J));
  const double n = c.l2_norm();
  return n > 0.0 ? c.scaled(1.0 / n) : c;
}

struct IneqMaxima {
  double zygmund = 0.0;
  double khinchin = 0.0;
  std::map<double, double> dual;
  double bmo = 0.0;
  double general = 0.0;
  double zygmund_single_error = 0.0;
  double zygmund_scale_error = 0.0;
  double khinchin_p2_error = 0.0;
};

/// One grid of the corpus; instance i uses seed cfg.seed + i for every inequality.
inline IneqMaxima inequality_corpus(const ExperimentConfig& cfg, int m, std::vector<ReportRow>* rows,
                                    const RunOptions& opt = {}) {
  const auto& q = cfg.ineq;
  const auto count = static_cast<std::size_t>(q.instances);
  std::vector<std::vector<ReportRow>> per(count);
  std::vector<IneqMaxima> partial(count);
  const double single_exact = 1.0 / std::sqrt(std::numbers::ln2);

  parallel_for(count, opt.threads, [&](std::size_t i) {
    const std::uint64_t seed = cfg.seed + i;
    Rng rng(seed);
    IneqMaxima& mx = partial[i];
    auto row = [&](const std::string& exp, const std::string& param, double value) {
      ReportRow r;
      r.experiment = exp;
      r.id = std::to_string(i) + ":" + param;
      r.seed = seed;
      r.m = m;
      r.set("ratio", value);
      per[i].push_back(std::move(r));
    };

    // exp(L^2) ratio for lacunary series; scale invariance; single coefficient.
    const CoefficientVector a = random_coefficients(rng, cfg.alpha, std::min(q.J, cfg.J));
    const double z = zygmund_ratio(a, m);
    mx.zygmund = std::max(mx.zygmund, z);
    mx.zygmund_scale_error = std::max(mx.zygmund_scale_error, std::abs(zygmund_ratio(a.scaled(3.7), m) - z) / z);
    row("zygmund", "J=" + std::to_string(a.size()), z);
    {
      const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(a.size())));
      std::vector<Complex> unit(a.size());
      unit[static_cast<std::size_t>(j)] = std::polar(rng.uniform(0.1, 5.0), rng.uniform(0.0, 6.0));
      const double s = zygmund_ratio(CoefficientVector(unit, a.sequence()), m);
      mx.zygmund_single_error = std::max(mx.zygmund_single_error, std::abs(s - single_exact));
    }

    // Moments for frequencies 2^j.
    const CoefficientVector b = random_coefficients(rng, 2, q.J);
    const double k2 = khinchin_moment_ratio(b, 2, m);
    mx.khinchin_p2_error = std::max(mx.khinchin_p2_error, std::abs(k2 - 1.0 / std::sqrt(2.0)));
    for (int p : q.p) {
      const double kp = khinchin_moment_ratio(b, p, m);
      if (p > 2) mx.khinchin = std::max(mx.khinchin, kp);
      row("khinchin", "p=" + std::to_string(p), kp);
    }

    // Dual coefficient bound on step functions and indicator unions.
    const StepFunction step = i % 2 == 0 ? bounded_step(rng, q.level) : indicator_union(rng, q.level, rng.uniform(0.02, 0.5));
    const GridFunction fs = step.render(m);
    for (double al : q.alphas) {
      const double d = coeff_dual_ratio(fs, al);
      mx.dual[al] = std::max(mx.dual[al], d);
      row("coeff_dual", "alpha=" + fmt_number(al), d);
    }

    // Dyadic BMO of a unit lacunary series with frequencies 2^j.
    const double bmo = dyadic_bmo_norm(synthesize(random_coefficients(rng, 2, q.J), m));
    mx.bmo = std::max(mx.bmo, bmo);
    row("bmo", "J=" + std::to_string(q.J), bmo);

    // Coefficient bound on every level-set interval of an indicator.
    const GridFunction fi = indicator_union(rng, q.level, rng.uniform(0.02, 0.5)).render(m);
    const double lambda = rng.uniform(0.1, 0.9);
    const LevelSets ls = level_intervals(fi, lambda);
    const LacunarySequence seq(2, q.J);
    double gmax = 0.0;
    for (int k = 0; k < ls.count(); ++k) {
      for (const auto& I : ls.at(k).items()) gmax = std::max(gmax, general_coeff_bound_ratio(fi, I, seq, k, lambda));
    }
    mx.general = std::max(mx.general, gmax);
    row("general_coeff", "lambda=" + fmt_number(lambda), gmax);
  });

  IneqMaxima total;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& p = partial[i];
    total.zygmund = std::max(total.zygmund, p.zygmund);
    total.khinchin = std::max(total.khinchin, p.khinchin);
    for (const auto& [al, v] : p.dual) total.dual[al] = std::max(total.dual[al], v);
    total.bmo = std::max(total.bmo, p.bmo);
    total.general = std::max(total.general, p.general);
    total.zygmund_single_error = std::max(total.zygmund_single_error, p.zygmund_single_error);
    total.zygmund_scale_error = std::max(total.zygmund_scale_error, p.zygmund_scale_error);
    total.khinchin_p2_error = std::max(total.khinchin_p2_error, p.khinchin_p2_error);
    if (rows) rows->insert(rows->end(), per[i].begin(), per[i].end());
  }
  return total;
}

inline Json maxima_json(const IneqMaxima& mx) {
  Json j;
  j["C_Z"] = mx.zygmund;
  j["C_K"] = mx.khinchin;
  for (const auto& [al, v] : mx.dual) j["C_D(" + fmt_number(al) + ")"] = v;
  j["C_B"] = mx.bmo;
  j["C_G"] = mx.general;
  return j;
}

inline RunResult run_ineq(const ExperimentConfig& cfg, const RunOptions& opt = {}) {
  RunResult r;
  r.command = "ineq";
  r.config = config_json(cfg);
  const int m = cfg.ineq.m;
  const IneqMaxima coarse = inequality_corpus(cfg, m, &r.rows, opt);
  const IneqMaxima fine = inequality_corpus(cfg, m + 2, &r.rows, opt);
  r.summary["m"] = m;
  r.summary["coarse"] = maxima_json(coarse);
  r.summary["fine"] = maxima_json(fine);
  r.checks.push_back(check_le("ineq.khinchin_p2_exact", std::max(coarse.khinchin_p2_error, fine.khinchin_p2_error), 1e-12));
  r.checks.push_back(check_le("ineq.zygmund_single", std::max(coarse.zygmund_single_error, fine.zygmund_single_error), 1e-6));
  r.checks.push_back(check_le("ineq.zygmund_scale_invariance", std::max(coarse.zygmund_scale_error, fine.zygmund_scale_error), 1e-8));
  auto drift = [&](const std::string& name, double a, double b) {
    r.checks.push_back(check_true("ineq." + name + "_finite", std::isfinite(a) && std::isfinite(b)));
    r.checks.push_back(check_le("ineq." + name + "_drift", relative_drift(a, b), 0.10));
  };
  drift("C_Z", coarse.zygmund, fine.zygmund);
  drift("C_K", coarse.khinchin, fine.khinchin);
  for (const auto& [al, v] : coarse.dual) drift("C_D(" + fmt_number(al) + ")", v, fine.dual.at(al));
  drift("C_B", coarse.bmo, fine.bmo);
  drift("C_G", coarse.general, fine.general);
  return r;
}

// ---------------------------------------------------------------------------
// Verify: a reduced pass over every invariant.

inline RunResult run_verify(const ExperimentConfig& cfg, const RunOptions& opt = {}) {
  RunResult r;
  r.command = "verify";
  r.config = config_json(cfg);
  auto absorb = [&](RunResult sub) {
    r.rows.insert(r.rows.end(), sub.rows.begin(), sub.rows.end());
    r.checks.insert(r.checks.end(), sub.checks.begin(), sub.checks.end());
    r.summary[sub.command] = sub.summary;
  };

  r.checks.push_back(check_le("kernel.telescoping", kernel_telescoping_error(14), 1e-8));
  const TileOperators ops(cfg.m);
  double discret = 0.0;
  for (int i = 0; i < 2; ++i) discret = std::max(discret, discret_identity_error(ops, cfg.seed + static_cast<std::uint64_t>(i)));
  r.checks.push_back(check_le("operators.discret_identity", discret, 1e-10));
  r.checks.push_back(check_le("operators.adjointness", adjointness_error(ops, cfg.seed, 50), 1e-10));

  ExperimentConfig dec = cfg;
  dec.m = 10;
  dec.J = std::min(cfg.J, 9);
  dec.family.kind = "mixed";
  dec.family.level = 7;
  dec.family.width_level = 9;
  dec.lambda = "random";
  dec.instances = std::max(3, cfg.instances);
  absorb(run_decompose(dec, opt));

  absorb(run_cover_stress(cfg, opt));

  ExperimentConfig sw = cfg;
  sw.family.kind = "dyadic_indicators";
  sw.family.s_min = 1;
  sw.family.s_max = 4;
  sw.refine = false;
  absorb(run_sweep(sw, opt));

  ExperimentConfig pr = cfg;
  pr.instances = std::min(cfg.instances, 2);
  absorb(run_props(pr, opt));

  ExperimentConfig iq = cfg;
  RunResult ineq = run_ineq(iq, opt);
  // Small corpora are not meant to be grid-stable; keep only the exactness checks.
  std::erase_if(ineq.checks, [](const Check& c) { return c.name.find("_drift") != std::string::npos; });
  absorb(std::move(ineq));
  return r;
}

}  // namespace lactile::harness
