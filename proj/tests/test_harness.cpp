#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lactile/harness/cli.hpp"
#include "lactile/harness/experiments.hpp"
#include "lactile/harness/propositions.hpp"
#include "lactile/lactile.hpp"
#include "oracles.hpp"

namespace {

using namespace lactile;
using namespace lactile::harness;
namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lactile_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lactile_cli");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

TEST(Config, DefaultsValidateForEveryCommand) {
  for (const char* c : {"sweep", "props", "decompose", "cover-stress", "ineq", "verify"}) {
    EXPECT_NO_THROW(parse_config("", c)) << c;
  }
  const auto sweep = parse_config("", "sweep");
  EXPECT_EQ(sweep.m, 14);
  EXPECT_EQ(sweep.J, 12);
  EXPECT_EQ(sweep.family.kind, "dyadic_indicators");
}

TEST(Config, OverridesAndNumericLambda) {
  const auto c = parse_config(R"({"m": 11, "J": 9, "seed": 7, "lambda": 0.25, "family": {"kind": "bounded", "level": 6}})",
                              "props");
  EXPECT_EQ(c.m, 11);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_TRUE(c.lambda_is_fixed());
  EXPECT_DOUBLE_EQ(c.fixed_lambda(), 0.25);
  EXPECT_EQ(c.family.kind, "bounded");
  EXPECT_EQ(c.family.level, 6);
  EXPECT_DOUBLE_EQ(c.family.density, 0.03);
}

TEST(Config, RejectsBadInput) {
  for (const char* text : {"{", R"({"mm": 12})", R"({"family": {"kinds": "x"}})", R"({"m": 30})", R"({"m": "x"})",
                           R"({"schema": 2})", R"({"alpha": 1})", R"({"J": 14, "m": 12})", R"({"lambda": 1.5})",
                           R"({"lambda": "sometimes"})", R"({"ineq": {"p": [3]}})", R"({"gbar": "all"})", "[1, 2]"}) {
    EXPECT_THROW(parse_config(text, "sweep"), ConfigError) << text;
  }
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch_dir("exit");
  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << "{ not json";
  EXPECT_EQ(cli({"verify", "-c", bad.string(), "-o", dir.string()}), kExitConfig);
  EXPECT_EQ(cli({"verify", "-c", (dir / "missing.json").string(), "-o", dir.string()}), kExitConfig);
  EXPECT_EQ(cli({"frobnicate"}), kExitConfig);
  EXPECT_EQ(cli({"sweep", "--threads", "0"}), kExitConfig);

  const fs::path small = dir / "small.json";
  std::ofstream(small) << R"({"instances": 3})";
  EXPECT_EQ(cli({"decompose", "-c", small.string(), "-o", (dir / "out").string()}), kExitPass);
  EXPECT_TRUE(fs::exists(dir / "out" / "decompose.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "decompose.json"));
  EXPECT_TRUE(fs::exists(dir / "out" / "decompose_checks.csv"));
}

TEST(Cli, OutputsAreByteIdenticalAcrossRunsAndThreadCounts) {
  const fs::path dir = scratch_dir("determinism");
  const fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"instances": 4, "m": 10, "J": 9, "family": {"level": 6}, "lemma1_families": 2})";
  ASSERT_EQ(cli({"props", "-c", cfg.string(), "-o", (dir / "a").string(), "-t", "1", "--svg"}), kExitPass);
  ASSERT_EQ(cli({"props", "-c", cfg.string(), "-o", (dir / "b").string(), "-t", "3", "--svg"}), kExitPass);
  for (const char* f : {"props.csv", "props.json", "props_checks.csv", "props.svg"}) {
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
    EXPECT_FALSE(slurp(dir / "a" / f).empty()) << f;
  }
  ASSERT_EQ(cli({"props", "-c", cfg.string(), "-o", (dir / "c").string(), "--seed", "99"}), kExitPass);
  EXPECT_NE(slurp(dir / "a" / "props.csv"), slurp(dir / "c" / "props.csv"));
}

TEST(Sweep, FullTorusIndicator) {
  ExperimentConfig cfg = parse_config(R"({"m": 10, "J": 9, "refine": false})", "sweep");
  const ReportRow row = sweep_row({"torus", 1, dyadic_indicator(0)}, 10, cfg);
  EXPECT_NEAR(row.weak, 1.0, 1e-12);
  EXPECT_NEAR(row.value("ratio"), 1.0 / std::log(std::log(11.0)), 1e-12);
  EXPECT_EQ(row.value("dominated"), 1.0);
}

TEST(Sweep, ZeroFunction) {
  ExperimentConfig cfg = parse_config(R"({"m": 10, "J": 9, "refine": false})", "sweep");
  const ReportRow row = sweep_row({"zero", 1, StepFunction{"zero", {}}}, 10, cfg);
  EXPECT_EQ(row.weak, 0.0);
  EXPECT_EQ(row.value("ratio"), 0.0);
  EXPECT_EQ(row.value("weak_full"), 0.0);
  EXPECT_EQ(row.value("dominated"), 1.0);
}

TEST(Sweep, DyadicFamilyRowsAndPlot) {
  const RunResult r = run_sweep(parse_config(R"({"m": 10, "J": 9, "refine": false, "family": {"s_max": 6}})", "sweep"));
  ASSERT_EQ(r.rows.size(), 6u);
  EXPECT_TRUE(r.passed());
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.value("dominated"), 1.0);
    EXPECT_GT(row.value("ratio"), 0.0);
    EXPECT_NEAR(row.l1, std::ldexp(1.0, -std::stoi(row.id.substr(2))), 0.0);
  }
  EXPECT_FALSE(r.plot.series.empty());
}

TEST(Props, ZeroFunctionHasZeroMasses) {
  ExperimentConfig cfg = parse_config(R"({"m": 10, "J": 9})", "props");
  const ReportRow row = proposition_report(cfg, {"zero", 1, StepFunction{"zero", {}}}, 10, "extremal");
  for (const char* c : {"cluster_G", "zyg_G", "p1_G", "resid_G", "cluster_Gbar", "zyg_Gbar", "p1_Gbar", "resid_Gbar"}) {
    EXPECT_EQ(row.value(c), 0.0) << c;
  }
}

TEST(Props, ClusterOnlySelectorLeavesOnlyClusterAndShellTerms) {
  const int m = 10;
  const TileOperators ops(m);
  const GridFunction f = GridFunction::interval_indicator(m, 0.25, 0.5);
  const LevelSets ls = level_intervals(f, 0.25);
  const Classification cls = classify(all_tiles(m), f, ls, f_bad(f, 0.25), 2);
  const GroupMasses gm = group_masses(ops, cls, ls, f, GridFunction::interval_indicator(m, 0.0, 0.25),
                                      FrequencySelector::constant(m, 0));
  EXPECT_EQ(gm.p2, 0.0);
  EXPECT_EQ(gm.p1, 0.0);
  EXPECT_GT(gm.cluster, 0.0);
}

TEST(Props, GroupMassesMatchPerTileSums) {
  std::mt19937_64 gen(71);
  const int m = 10;
  const TileOperators ops(m);
  const auto tiles = all_tiles(m);
  GridFunction f(m);
  for (std::size_t b = 0; b < 64; ++b) {
    const double v = gen() % 4 == 0 ? 1.0 : 0.0;
    for (std::size_t i = 0; i < 16; ++i) f[b * 16 + i] = v;
  }
  const double lambda = 0.3;
  const LevelSets ls = level_intervals(f, lambda);
  const Classification cls = classify(tiles, f, ls, f_bad(f, lambda), 2);
  const auto sel = linearize(f, LacunarySequence(2, 9));
  const GridFunction g = GridFunction::interval_indicator(m, 0.5, 0.75);

  std::vector<std::vector<char>> unions;
  std::vector<int> first(f.size(), ls.k_max + 1);
  for (int k = 0; k <= ls.k_max; ++k) {
    std::vector<char> u(f.size(), 0);
    for (const auto& I : ls.at(k).items()) {
      for (auto y = I.sample_begin(m); y < I.sample_end(m); ++y) u[y] = 1;
    }
    for (std::size_t y = 0; y < f.size(); ++y) {
      if (u[y] && first[y] > k) first[y] = k;
    }
    unions.push_back(u);
  }
  std::vector<Complex> cluster(f.size()), p2(f.size()), p1(f.size()), resid(f.size());
  for (std::size_t t = 0; t < tiles.size(); ++t) {
    const GridFunction u = ops.apply_T_P_star(g, tiles[t], sel);
    std::set<std::pair<int, DyadicInterval>> a2, a1;
    for (const auto& l : cls.labels[t]) {
      if (l.kind == LabelKind::Cluster) {
        for (std::size_t y = 0; y < f.size(); ++y) cluster[y] += u[y];
      }
      if (l.kind == LabelKind::P2) a2.insert({l.k, l.anchor});
      if (l.kind == LabelKind::P1) a1.insert({l.k, l.anchor});
    }
    for (const auto& [k, I] : a2) {
      for (auto y = I.sample_begin(m); y < I.sample_end(m); ++y) p2[y] += u[y];
    }
    for (const auto& [k, I] : a1) {
      for (auto y = I.sample_begin(m); y < I.sample_end(m); ++y) p1[y] += u[y];
    }
    for (const auto& q : i_star(tiles[t])) {
      bool shell = false;
      for (int l = 0; l <= ls.k_max && !shell; ++l) {
        bool inside = true, misses = true;
        for (auto y = q.sample_begin(m); y < q.sample_end(m); ++y) {
          inside = inside && unions[static_cast<std::size_t>(l)][y];
          misses = misses && (l == 0 || !unions[static_cast<std::size_t>(l - 1)][y]);
        }
        shell = inside && misses;
      }
      if (!shell) continue;
      for (auto y = q.sample_begin(m); y < q.sample_end(m); ++y) resid[y] += u[y];
    }
  }
  GroupMasses want;
  for (std::size_t y = 0; y < f.size(); ++y) {
    const double w = std::abs(f[y]) / static_cast<double>(f.size());
    want.cluster += w * std::abs(cluster[y]);
    want.p2 += w * std::abs(p2[y]);
    want.p1 += w * std::abs(p1[y]);
    if (first[y] <= ls.k_max) want.residual += std::ldexp(lambda, -first[y]) * std::abs(resid[y]) / static_cast<double>(f.size());
  }
  const GroupMasses got = group_masses(ops, cls, ls, f, g, sel);
  EXPECT_NEAR(got.cluster, want.cluster, 1e-12);
  EXPECT_NEAR(got.p2, want.p2, 1e-12);
  EXPECT_NEAR(got.p1, want.p1, 1e-12);
  EXPECT_NEAR(got.residual, want.residual, 1e-12);
  EXPECT_GT(want.cluster + want.p2 + want.residual, 0.0);
}

TEST(Decompose, ZeroFunctionAndQuarterInterval) {
  ExperimentConfig cfg = parse_config(R"({"lambda": 0.25})", "decompose");
  const ReportRow zero = decomposition_report(cfg, {"zero", 1, StepFunction{"zero", {}}}, 10, nullptr);
  EXPECT_EQ(zero.value("n_P2"), 0.0);
  EXPECT_EQ(zero.value("n_P1"), 0.0);
  EXPECT_EQ(zero.value("ok_coverage"), 1.0);

  const StepFunction quarter{"quarter", {{DyadicInterval::space(2, 0), 1.0}}};
  const ReportRow row = decomposition_report(cfg, {"quarter", 1, quarter}, 10, nullptr);
  const auto tiles = all_tiles(10);
  const GridFunction f = quarter.render(10);
  const Classification cls = classify(tiles, f, 0.25, LacunarySequence(2, 9));
  std::size_t p2 = 0, resid = 0;
  for (std::size_t t = 0; t < tiles.size(); ++t) {
    p2 += cls.has(t, LabelKind::P2);
    resid += cls.has(t, LabelKind::Residual);
  }
  EXPECT_EQ(row.value("n_P2"), static_cast<double>(p2));
  EXPECT_EQ(row.value("n_residual"), static_cast<double>(resid));
  for (const auto& col : decomposition_ok_columns()) EXPECT_EQ(row.value(col), 1.0) << col;
  EXPECT_LE(row.value("multiplicity"), 14.0);
}

TEST(Report, CsvLayoutAndNumberFormat) {
  ReportRow a;
  a.experiment = "x";
  a.id = "one";
  a.set("u", 1.0 / 3.0);
  ReportRow b;
  b.experiment = "x";
  b.id = "two";
  b.set("v", 2.0);
  b.runtime = 123.0;
  const std::string csv = to_csv({a, b});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "experiment,id,seed,m,l1,linf,lambda,weak,u,v");
  EXPECT_NE(csv.find("0.333333333333,"), std::string::npos);
  EXPECT_EQ(csv.find("123"), std::string::npos);
  EXPECT_EQ(fmt_number(std::numeric_limits<double>::infinity()), "inf");
}

}  // namespace
