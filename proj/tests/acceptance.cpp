// One PASS/FAIL line per acceptance criterion; exit status 0 only when all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lactile/harness/experiments.hpp"
#include "lactile/harness/report.hpp"
#include "lactile/lactile.hpp"

namespace {

using namespace lactile;
using namespace lactile::harness;
namespace fs = std::filesystem;

// Tolerances and runtime budgets (seconds).
constexpr double kTelescopeTol = 1e-8;
constexpr double kDiscretTol = 1e-10;
constexpr double kAdjointTol = 1e-10;
constexpr double kRefineTol = 0.15;
constexpr double kKhinchinTol = 1e-12;
constexpr double kZygmundTol = 1e-6;
constexpr double kIneqDrift = 0.10;
constexpr double kBudget1 = 1.0, kBudget2 = 120.0, kBudget3 = 60.0, kBudget4 = 600.0, kBudget5 = 300.0,
                 kBudget6 = 900.0, kBudget7 = 1800.0, kBudget8 = 600.0;

int failures = 0;

void report(int id, bool pass, const std::string& what, double seconds) {
  std::printf("%s %d %s [%.3g s]\n", pass ? "PASS" : "FAIL", id, what.c_str(), seconds);
  std::fflush(stdout);
  failures += pass ? 0 : 1;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const { return seconds_since(t0); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json load_baseline() {
  std::ifstream in(LACTILE_BASELINE);
  if (!in) throw ConfigError(std::string("cannot open baseline ") + LACTILE_BASELINE);
  return nlohmann::json::parse(in);
}

double summary(const RunResult& r, const std::string& key) { return r.summary.at(key).get<double>(); }

void criterion1() {
  Timer t;
  const double err = kernel_telescoping_error(14);
  const double s = t.seconds();
  report(1, err <= kTelescopeTol && s < kBudget1, "kernel telescoping m=14: max error " + fmt_number(err) + " <= 1e-08", s);
}

void criterion2() {
  Timer t;
  const TileOperators ops(12);
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) worst = std::max(worst, discret_identity_error(ops, seed));
  const double s = t.seconds();
  report(2, worst <= kDiscretTol && s < kBudget2,
         "tile pieces sum to T on 20 instances at m=12: max relative error " + fmt_number(worst) + " <= 1e-10", s);
}

void criterion3() {
  Timer t;
  const double err = adjointness_error(TileOperators(12), 1000, 1000);
  const double s = t.seconds();
  report(3, err <= kAdjointTol && s < kBudget3,
         "adjointness over 1000 random (P, f, g) at m=12: max error " + fmt_number(err) + " <= 1e-10 ||f|| ||g||", s);
}

void criterion4() {
  Timer t;
  const RunResult r = run_decompose(parse_config("", "decompose"));
  const double s = t.seconds();
  report(4, r.passed() && r.rows.size() == 50 && s < kBudget4,
         "classification on " + std::to_string(r.rows.size()) + " configurations at m=10: coverage, shells, max multiplicity " +
             fmt_number(summary(r, "max_multiplicity")) + " <= 14",
         s);
}

void criterion5(const nlohmann::json& base) {
  Timer t;
  const RunResult r = run_cover_stress(parse_config("", "cover-stress"));
  const double s = t.seconds();
  const double msum = summary(r, "C_msum");
  const double frozen = base.at("cover").at("C_msum").get<double>();
  report(5, r.passed() && r.rows.size() == 10000 && msum <= frozen && s < kBudget5,
         "greedy covering on 10000 families: min round ratio " + fmt_number(summary(r, "min_round_ratio")) +
             " >= 1/500, C_msum " + fmt_number(msum) + " <= frozen " + fmt_number(frozen) + " <= 500",
         s);
}

void criterion6(const nlohmann::json& base) {
  Timer t;
  const RunResult r = run_sweep(parse_config("", "sweep"));
  const double s = t.seconds();
  const double frozen = base.at("sweep").at("C_main").get<double>();
  const double coarse = summary(r, "C_main");
  const double fine = summary(r, "C_main_refined");
  const bool ok = r.passed() && coarse <= frozen && fine <= frozen && std::abs(fine - frozen) <= kRefineTol * frozen &&
                  std::abs(coarse - frozen) <= kRefineTol * frozen;
  report(6, ok && s < kBudget6,
         "sweep s=1..10: C_main " + fmt_number(coarse) + " (m=14), " + fmt_number(fine) + " (m=16) within 15% of frozen " +
             fmt_number(frozen) + ", lacunary <= full pointwise",
         s);
}

void criterion7(const nlohmann::json& base) {
  Timer t;
  const RunResult r = run_props(parse_config("", "props"));
  const double s = t.seconds();
  bool ok = r.passed() && r.rows.size() == 20;
  std::string worst;
  for (const auto& col : prop_ratio_columns()) {
    const double v = summary(r, col);
    const double cap = base.at("props").at(col).get<double>();
    if (!(v <= cap)) {
      ok = false;
      worst += " " + col + "=" + fmt_number(v) + ">" + fmt_number(cap);
    }
  }
  report(7, ok && s < kBudget7,
         "grouped dual terms on 20 instances at m=12: cluster " + fmt_number(summary(r, "r_cluster_Gbar")) + ", zyg " +
             fmt_number(summary(r, "r_zyg_Gbar")) + ", p1 " + fmt_number(summary(r, "r_p1_Gbar")) + ", resid " +
             fmt_number(summary(r, "r_resid_Gbar")) + " <= frozen caps" + worst,
         s);
}

void criterion8() {
  Timer t;
  const RunResult r = run_ineq(parse_config("", "ineq"));
  const double s = t.seconds();
  double khinchin = 0.0, zygmund = 0.0, drift = 0.0;
  for (const auto& c : r.checks) {
    if (c.name == "ineq.khinchin_p2_exact") khinchin = c.value;
    if (c.name == "ineq.zygmund_single") zygmund = c.value;
    if (c.name.ends_with("_drift")) drift = std::max(drift, c.value);
  }
  const bool ok = r.passed() && khinchin <= kKhinchinTol && zygmund <= kZygmundTol && drift <= kIneqDrift;
  report(8, ok && s < kBudget8,
         "inequality corpus: khinchin p=2 error " + fmt_number(khinchin) + ", zygmund single error " + fmt_number(zygmund) +
             ", max drift m->m+2 " + fmt_number(drift) + " <= 0.1",
         s);
}

void criterion9() {
  Timer t;
  const fs::path root = fs::temp_directory_path() / "lactile_acceptance";
  fs::remove_all(root);
  const ExperimentConfig cfg = parse_config("", "verify");
  write_outputs(run_verify(cfg), root / "a", true);
  write_outputs(run_verify(cfg), root / "b", true);
  bool same = true;
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(root / "a")) {
    ++files;
    same = same && slurp(e.path()) == slurp(root / "b" / e.path().filename());
  }
  report(9, same && files >= 3, "two verify runs: " + std::to_string(files) + " output files byte-identical", t.seconds());
}

}  // namespace

int main() {
  try {
    const auto base = load_baseline();
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5(base);
    criterion6(base);
    criterion7(base);
    criterion8();
    criterion9();
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
