#pragma once

// Command-line front end. Exit codes: 0 all checks pass, 1 a check or an
// invariant failed, 2 the configuration or the command line is invalid.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <thread>
#include <utility>

#include <CLI11.hpp>

#include "lactile/error.hpp"
#include "lactile/harness/config.hpp"
#include "lactile/harness/experiments.hpp"
#include "lactile/harness/report.hpp"

namespace lactile::harness {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;

inline unsigned default_threads() {
  if (const char* env = std::getenv("LACTILE_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline RunResult dispatch(const std::string& command, const ExperimentConfig& cfg, const RunOptions& opt) {
  if (command == "sweep") return run_sweep(cfg, opt);
  if (command == "props") return run_props(cfg, opt);
  if (command == "decompose") return run_decompose(cfg, opt);
  if (command == "cover-stress") return run_cover_stress(cfg, opt);
  if (command == "ineq") return run_ineq(cfg, opt);
  if (command == "verify") return run_verify(cfg, opt);
  throw ConfigError("unknown command " + command);
}

inline int run_cli(int argc, char** argv) {
  CLI::App app{"lacunary tile harness"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string out_dir = "out";
  unsigned threads = default_threads();
  long long seed = -1;
  bool svg = false;
  const std::pair<const char*, const char*> commands[] = {
      {"sweep", "weak-L1 ratio of the lacunary maximal function on a test family"},
      {"props", "grouped dual terms of the tile decomposition over their bound shapes"},
      {"decompose", "tile classification counts and level-set invariants"},
      {"cover-stress", "greedy dilation covering on random interval families"},
      {"ineq", "lacunary inequality corpus at m and m + 2"},
      {"verify", "reduced pass over every invariant"}};
  for (const auto& [name, about] : commands) {
    auto* sub = app.add_subcommand(name, about);
    sub->add_option("-c,--config", config_path, "JSON config file; omitted fields take defaults");
    sub->add_option("-o,--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("-t,--threads", threads, "worker threads (env LACTILE_THREADS)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "override the config seed")->check(CLI::NonNegativeNumber);
    sub->add_flag("--svg", svg, "also write an SVG plot");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    ExperimentConfig cfg = load_config(config_path, command);
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    const auto t0 = std::chrono::steady_clock::now();
    const RunResult r = dispatch(command, cfg, {threads});
    const double elapsed = seconds_since(t0);
    write_outputs(r, out_dir, svg);
    for (const auto& c : r.checks) {
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ' ' << fmt_number(c.value) << ' ' << c.relation << ' '
                << fmt_number(c.limit) << '\n';
    }
    std::cout << command << ": " << r.rows.size() << " rows, " << (r.passed() ? "all checks pass" : "checks failed")
              << ", " << fmt_number(elapsed) << " s\n";
    return r.passed() ? kExitPass : kExitFail;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return kExitFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
}

}  // namespace lactile::harness
