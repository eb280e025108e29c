#pragma once

// Experiment configuration: JSON text, every field optional, every seed
// explicit. Defaults depend on the subcommand.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lactile/error.hpp"

namespace lactile::harness {

inline constexpr int kMaxDeskScale = 18;
inline constexpr int kConfigSchema = 1;

/// Test-function family. Random families are drawn at dyadic level `level`
/// (or `width_level` for spikes), so a refined grid sees the same function.
struct FamilySpec {
  std::string kind = "dyadic_indicators";  // dyadic_indicators | indicator_unions | bounded | spikes | mixed
  int s_min = 1;
  int s_max = 10;
  int level = 8;
  double density = 0.3;
  int count = 4;
  int width_level = 11;
};

struct CoverSpec {
  int families = 10000;
  int max_intervals = 512;
  int grid = 14;
};

struct IneqSpec {
  int m = 14;
  int instances = 32;
  int J = 12;
  std::vector<int> p{4, 6, 8};
  std::vector<double> alphas{0.5, 1.0};
  int level = 8;
};

struct ExperimentConfig {
  std::string command;
  int m = 14;
  std::int64_t alpha = 2;
  int J = 12;
  std::uint64_t seed = 1;
  int instances = 20;
  bool refine = false;
  FamilySpec family;
  std::string lambda = "ratio";  // ratio | random | a number in (0, 1)
  std::string gbar = "alternate";  // extremal | random | alternate
  int lemma1_families = 16;
  CoverSpec cover;
  IneqSpec ineq;

  double fixed_lambda() const { return std::stod(lambda); }
  bool lambda_is_fixed() const { return lambda != "ratio" && lambda != "random"; }
};

inline ExperimentConfig defaults_for(const std::string& command) {
  ExperimentConfig c;
  c.command = command;
  if (command == "sweep") {
    c.m = 14;
    c.refine = true;
    c.instances = 0;
  } else if (command == "props") {
    c.m = 12;
    c.J = 11;
    c.instances = 20;
    c.family.kind = "indicator_unions";
    c.family.density = 0.03;
  } else if (command == "decompose") {
    c.m = 10;
    c.J = 9;
    c.instances = 50;
    c.family.kind = "mixed";
    c.family.level = 7;
    c.family.width_level = 9;
    c.lambda = "random";
  } else if (command == "cover-stress") {
    c.instances = 0;
  } else if (command == "ineq") {
    c.instances = 0;
  } else if (command == "verify") {
    c.m = 12;
    c.J = 11;
    c.instances = 4;
    c.family.kind = "indicator_unions";
    c.cover.families = 200;
    c.ineq.m = 13;
    c.ineq.instances = 4;
    c.lemma1_families = 4;
  }
  return c;
}

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError("config: " + where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError("config: unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline void validate(const ExperimentConfig& c) {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
  };
  need(c.m >= 10 && c.m <= kMaxDeskScale, "m must lie in [10, 18]");
  need(!c.refine || c.m + 2 <= kMaxDeskScale, "refine needs m + 2 <= 18");
  need(c.alpha >= 2, "alpha must be >= 2");
  need(c.J >= 1 && c.J <= 40, "J must lie in [1, 40]");
  double top = std::pow(static_cast<double>(c.alpha), c.J - 1);
  need(top < std::ldexp(1.0, c.m - 1), "alpha^(J-1) must stay below N/2");
  need(c.instances >= 0, "instances must be >= 0");
  const auto& f = c.family;
  static const std::set<std::string> kinds{"dyadic_indicators", "indicator_unions", "bounded", "spikes", "mixed"};
  need(kinds.count(f.kind) == 1, "unknown family kind '" + f.kind + "'");
  // Only the fields the chosen kind draws from are bounded by the grid.
  const bool dyadic = f.kind == "dyadic_indicators";
  const bool uses_spikes = f.kind == "spikes" || f.kind == "mixed";
  need(!dyadic || (f.s_min >= 0 && f.s_min <= f.s_max && f.s_max <= c.m), "need 0 <= s_min <= s_max <= m");
  need(dyadic || (f.level >= 1 && f.level <= c.m), "family level must lie in [1, m]");
  need(!uses_spikes || (f.width_level >= 1 && f.width_level <= c.m), "family width_level must lie in [1, m]");
  need(f.density > 0.0 && f.density <= 1.0, "family density must lie in (0, 1]");
  need(f.count >= 1, "family count must be >= 1");
  if (c.lambda_is_fixed()) {
    double v = 0.0;
    try {
      v = c.fixed_lambda();
    } catch (const std::exception&) {
      throw ConfigError("config: lambda must be 'ratio', 'random' or a number");
    }
    need(v > 0.0 && v < 1.0, "lambda must lie in (0, 1)");
  }
  need(c.gbar == "extremal" || c.gbar == "random" || c.gbar == "alternate", "gbar must be extremal, random or alternate");
  need(c.lemma1_families >= 0, "lemma1_families must be >= 0");
  need(c.cover.families >= 0, "cover.families must be >= 0");
  need(c.cover.max_intervals >= 1 && c.cover.max_intervals <= 4096, "cover.max_intervals must lie in [1, 4096]");
  need(c.cover.grid >= 4 && c.cover.grid <= 20, "cover.grid must lie in [4, 20]");
  const auto& q = c.ineq;
  need(q.m >= 4 && q.m + 2 <= 20, "ineq.m must lie in [4, 18]");
  need(q.J >= 1 && q.J <= 40 && std::ldexp(1.0, q.J - 1) < std::ldexp(1.0, q.m - 1), "ineq.J needs 2^(J-1) < N/2");
  need(q.instances >= 0, "ineq.instances must be >= 0");
  need(q.level >= 1 && q.level <= q.m, "ineq.level must lie in [1, ineq.m]");
  for (int p : q.p) need(p >= 2 && p % 2 == 0, "ineq.p entries must be even and >= 2");
  for (double a : q.alphas) need(a > 0.0, "ineq.alphas entries must be positive");
}

/// Parses JSON text over the defaults of `command`; an empty text keeps the defaults.
inline ExperimentConfig parse_config(const std::string& text, const std::string& command) {
  using nlohmann::json;
  ExperimentConfig c = defaults_for(command);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    validate(c);
    return c;
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  detail::reject_unknown(j, {"schema", "m", "alpha", "J", "seed", "instances", "refine", "family", "lambda", "gbar",
                             "lemma1_families", "cover", "ineq"},
                         "config");
  int schema = kConfigSchema;
  detail::read(j, "schema", schema);
  if (schema != kConfigSchema) throw ConfigError("config: unsupported schema " + std::to_string(schema));
  detail::read(j, "m", c.m);
  detail::read(j, "alpha", c.alpha);
  detail::read(j, "J", c.J);
  detail::read(j, "seed", c.seed);
  detail::read(j, "instances", c.instances);
  detail::read(j, "refine", c.refine);
  detail::read(j, "gbar", c.gbar);
  detail::read(j, "lemma1_families", c.lemma1_families);
  if (j.contains("lambda")) {
    const auto& l = j.at("lambda");
    if (l.is_number()) {
      std::ostringstream os;
      os.precision(17);
      os << l.get<double>();
      c.lambda = os.str();
    } else if (l.is_string()) {
      c.lambda = l.get<std::string>();
    } else {
      throw ConfigError("config: lambda must be a string or a number");
    }
  }
  if (j.contains("family")) {
    const auto& f = j.at("family");
    detail::reject_unknown(f, {"kind", "s_min", "s_max", "level", "density", "count", "width_level"}, "family");
    detail::read(f, "kind", c.family.kind);
    detail::read(f, "s_min", c.family.s_min);
    detail::read(f, "s_max", c.family.s_max);
    detail::read(f, "level", c.family.level);
    detail::read(f, "density", c.family.density);
    detail::read(f, "count", c.family.count);
    detail::read(f, "width_level", c.family.width_level);
  }
  if (j.contains("cover")) {
    const auto& v = j.at("cover");
    detail::reject_unknown(v, {"families", "max_intervals", "grid"}, "cover");
    detail::read(v, "families", c.cover.families);
    detail::read(v, "max_intervals", c.cover.max_intervals);
    detail::read(v, "grid", c.cover.grid);
  }
  if (j.contains("ineq")) {
    const auto& v = j.at("ineq");
    detail::reject_unknown(v, {"m", "instances", "J", "p", "alphas", "level"}, "ineq");
    detail::read(v, "m", c.ineq.m);
    detail::read(v, "instances", c.ineq.instances);
    detail::read(v, "J", c.ineq.J);
    detail::read(v, "p", c.ineq.p);
    detail::read(v, "alphas", c.ineq.alphas);
    detail::read(v, "level", c.ineq.level);
  }
  validate(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path, const std::string& command) {
  if (path.empty()) return parse_config("", command);
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), command);
}

}  // namespace lactile::harness
