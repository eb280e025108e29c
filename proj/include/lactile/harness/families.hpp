#pragma once

// Test functions described at a fixed dyadic resolution, so rendering the
// same description on a finer grid gives the same function.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lactile/dyadic.hpp"
#include "lactile/grid.hpp"
#include "lactile/harness/config.hpp"
#include "lactile/harness/rng.hpp"

namespace lactile::harness {

/// f = sum of value * 1_I over disjoint dyadic pieces.
struct StepFunction {
  std::string kind;
  std::vector<std::pair<DyadicInterval, double>> pieces;

  bool is_indicator() const {
    return std::all_of(pieces.begin(), pieces.end(), [](const auto& p) { return p.second == 1.0; });
  }

  GridFunction render(int m) const {
    GridFunction f(m);
    for (const auto& [I, v] : pieces) {
      lactile::detail::require(I.level <= m, "StepFunction: piece finer than the grid");
      for (auto i = I.sample_begin(m); i < I.sample_end(m); ++i) f[i] += v;
    }
    return f;
  }
};

struct Instance {
  std::string id;
  std::uint64_t seed = 0;
  StepFunction f;
};

inline StepFunction dyadic_indicator(int s) {
  return {"dyadic_indicator", {{DyadicInterval::space(s, 0), 1.0}}};
}

inline StepFunction indicator_union(Rng& rng, int level, double density) {
  StepFunction f{"indicator_union", {}};
  const std::int64_t count = std::int64_t{1} << level;
  for (std::int64_t i = 0; i < count; ++i) {
    if (rng.chance(density)) f.pieces.emplace_back(DyadicInterval::space(level, i), 1.0);
  }
  if (f.pieces.empty()) f.pieces.emplace_back(DyadicInterval::space(level, static_cast<std::int64_t>(rng.below(count))), 1.0);
  return f;
}

/// Values uniform in [-1, 1] on each piece of the given level.
inline StepFunction bounded_step(Rng& rng, int level) {
  StepFunction f{"bounded", {}};
  const std::int64_t count = std::int64_t{1} << level;
  for (std::int64_t i = 0; i < count; ++i) f.pieces.emplace_back(DyadicInterval::space(level, i), rng.uniform(-1.0, 1.0));
  return f;
}

/// `count` distinct narrow pieces of height in [2^{w/2-1}, 2^{w/2}].
inline StepFunction spikes(Rng& rng, int width_level, int count) {
  StepFunction f{"spikes", {}};
  const std::int64_t slots = std::int64_t{1} << width_level;
  std::vector<std::int64_t> used;
  const double top = std::ldexp(1.0, width_level / 2);
  for (int c = 0; c < count && static_cast<std::int64_t>(used.size()) < slots; ++c) {
    std::int64_t idx = 0;
    do {
      idx = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(slots)));
    } while (std::find(used.begin(), used.end(), idx) != used.end());
    used.push_back(idx);
    f.pieces.emplace_back(DyadicInterval::space(width_level, idx), top * rng.uniform(0.5, 1.0));
  }
  return f;
}

inline StepFunction draw(const FamilySpec& spec, const std::string& kind, Rng& rng) {
  if (kind == "indicator_unions") return indicator_union(rng, spec.level, spec.density);
  if (kind == "bounded") return bounded_step(rng, spec.level);
  if (kind == "spikes") return spikes(rng, spec.width_level, spec.count);
  throw ConfigError("family: cannot draw kind " + kind);
}

/// Instance i of a random family uses seed cfg.seed + i.
inline std::vector<Instance> make_instances(const ExperimentConfig& cfg) {
  std::vector<Instance> out;
  const auto& spec = cfg.family;
  if (spec.kind == "dyadic_indicators") {
    for (int s = spec.s_min; s <= spec.s_max; ++s) {
      out.push_back({"s=" + std::to_string(s), cfg.seed, dyadic_indicator(s)});
    }
    return out;
  }
  static const char* cycle[] = {"indicator_unions", "bounded", "spikes"};
  for (int i = 0; i < cfg.instances; ++i) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i);
    Rng rng(seed);
    const std::string kind = spec.kind == "mixed" ? cycle[i % 3] : spec.kind;
    out.push_back({kind + "#" + std::to_string(i), seed, draw(spec, kind, rng)});
  }
  return out;
}

}  // namespace lactile::harness
