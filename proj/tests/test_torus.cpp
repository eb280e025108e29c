#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "lactile/lactile.hpp"
#include "oracles.hpp"

namespace {

using namespace lactile;
using namespace lactile::gauges;

TEST(Spectrum, ConstantIsDeltaAtZero) {
  GridFunction f(5);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 1.0;
  const Spectrum s = to_spectrum(f);
  for (std::int64_t n = s.min_frequency(); n <= s.max_frequency(); ++n) {
    EXPECT_NEAR(std::abs(s.coeff(n) - (n == 0 ? Complex(1.0) : Complex{})), 0.0, 1e-15) << n;
  }
}

TEST(Spectrum, CharacterIsDelta) {
  const Spectrum s = to_spectrum(GridFunction::character(4, 3));
  for (std::int64_t n = s.min_frequency(); n <= s.max_frequency(); ++n) {
    EXPECT_NEAR(std::abs(s.coeff(n) - (n == 3 ? Complex(1.0) : Complex{})), 0.0, 1e-14) << n;
  }
}

TEST(Spectrum, MatchesDirectSummation) {
  std::mt19937_64 gen(11);
  const GridFunction f = oracle::random_function(7, gen);
  const Spectrum s = to_spectrum(f);
  for (std::int64_t n = s.min_frequency(); n <= s.max_frequency(); ++n) {
    EXPECT_NEAR(std::abs(s.coeff(n) - oracle::coefficient(f, n)), 0.0, 1e-13);
  }
}

TEST(Spectrum, RoundTripAndParseval) {
  std::mt19937_64 gen(12);
  for (int m : {3, 8, 12}) {
    const GridFunction f = oracle::random_function(m, gen);
    const Spectrum s = to_spectrum(f);
    const GridFunction back = from_spectrum(s);
    double err = 0.0, scale = 0.0, energy_c = 0.0, energy_f = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      err = std::max(err, std::abs(back[i] - f[i]));
      scale = std::max(scale, std::abs(f[i]));
      energy_f += std::norm(f[i]);
    }
    for (const auto& c : s.raw()) energy_c += std::norm(c);
    energy_f /= static_cast<double>(f.size());
    EXPECT_LE(err / scale, 1e-12);
    EXPECT_NEAR(energy_c / energy_f, 1.0, 1e-10);
  }
}

TEST(Spectrum, SizeMismatchIsConfigError) {
  Spectrum s(4);
  EXPECT_THROW(GridFunction(4, std::vector<Complex>(15)), ConfigError);
  EXPECT_THROW(s.coeff(8), FrequencyOverflow);
}

TEST(PartialSum, CutoffExamples) {
  const GridFunction e3 = GridFunction::character(6, 3);
  EXPECT_LE(oracle::max_abs_diff(partial_sum(e3, 4), e3), 1e-13);
  const GridFunction e5 = GridFunction::character(6, 5);
  EXPECT_LE(oracle::max_abs_diff(partial_sum(e5, 4), GridFunction(6)), 1e-13);
}

TEST(PartialSum, HalfIntervalOnSmallGrid) {
  const GridFunction f = GridFunction::interval_indicator(3, 0.0, 0.5);
  EXPECT_LE(oracle::max_abs_diff(partial_sum(f, 1), oracle::partial_sum(f, 1)), 1e-13);
}

TEST(PartialSum, ProjectionLawAndOverflow) {
  std::mt19937_64 gen(13);
  const GridFunction f = oracle::random_function(8, gen);
  for (std::int64_t n : {0, 3, 17, 100}) {
    for (std::int64_t np : {n, n + 1, std::int64_t{127}}) {
      EXPECT_LE(oracle::max_abs_diff(partial_sum(partial_sum(f, np), n), partial_sum(f, n)), 1e-12);
    }
  }
  EXPECT_THROW(partial_sum(f, 128), FrequencyOverflow);
}

TEST(LacunaryMaximal, Examples) {
  const LacunarySequence seq(2, 2);  // {1, 2}
  const GridFunction f = GridFunction::character(6, 2);
  const GridFunction s = lacunary_maximal(f, seq);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(s[i].real(), 1.0, 1e-13);
  const GridFunction z = lacunary_maximal(GridFunction(6), seq);
  for (std::size_t i = 0; i < z.size(); ++i) EXPECT_EQ(z[i], Complex{});
  const FrequencySelector sel = linearize(f, seq);
  for (auto n : sel.freq) EXPECT_EQ(n, 2);
  const FrequencySelector sel0 = linearize(GridFunction(6), seq);
  for (auto n : sel0.freq) EXPECT_EQ(n, 1);
}

TEST(LacunaryMaximal, MatchesExplicitPartialSums) {
  std::mt19937_64 gen(14);
  const int m = 8;
  const LacunarySequence seq(2, 5);
  const GridFunction f = oracle::random_function(m, gen);
  std::vector<GridFunction> sums;
  for (auto n : seq.values()) sums.push_back(oracle::partial_sum(f, n));
  const GridFunction s = lacunary_maximal(f, seq);
  const FrequencySelector sel = linearize(f, seq);
  for (std::size_t i = 0; i < f.size(); ++i) {
    double best = -1.0;
    std::int64_t arg = 0;
    for (int j = 0; j < seq.count(); ++j) {
      const double v = std::abs(sums[static_cast<std::size_t>(j)][i]);
      if (v > best + 1e-12) {
        best = v;
        arg = seq[j];
      }
    }
    EXPECT_NEAR(s[i].real(), best, 1e-12);
    EXPECT_EQ(s[i].imag(), 0.0);
    EXPECT_EQ(sel[i], arg) << i;
  }
}

TEST(LacunaryMaximal, MonotoneInTheSequence) {
  std::mt19937_64 gen(15);
  const GridFunction f = oracle::random_function(10, gen);
  const GridFunction a = lacunary_maximal(f, LacunarySequence(2, 6));
  const GridFunction b = lacunary_maximal(f, LacunarySequence(2, 9));
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_LE(a[i].real(), b[i].real());
}

TEST(CarlesonMaximal, DominatesLacunaryAndMatchesBruteForce) {
  std::mt19937_64 gen(16);
  const int m = 7;
  const LacunarySequence seq(2, 6);
  const GridFunction f = oracle::random_function(m, gen);
  const GridFunction full = carleson_maximal(f, seq);
  const GridFunction lac = lacunary_maximal(f, seq);
  std::vector<double> brute(f.size(), 0.0);
  for (std::int64_t n = 0; n < 64; ++n) {
    const GridFunction s = oracle::partial_sum(f, n);
    for (std::size_t i = 0; i < f.size(); ++i) brute[i] = std::max(brute[i], std::abs(s[i]));
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_LE(lac[i].real(), full[i].real());
    EXPECT_NEAR(full[i].real(), brute[i], 1e-11);
  }
}

TEST(WeakL1, Examples) {
  // (4, 2, 1, 1) with every sample doubled, since grids start at N = 8.
  GridFunction g(3);
  const double v[] = {4.0, 2.0, 1.0, 1.0};
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = v[i / 2];
  EXPECT_DOUBLE_EQ(weak_l1_norm(g), 1.0);
  EXPECT_DOUBLE_EQ(weak_l1_norm(GridFunction::interval_indicator(6, 0.25, 0.5)), 0.25);
  GridFunction c(5);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.7;
  EXPECT_DOUBLE_EQ(weak_l1_norm(c), 0.7);
}

TEST(WeakL1, ThresholdEnumerationAndChebyshev) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 20; ++trial) {
    const GridFunction g = oracle::random_function(6, gen);
    double best = 0.0;
    for (std::size_t t = 0; t < g.size(); ++t) {
      const double lam = std::abs(g[t]);
      std::size_t count = 0;
      for (std::size_t i = 0; i < g.size(); ++i) count += std::abs(g[i]) >= lam ? 1 : 0;
      best = std::max(best, lam * static_cast<double>(count) / static_cast<double>(g.size()));
    }
    EXPECT_NEAR(weak_l1_norm(g), best, 1e-14);
    EXPECT_LE(weak_l1_norm(g), lp_norm(g, 1.0) + 1e-15);
  }
}

TEST(Orlicz, ClosedForms) {
  GridFunction one(6);
  for (std::size_t i = 0; i < one.size(); ++i) one[i] = 1.0;
  EXPECT_NEAR(orlicz_norm(one, exp_l2()), 1.0 / std::sqrt(std::numbers::ln2), 1e-8);
  EXPECT_NEAR(orlicz_norm(one, l1()), 1.0, 1e-8);
  EXPECT_EQ(orlicz_norm(GridFunction(6), exp_l2()), 0.0);
}

TEST(Orlicz, L1GaugeIsTheMeanAndScalingHolds) {
  std::mt19937_64 gen(18);
  const GridFunction f = oracle::random_function(8, gen);
  EXPECT_NEAR(orlicz_norm(f, l1()) / lp_norm(f, 1.0), 1.0, 1e-8);
  EXPECT_NEAR(orlicz_norm(f, lp(2.0)) / lp_norm(f, 2.0), 1.0, 1e-8);
  for (const auto& g : {exp_l2(), l_log_l(0.5), l_log_l(1.0), l_loglog_l(), l_loglog_logloglog_l()}) {
    const double a = orlicz_norm(f, g);
    const double b = orlicz_norm(3.5 * f, g);
    EXPECT_NEAR(b / (3.5 * a), 1.0, 1e-8) << g.name;
  }
}

TEST(Orlicz, GaugesAreValid) {
  const std::vector<double> pts{0.0, 1e-3, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0};
  for (const auto& g : {l1(), lp(3.0), exp_l2(), l_log_l(0.5), l_log_l(1.0), l_loglog_l(), l_loglog_logloglog_l()}) {
    EXPECT_TRUE(gauge_is_valid(g, pts)) << g.name;
  }
  EXPECT_FALSE(gauge_is_valid({"flat", [](double) { return 0.0; }}, pts));
}

TEST(Orlicz, DegenerateGaugeRaises) {
  GridFunction one(4);
  for (std::size_t i = 0; i < one.size(); ++i) one[i] = 1.0;
  EXPECT_THROW(orlicz_norm(one, {"const", [](double t) { return t > 0 ? 2.0 : 0.0; }}), GaugeError);
}

TEST(Lp, Examples) {
  for (double p : {1.0, 2.0, 3.5}) EXPECT_NEAR(lp_norm(GridFunction::character(7, 5), p), 1.0, 1e-13);
  EXPECT_NEAR(lp_norm(GridFunction::character(7, 5), INFINITY), 1.0, 1e-13);
  EXPECT_DOUBLE_EQ(lp_norm(GridFunction::interval_indicator(7, 0.0, 0.125), 1.0), 0.125);
  EXPECT_THROW(lp_norm(GridFunction(4), 0.5), ConfigError);
}

TEST(LacunarySequence, Values) {
  const LacunarySequence s(3, 5);
  EXPECT_EQ(s.count(), 5);
  EXPECT_EQ(s[0], 1);
  EXPECT_EQ(s[4], 81);
  EXPECT_THROW(LacunarySequence(1, 4), ConfigError);
}

}  // namespace
