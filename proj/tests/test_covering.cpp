#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "lactile/lactile.hpp"

namespace {

using namespace lactile;

constexpr int kRes = 20;
constexpr std::int64_t kUnit = std::int64_t{1} << kRes;

// Center and length in units of 2^-(kRes + 1), so centers of every level up to kRes are integral.
std::int64_t center2(const DyadicInterval& j) { return (2 * j.index + 1) << (kRes - j.level); }
std::int64_t len2(const DyadicInterval& j) { return std::int64_t{2} << (kRes - j.level); }

// Two 100-dilations overlap iff their centers are closer than half the summed lengths; d <= circle / 2
// makes the far-side gap the larger one.
bool dilations_meet(const DyadicInterval& a, const DyadicInterval& b) {
  const std::int64_t circle = 2 * kUnit;
  const std::int64_t la = 100 * len2(a), lb = 100 * len2(b);
  if (la >= circle || lb >= circle) return true;
  std::int64_t d = ((center2(a) - center2(b)) % circle + circle) % circle;
  d = std::min(d, circle - d);
  return 2 * d < la + lb;
}

std::vector<DyadicInterval> random_family(std::mt19937_64& gen, int count) {
  std::vector<DyadicInterval> v;
  for (int i = 0; i < count; ++i) {
    const int lev = 4 + static_cast<int>(gen() % 14);
    v.push_back(DyadicInterval::space(lev, static_cast<std::int64_t>(gen() % (std::uint64_t{1} << lev))));
  }
  return v;
}

TEST(GreedyCover, HandSimulations) {
  EXPECT_EQ(greedy_cover({}).size(), 0u);

  const auto apart = greedy_cover({DyadicInterval::space(10, 0), DyadicInterval::space(10, 300), DyadicInterval::space(10, 600)});
  EXPECT_EQ(apart.size(), 1u);

  const auto stacked = greedy_cover({DyadicInterval::space(10, 0), DyadicInterval::space(9, 0), DyadicInterval::space(8, 0)});
  ASSERT_EQ(stacked.size(), 3u);
  EXPECT_EQ(stacked.round(0)[0], DyadicInterval::space(8, 0));
  EXPECT_EQ(stacked.round(2)[0], DyadicInterval::space(10, 0));

  const auto pair = greedy_cover({DyadicInterval::space(10, 1), DyadicInterval::space(10, 0)});
  ASSERT_EQ(pair.size(), 2u);
  EXPECT_EQ(pair.round(0)[0], DyadicInterval::space(10, 0));
  const RoundReport rep = round_ratios(pair);
  EXPECT_DOUBLE_EQ(rep.ratio[0], 0.5);
  EXPECT_DOUBLE_EQ(rep.ratio[1], 1.0);
  EXPECT_DOUBLE_EQ(rep.min_ratio, 0.5);
}

TEST(GreedyCover, WholeTorusDilationTakesOneRoundEach) {
  const auto c = greedy_cover({DyadicInterval::space(2, 0), DyadicInterval::space(2, 2)});
  EXPECT_EQ(c.size(), 2u);
  EXPECT_TRUE(rounds_well_formed(c));
}

TEST(GreedyCover, RoundsPartitionAreDisjointAndMaximal) {
  std::mt19937_64 gen(51);
  for (int trial = 0; trial < 200; ++trial) {
    const auto fam = random_family(gen, 1 + static_cast<int>(gen() % 60));
    const CoverRounds c = greedy_cover(fam);
    ASSERT_TRUE(rounds_well_formed(c));
    std::multiset<DyadicInterval> seen;
    for (std::size_t r = 0; r < c.size(); ++r) {
      const auto members = c.round(r);
      seen.insert(members.begin(), members.end());
      for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) ASSERT_FALSE(dilations_meet(members[a], members[b]));
      }
      if (r == 0) continue;
      const auto before = c.round(r - 1);
      for (const auto& j : members) {
        bool blocked = false;
        for (const auto& i : before) blocked = blocked || dilations_meet(i, j);
        ASSERT_TRUE(blocked) << j.str();
      }
    }
    EXPECT_EQ(seen, std::multiset<DyadicInterval>(fam.begin(), fam.end()));
  }
}

TEST(GreedyCover, RoundInequalityOnDisjointFamilies) {
  std::mt19937_64 gen(52);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<DyadicInterval> fam;
    std::vector<char> used(std::size_t{1} << 14, 0);
    for (int i = 0; i < 40; ++i) {
      const auto j = DyadicInterval::space(6 + static_cast<int>(gen() % 9), 0);
      const auto idx = static_cast<std::int64_t>(gen() % (std::uint64_t{1} << j.level));
      const auto cand = DyadicInterval::space(j.level, idx);
      bool clash = false;
      for (auto s = cand.sample_begin(14); s < cand.sample_end(14); ++s) clash = clash || used[s];
      if (clash) continue;
      for (auto s = cand.sample_begin(14); s < cand.sample_end(14); ++s) used[s] = 1;
      fam.push_back(cand);
    }
    const RoundReport rep = check_round_inequality(greedy_cover(fam));
    EXPECT_GE(rep.min_ratio, kRoundRatioFloor);
  }
}

TEST(UnionMeasure, MatchesSampleCount) {
  std::mt19937_64 gen(53);
  for (int trial = 0; trial < 100; ++trial) {
    auto fam = random_family(gen, 1 + static_cast<int>(gen() % 30));
    std::vector<char> mask(std::size_t{1} << 18, 0);
    for (const auto& j : fam) {
      for (auto s = j.sample_begin(18); s < j.sample_end(18); ++s) mask[s] = 1;
    }
    double count = 0.0;
    for (char c : mask) count += c;
    EXPECT_DOUBLE_EQ(union_measure(fam), count / static_cast<double>(mask.size()));
  }
}

TEST(MsumRatio, SingleIntervalAndMissedG) {
  const int m = 12;
  std::vector<char> g(std::size_t{1} << m, 0);
  g[5] = 1;
  g[900] = 1;
  EXPECT_NEAR(msum_ratio(std::vector{DyadicInterval::space(10, 1)}, g), 1.0, 1e-15);
  std::vector<char> far(std::size_t{1} << m, 0);
  far[2048] = 1;
  EXPECT_EQ(msum_ratio(std::vector{DyadicInterval::space(12, 0)}, far), 0.0);
}

TEST(MsumRatio, MatchesDirectEvaluation) {
  std::mt19937_64 gen(54);
  const int m = 12;
  const auto n = std::size_t{1} << m;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<DyadicInterval> fam;
    for (int i = 0; i < 6; ++i) {
      const int lev = 8 + static_cast<int>(gen() % 5);
      fam.push_back(DyadicInterval::space(lev, static_cast<std::int64_t>(gen() % (std::uint64_t{1} << lev))));
    }
    std::vector<char> g(n, 0);
    for (auto& v : g) v = gen() % 10 == 0;
    // Sample s lies in 100J when its distance to the center of J is below 50 |J|, boundary closed on the left.
    auto in_dilation = [&](const DyadicInterval& j, std::size_t s) {
      if (100.0 * j.length() >= 1.0) return true;
      const double c = (static_cast<double>(j.index) + 0.5) * j.length();
      const double x = static_cast<double>(s) / static_cast<double>(n);
      const double d = x - (c - 50.0 * j.length());
      return d - std::floor(d) < 100.0 * j.length();
    };
    double lhs = 0.0;
    std::vector<char> any(n, 0);
    for (const auto& j : fam) {
      double hit = 0.0;
      for (std::size_t s = 0; s < n; ++s) {
        if (!in_dilation(j, s)) continue;
        any[s] = 1;
        hit += g[s];
      }
      lhs += std::sqrt(j.length() * hit / static_cast<double>(n));
    }
    double both = 0.0;
    for (std::size_t s = 0; s < n; ++s) both += any[s] && g[s];
    const double want = both > 0 ? lhs / std::sqrt(union_measure(fam) * both / static_cast<double>(n)) : 0.0;
    EXPECT_NEAR(msum_ratio(fam, g), want, 1e-12);
  }
}

}  // namespace
