// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "genlog/error.hpp"
#include "genlog/validate.hpp"
#include "oracles/oracles.hpp"

using namespace genlog;

namespace {

std::vector<double> random_series(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> d(-10, 10);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST(Dtw, SelfDistanceIsZeroWithDiagonalPath) {
  const std::vector<double> s{1.5, -2, 3, 3, 0.25};
  const DtwResult r = dtw(s, s);
  EXPECT_EQ(r.distance, 0.0);
  ASSERT_EQ(r.path.size(), s.size());
  for (std::size_t k = 0; k < s.size(); ++k) EXPECT_EQ(r.path[k], std::make_pair(k, k));
}

TEST(Dtw, RepeatedSampleIsFree) {
  const std::vector<double> a{1, 2, 3}, b{1, 2, 2, 3};
  EXPECT_EQ(dtw(a, b).distance, 0.0);
  EXPECT_EQ(dtw(b, a).distance, 0.0);
}

TEST(Dtw, HandExamples) {
  EXPECT_EQ(dtw(std::vector<double>{0}, std::vector<double>{3}).distance, 3.0);
  EXPECT_EQ(dtw(std::vector<double>{0, 0}, std::vector<double>{1}).distance, 2.0);
  // Aligning 5 with both 4 and 6 beats skipping either.
  EXPECT_EQ(dtw(std::vector<double>{1, 5}, std::vector<double>{1, 4, 6}).distance, 2.0);
}

TEST(Dtw, TieBreakPrefersDiagonal) {
  const std::vector<double> z{0, 0, 0};
  const DtwResult r = dtw(z, z);
  EXPECT_EQ(r.path.size(), 3u);
  // Zero costs everywhere: diagonal first, then left on the short side.
  const DtwResult r2 = dtw(std::vector<double>{0, 0}, std::vector<double>{0, 0, 0});
  const std::vector<std::pair<std::size_t, std::size_t>> want{{0, 0}, {0, 1}, {1, 2}};
  EXPECT_EQ(r2.path, want);
}

TEST(Dtw, MatchesExhaustiveSearch) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 400; ++trial) {
    const auto a = random_series(rng, 1 + rng() % 8);
    const auto b = random_series(rng, 1 + rng() % 8);
    EXPECT_EQ(dtw(a, b).distance, oracle::dtw_bruteforce(a, b)) << trial;
  }
}

TEST(Dtw, SymmetricAndPathConsistent) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_series(rng, 1 + rng() % 40);
    const auto b = random_series(rng, 1 + rng() % 40);
    const DtwResult r = dtw(a, b);
    EXPECT_NEAR(r.distance, dtw(b, a).distance, 1e-9 * (1 + r.distance));
    ASSERT_FALSE(r.path.empty());
    EXPECT_EQ(r.path.front(), (std::pair<std::size_t, std::size_t>{0, 0}));
    EXPECT_EQ(r.path.back(), std::make_pair(a.size() - 1, b.size() - 1));
    double sum = 0.0;
    for (std::size_t k = 0; k < r.path.size(); ++k) {
      sum += std::fabs(a[r.path[k].first] - b[r.path[k].second]);
      if (k == 0) continue;
      const auto di = r.path[k].first - r.path[k - 1].first;
      const auto dj = r.path[k].second - r.path[k - 1].second;
      EXPECT_TRUE(di <= 1 && dj <= 1 && di + dj >= 1);
    }
    EXPECT_EQ(sum, r.distance);
  }
}

TEST(Dtw, EmptyInputsThrow) {
  const std::vector<double> e, one{1};
  EXPECT_THROW(dtw(e, one), Error);
  EXPECT_THROW(dtw(one, e), Error);
}

TEST(SeriesStats, Examples) {
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  const SeriesStats s = series_stats(v);
  EXPECT_EQ(s.mean, 5.0);
  EXPECT_EQ(s.variance, 4.0);
  EXPECT_EQ(s.stddev, 2.0);
  EXPECT_EQ(s.min, 2.0);
  EXPECT_EQ(s.max, 9.0);
  const SeriesStats c = series_stats(std::vector<double>{3.5});
  EXPECT_EQ(c.variance, 0.0);
  EXPECT_EQ(c.min, c.max);
  EXPECT_THROW(series_stats(std::vector<double>{}), Error);
}

TEST(Envelope, Examples) {
  const std::vector<std::vector<double>> c{{1, 10}, {2, 20}, {3, 30}, {4, 40}, {5, 50}};
  const Envelope e = envelope(c);
  ASSERT_EQ(e.length(), 2u);
  EXPECT_EQ(e.min[0], 1.0);
  EXPECT_EQ(e.q25[0], 2.0);
  EXPECT_EQ(e.median[0], 3.0);
  EXPECT_EQ(e.q75[0], 4.0);
  EXPECT_EQ(e.max[1], 50.0);
  const std::vector<std::vector<double>> four{{1}, {2}, {3}, {4}};
  const Envelope f = envelope(four);
  EXPECT_EQ(f.q25[0], 1.75);
  EXPECT_EQ(f.median[0], 2.5);
  EXPECT_EQ(f.q75[0], 3.25);
}

TEST(Envelope, SingleSeriesCollapses) {
  const std::vector<std::vector<double>> one{{1, -2, 3}};
  const Envelope e = envelope(one);
  EXPECT_EQ(e.min, one[0]);
  EXPECT_EQ(e.q25, one[0]);
  EXPECT_EQ(e.median, one[0]);
  EXPECT_EQ(e.max, one[0]);
}

TEST(Envelope, MatchesSortOracleAndIsMonotone) {
  std::mt19937_64 rng(33);
  std::vector<std::vector<double>> c;
  for (int s = 0; s < 100; ++s) c.push_back(random_series(rng, 64));
  const Envelope e = envelope(c);
  for (std::size_t t = 0; t < 64; ++t) {
    std::vector<double> col;
    for (const auto& s : c) col.push_back(s[t]);
    EXPECT_EQ(e.min[t], oracle::quantile7(col, 0.0));
    EXPECT_NEAR(e.q25[t], oracle::quantile7(col, 0.25), 1e-12);
    EXPECT_NEAR(e.median[t], oracle::quantile7(col, 0.5), 1e-12);
    EXPECT_NEAR(e.q75[t], oracle::quantile7(col, 0.75), 1e-12);
    EXPECT_EQ(e.max[t], oracle::quantile7(col, 1.0));
    EXPECT_LE(e.min[t], e.q25[t]);
    EXPECT_LE(e.q25[t], e.median[t]);
    EXPECT_LE(e.median[t], e.q75[t]);
    EXPECT_LE(e.q75[t], e.max[t]);
  }
}

TEST(Envelope, Errors) {
  EXPECT_THROW(envelope(std::vector<std::vector<double>>{}), Error);
  EXPECT_THROW(envelope(std::vector<std::vector<double>>{{1, 2}, {1}}), Error);
}

TEST(VarianceReport, OrderingAndDegenerateFlag) {
  const std::vector<SeriesPair> same{{{1, 2, 3}, {1, 2, 3}}};
  const std::vector<SeriesPair> off{{{1, 2, 3}, {2, 3, 4}}};
  const VarianceReport d = variance_report(same, off);
  EXPECT_TRUE(d.degenerate_model);
  EXPECT_EQ(d.own_mean_dtw, 0.0);
  EXPECT_TRUE(d.cross_exceeds_own);

  const std::vector<SeriesPair> own{{{1, 2, 3}, {1, 2, 3.5}}, {{0, 0}, {0, 1}}};
  const VarianceReport r = variance_report(own, off);
  EXPECT_FALSE(r.degenerate_model);
  EXPECT_EQ(r.own_pairs, 2u);
  EXPECT_EQ(r.own_mean_dtw, 0.75);
  EXPECT_EQ(r.cross_mean_dtw, 2.0);  // 1-2, 2-2, 3-3, 3-4
  EXPECT_TRUE(r.cross_exceeds_own);

  const VarianceReport flipped = variance_report(off, own);
  EXPECT_FALSE(flipped.cross_exceeds_own);
}

TEST(VarianceReport, EmptyGroupsThrow) {
  const std::vector<SeriesPair> one{{{1}, {1}}}, none;
  EXPECT_THROW(variance_report(none, one), Error);
  EXPECT_THROW(variance_report(one, none), Error);
}

TEST(ValidateJson, Keys) {
  const auto j = to_json(dtw(std::vector<double>{1, 2}, std::vector<double>{1}));
  EXPECT_EQ(j.at("distance").get<double>(), 1.0);
  EXPECT_EQ(j.at("path").size(), 2u);
  const auto s = to_json(series_stats(std::vector<double>{1, 3}));
  for (const char* k : {"mean", "variance", "std", "min", "max"}) EXPECT_TRUE(s.contains(k)) << k;
  const auto v = to_json(variance_report(std::vector<SeriesPair>{{{1}, {2}}}, std::vector<SeriesPair>{{{1}, {3}}}));
  for (const char* k : {"own_mean_dtw", "cross_mean_dtw", "own_pairs", "cross_pairs", "degenerate_model",
                        "cross_exceeds_own"})
    EXPECT_TRUE(v.contains(k)) << k;
}
