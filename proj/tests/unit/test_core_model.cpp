// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "genlog/ingest.hpp"
#include "genlog/types.hpp"
#include "support/test_support.hpp"

using namespace genlog;

namespace {

Event ev(Millis t, std::map<MetricId, double> r = {}, std::string name = "stream") {
  return Event{std::move(name), Timestamp{t}, std::move(r)};
}

LogFile fixture_log() { return parse_log_yamlite(test::slurp(test::fixture("gv12_like_01.log.yaml"))); }

}  // namespace

TEST(LogDuration, EndpointDifference) {
  LogFile log{"a", BatchId("b"), {ev(0), ev(10000)}, {}};
  EXPECT_EQ(log_duration_ms(log), 10000);
}

TEST(LogDuration, SingleEventIsZero) {
  LogFile log{"a", BatchId("b"), {ev(1234)}, {}};
  EXPECT_EQ(log_duration_ms(log), 0);
}

// Frozen from tests/oracles/scan_fixture.py on gv12_like_01.log.yaml.
TEST(LogDuration, FixtureMatchesScanOracle) {
  const LogFile log = fixture_log();
  EXPECT_EQ(log_duration_ms(log), 10941);
  EXPECT_EQ(log.events.front().time.ms, 1614852000000);
  EXPECT_EQ(log.events.size(), 604u);
}

TEST(CountMetricValues, DirectCount) {
  const MetricId y("load_y");
  LogFile log{"a", BatchId("b"), {ev(0, {{y, 1.0}}), ev(1), ev(2, {{y, 2.0}})}, {}};
  EXPECT_EQ(count_metric_values(log, y), 2u);
}

TEST(CountMetricValues, AbsentMetricIsZero) {
  LogFile log{"a", BatchId("b"), {ev(0, {{MetricId("x"), 1.0}})}, {}};
  EXPECT_EQ(count_metric_values(log, MetricId("nope")), 0u);
}

TEST(CountMetricValues, FixtureMatchesScanOracle) {
  const LogFile log = fixture_log();
  for (const char* m : {"load_x", "load_y", "torque_sp"}) EXPECT_EQ(count_metric_values(log, MetricId(m)), 200u) << m;
}

TEST(CoreProperties, DurationNonNegativeAndZeroIffOneTimestamp) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    LogFile log{"a", BatchId("b"), {}, {}};
    const int n = 1 + static_cast<int>(rng() % 6);
    Millis t = 0;
    for (int k = 0; k < n; ++k) {
      t += static_cast<Millis>(rng() % 3);  // ties are common
      log.events.push_back(ev(t));
    }
    const Millis d = log_duration_ms(log);
    EXPECT_GE(d, 0);
    const bool all_same = log.events.front().time == log.events.back().time;
    EXPECT_EQ(d == 0, all_same);
  }
}

TEST(CoreProperties, MetricCountsSumToReadings) {
  const LogFile log = fixture_log();
  std::size_t readings = 0;
  for (const auto& e : log.events) readings += e.readings.size();
  std::size_t counted = 0;
  for (const auto& m : observed_metrics(log)) counted += count_metric_values(log, m);
  EXPECT_EQ(counted, readings);
  EXPECT_EQ(readings, 600u);

  std::size_t partial = count_metric_values(log, MetricId("load_x"));
  EXPECT_LE(partial, readings);
}

TEST(CoreProperties, CatalogListsIngestMetrics) {
  LogFile log = fixture_log();
  IngestConfig cfg;
  cfg.metrics = {MetricId("load_x"), MetricId("torque_sp")};
  const Catalog cat = build_catalog({log}, cfg);
  EXPECT_EQ(cat.metrics(), (std::set<MetricId>{MetricId("load_x"), MetricId("torque_sp")}));
  for (const auto& [key, s] : cat.index) {
    EXPECT_EQ(key.log, "gv12_like_01");
    EXPECT_EQ(s.source_log, key.log);
    EXPECT_EQ(s.metric, key.metric);
  }

  const Catalog all = build_catalog({log}, IngestConfig{});
  EXPECT_EQ(all.metrics(), observed_metrics(log));
}

TEST(LogProblems, FlagsDisorderAndNonFinite) {
  LogFile ok{"a", BatchId("b"), {ev(0), ev(0), ev(5)}, {}};
  EXPECT_TRUE(log_problems(ok).empty());
  LogFile bad{"a", BatchId("b"), {ev(5), ev(0, {{MetricId("x"), std::nan("")}})}, {}};
  EXPECT_EQ(log_problems(bad).size(), 2u);
  EXPECT_FALSE(log_problems(LogFile{}).empty());
}
