// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace genlog {

using Millis = std::int64_t;

/// Milliseconds since the Unix epoch.
struct Timestamp {
  Millis ms = 0;
  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

/// A string label that cannot be mixed up with another kind of label.
template <class Tag>
struct Label {
  std::string value;

  Label() = default;
  explicit Label(std::string v) : value(std::move(v)) {}

  const std::string& str() const noexcept { return value; }
  bool empty() const noexcept { return value.empty(); }
  friend auto operator<=>(const Label&, const Label&) = default;
  friend std::ostream& operator<<(std::ostream& os, const Label& l) { return os << l.value; }
};

using MetricId = Label<struct MetricTag>;
using BatchId = Label<struct BatchTag>;

struct Event {
  std::string name;
  Timestamp time;
  std::map<MetricId, double> readings;
  friend bool operator==(const Event&, const Event&) = default;
};

/// One process execution. Events are kept in non-decreasing time order.
struct LogFile {
  std::string id;
  BatchId batch;
  std::vector<Event> events;
  std::map<std::string, std::string> meta;
  friend bool operator==(const LogFile&, const LogFile&) = default;
};

struct Sample {
  Timestamp time;
  double value = 0.0;
  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Irregularly sampled readings of one metric taken from one log.
struct Series {
  MetricId metric;
  std::string source_log;
  std::vector<Sample> samples;
  friend bool operator==(const Series&, const Series&) = default;
};

struct SeriesKey {
  BatchId batch;
  MetricId metric;
  std::string log;
  friend auto operator<=>(const SeriesKey&, const SeriesKey&) = default;
};

/// Ingested logs plus the per-(batch, metric, log) series index.
struct Catalog {
  std::vector<LogFile> logs;
  std::map<SeriesKey, Series> index;

  std::set<MetricId> metrics() const;
  std::set<BatchId> batches() const;
};

/// Last event time minus first event time. A single-event log has duration 0.
Millis log_duration_ms(const LogFile& log);

/// Number of events carrying a reading for `metric`.
std::size_t count_metric_values(const LogFile& log, const MetricId& metric);

/// Every metric observed anywhere in the log.
std::set<MetricId> observed_metrics(const LogFile& log);

/// Checks the LogFile invariants; returns a list of human-readable problems.
std::vector<std::string> log_problems(const LogFile& log);

}  // namespace genlog
