// SPDX-License-Identifier: Apache-2.0
#include "genlog/types.hpp"

#include <algorithm>
#include <cmath>

namespace genlog {

std::set<MetricId> Catalog::metrics() const {
  std::set<MetricId> out;
  for (const auto& [key, series] : index) out.insert(key.metric);
  return out;
}

std::set<BatchId> Catalog::batches() const {
  std::set<BatchId> out;
  for (const auto& log : logs) out.insert(log.batch);
  return out;
}

Millis log_duration_ms(const LogFile& log) {
  if (log.events.empty()) return 0;
  return log.events.back().time.ms - log.events.front().time.ms;
}

std::size_t count_metric_values(const LogFile& log, const MetricId& metric) {
  return static_cast<std::size_t>(std::count_if(
      log.events.begin(), log.events.end(),
      [&](const Event& e) { return e.readings.contains(metric); }));
}

std::set<MetricId> observed_metrics(const LogFile& log) {
  std::set<MetricId> out;
  for (const auto& e : log.events)
    for (const auto& [metric, value] : e.readings) out.insert(metric);
  return out;
}

std::vector<std::string> log_problems(const LogFile& log) {
  std::vector<std::string> problems;
  if (log.events.empty()) problems.emplace_back("log has no events");
  for (std::size_t k = 0; k < log.events.size(); ++k) {
    const auto& e = log.events[k];
    if (k > 0 && e.time < log.events[k - 1].time)
      problems.push_back("event " + std::to_string(k) + " is earlier than its predecessor");
    for (const auto& [metric, value] : e.readings) {
      if (metric.empty()) problems.push_back("event " + std::to_string(k) + " has an empty metric id");
      if (!std::isfinite(value))
        problems.push_back("event " + std::to_string(k) + " has a non-finite " + metric.str());
    }
  }
  return problems;
}

}  // namespace genlog
