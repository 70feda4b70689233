// SPDX-License-Identifier: Apache-2.0
#include "genlog/remap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "genlog/error.hpp"
#include "genlog/resample.hpp"

namespace genlog {

EmbedPlan build_embed_plan(const LogFile& tmpl, std::span<const MetricId> metrics) {
  if (tmpl.events.empty()) throw Error("template log has no events");
  const Millis duration = log_duration_ms(tmpl);
  EmbedPlan plan;
  for (const auto& m : metrics) {
    const std::size_t count = count_metric_values(tmpl, m);
    if (count == 0) throw Error("template '" + tmpl.id + "' has no values for metric '" + m.str() + "'");
    MetricPlan mp;
    mp.count = count;
    mp.t0 = tmpl.events.front().time;
    mp.dt_ms = count >= 2 ? static_cast<double>(duration) / static_cast<double>(count - 1) : 0.0;
    plan.emplace(m, mp);
  }
  return plan;
}

LogFile embed(const LogFile& tmpl, const std::map<MetricId, std::vector<double>>& generated, const EmbedPlan& plan) {
  LogFile out = tmpl;
  for (const auto& [metric, mp] : plan) {
    const auto it = generated.find(metric);
    if (it == generated.end()) throw Error("no generated values for metric '" + metric.str() + "'");
    if (mp.count >= 2 && it->second.size() < 2)
      throw Error("generated series for '" + metric.str() + "' needs at least 2 values");
    const std::vector<double> values = resample_to_count(it->second, static_cast<std::int64_t>(mp.count));

    std::size_t i = 0;
    for (auto& ev : out.events) {
      const auto r = ev.readings.find(metric);
      if (r == ev.readings.end()) continue;
      if (i >= values.size()) throw Error("plan count for '" + metric.str() + "' does not match the template");
      r->second = values[i];
      // Round half up.
      ev.time = Timestamp{mp.t0.ms + static_cast<Millis>(std::floor(static_cast<double>(i) * mp.dt_ms + 0.5))};
      ++i;
    }
    if (i != values.size()) throw Error("plan count for '" + metric.str() + "' does not match the template");
  }
  std::stable_sort(out.events.begin(), out.events.end(),
                   [](const Event& a, const Event& b) { return a.time < b.time; });
  return out;
}

RoundtripReport roundtrip_check(const LogFile& tmpl, const LogFile& embedded) {
  RoundtripReport rep;
  if (tmpl.events.size() != embedded.events.size())
    rep.violations.push_back("event count: template " + std::to_string(tmpl.events.size()) + ", embedded " +
                             std::to_string(embedded.events.size()));

  auto metrics = observed_metrics(tmpl);
  const auto other = observed_metrics(embedded);
  metrics.insert(other.begin(), other.end());
  for (const auto& m : metrics) {
    const auto a = count_metric_values(tmpl, m);
    const auto b = count_metric_values(embedded, m);
    if (a != b)
      rep.violations.push_back("metric count '" + m.str() + "': template " + std::to_string(a) + ", embedded " +
                               std::to_string(b));
  }

  if (tmpl.meta != embedded.meta) rep.violations.push_back("meta data differs");

  auto plain_names = [](const LogFile& log) {
    std::vector<std::string> names;
    for (const auto& e : log.events)
      if (e.readings.empty()) names.push_back(e.name);
    return names;
  };
  if (plain_names(tmpl) != plain_names(embedded)) rep.violations.push_back("non-metric event sequence differs");

  auto all_names = [](const LogFile& log) {
    std::vector<std::string> names;
    for (const auto& e : log.events) names.push_back(e.name);
    std::sort(names.begin(), names.end());
    return names;
  };
  if (all_names(tmpl) != all_names(embedded)) rep.violations.push_back("event names differ");

  const Millis dd = std::llabs(log_duration_ms(tmpl) - log_duration_ms(embedded));
  if (dd > 1) rep.violations.push_back("duration differs by " + std::to_string(dd) + " ms");

  for (const auto& p : log_problems(embedded)) rep.violations.push_back("schema: " + p);

  // Re-sorting may move metric events across non-metric ones.
  std::vector<std::string> tmpl_order, out_order;
  for (const auto& e : tmpl.events) tmpl_order.push_back(e.name);
  for (const auto& e : embedded.events) out_order.push_back(e.name);
  if (tmpl_order != out_order) rep.notes.push_back("event order changed by re-sorting on the new timestamps");
  return rep;
}

}  // namespace genlog
