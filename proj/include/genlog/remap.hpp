// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "genlog/types.hpp"

namespace genlog {

struct MetricPlan {
  std::size_t count = 0;
  /// duration / (count - 1); 0 when count == 1.
  double dt_ms = 0.0;
  Timestamp t0;
};

using EmbedPlan = std::map<MetricId, MetricPlan>;

/// Per-metric count and sample interval derived from the template's span.
EmbedPlan build_embed_plan(const LogFile& tmpl, std::span<const MetricId> metrics);

/// Replaces the readings of every planned metric in `tmpl` with `generated`
/// resampled to the template count. The i-th event carrying a metric gets
/// timestamp t0 + round(i * dt). Metrics are applied in sorted order, so on
/// events carrying several planned metrics the last one sets the time.
/// The result is stably re-sorted by time.
LogFile embed(const LogFile& tmpl, const std::map<MetricId, std::vector<double>>& generated,
              const EmbedPlan& plan);

struct RoundtripReport {
  std::vector<std::string> violations;
  std::vector<std::string> notes;
  bool ok() const noexcept { return violations.empty(); }
};

/// Compares an embedded log against its template: event count, per-metric
/// counts, meta, non-metric event sequence, span (<= 1 ms), and validity.
RoundtripReport roundtrip_check(const LogFile& tmpl, const LogFile& embedded);

}  // namespace genlog
