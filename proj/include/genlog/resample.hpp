// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "genlog/types.hpp"

namespace genlog {

/// Values on the grid t0, t0 + dt, t0 + 2dt, ...
struct UniformSeries {
  MetricId metric;
  Timestamp t0;
  Millis dt_ms = 1;
  std::vector<double> values;

  Timestamp time_at(std::size_t k) const {
    return Timestamp{t0.ms + static_cast<Millis>(k) * dt_ms};
  }
  friend bool operator==(const UniformSeries&, const UniformSeries&) = default;
};

/// Observed range of the training values.
struct NormParams {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const NormParams&, const NormParams&) = default;
};

/// Median inter-sample gap of one series (requires >= 2 samples).
double median_gap_ms(const Series& s);

/// floor(min over series of median gap), at least 1. Series with fewer than
/// two samples are ignored; throws when none remain.
Millis common_dt(std::span<const Series> series);
Millis common_dt(const Catalog& catalog);

/// Linear interpolation of `s` onto t0 + k*dt for k = 0..floor(span/dt).
UniformSeries to_uniform(const Series& s, Millis dt_ms);

/// `count` values evenly spaced over the index range [0, len-1].
std::vector<double> resample_to_count(std::span<const double> values, std::int64_t count);
std::vector<double> resample_to_count(const UniformSeries& u, std::int64_t count);

NormParams fit_norm(std::span<const double> values);
std::vector<double> normalize(std::span<const double> values, const NormParams& p);
std::vector<double> denormalize(std::span<const double> values, const NormParams& p);
double normalize(double v, const NormParams& p);
double denormalize(double v, const NormParams& p);

}  // namespace genlog
