// SPDX-License-Identifier: Apache-2.0
#include "genlog/resample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "genlog/error.hpp"

namespace genlog {
namespace {

// (1-w)*a + w*b, exact at w = 0 and w = 1 and clamped to the bracket.
double lerp(double a, double b, double w) {
  if (a == b) return a;
  const double v = (1.0 - w) * a + w * b;
  return std::clamp(v, std::min(a, b), std::max(a, b));
}

}  // namespace

double median_gap_ms(const Series& s) {
  if (s.samples.size() < 2) throw Error("series '" + s.metric.str() + "' needs at least 2 samples");
  std::vector<Millis> gaps;
  gaps.reserve(s.samples.size() - 1);
  for (std::size_t k = 1; k < s.samples.size(); ++k) gaps.push_back(s.samples[k].time.ms - s.samples[k - 1].time.ms);
  std::sort(gaps.begin(), gaps.end());
  const std::size_t n = gaps.size();
  if (n % 2 == 1) return static_cast<double>(gaps[n / 2]);
  return 0.5 * (static_cast<double>(gaps[n / 2 - 1]) + static_cast<double>(gaps[n / 2]));
}

Millis common_dt(std::span<const Series> series) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : series)
    if (s.samples.size() >= 2) best = std::min(best, median_gap_ms(s));
  if (!std::isfinite(best)) throw Error("no series with at least 2 samples");
  return std::max<Millis>(1, static_cast<Millis>(std::floor(best)));
}

Millis common_dt(const Catalog& catalog) {
  std::vector<Series> all;
  all.reserve(catalog.index.size());
  for (const auto& [key, s] : catalog.index) all.push_back(s);
  return common_dt(all);
}

UniformSeries to_uniform(const Series& s, Millis dt_ms) {
  if (s.samples.size() < 2) throw Error("series '" + s.metric.str() + "' needs at least 2 samples to resample");
  if (dt_ms < 1) throw Error("sample interval must be at least 1 ms");

  UniformSeries u;
  u.metric = s.metric;
  u.t0 = s.samples.front().time;
  u.dt_ms = dt_ms;
  const Millis span = s.samples.back().time.ms - u.t0.ms;
  const auto points = static_cast<std::size_t>(span / dt_ms) + 1;
  u.values.reserve(points);

  std::size_t seg = 0;
  for (std::size_t k = 0; k < points; ++k) {
    const Millis t = u.t0.ms + static_cast<Millis>(k) * dt_ms;
    while (seg + 2 < s.samples.size() && s.samples[seg + 1].time.ms <= t) ++seg;
    const auto& a = s.samples[seg];
    const auto& b = s.samples[seg + 1];
    if (t == a.time.ms) {
      u.values.push_back(a.value);
    } else if (t == b.time.ms) {
      u.values.push_back(b.value);
    } else {
      const double w = static_cast<double>(t - a.time.ms) / static_cast<double>(b.time.ms - a.time.ms);
      u.values.push_back(lerp(a.value, b.value, w));
    }
  }
  return u;
}

std::vector<double> resample_to_count(std::span<const double> values, std::int64_t count) {
  if (count <= 0) throw Error("resample count must be positive");
  if (values.empty()) throw Error("cannot resample an empty series");
  if (count == 1) return {values.front()};
  if (values.size() < 2) throw Error("need at least 2 values to resample to " + std::to_string(count));

  const auto n = values.size();
  const auto c = static_cast<std::size_t>(count);
  std::vector<double> out(c);
  const double last = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < c; ++i) {
    const double pos = static_cast<double>(i) * last / static_cast<double>(c - 1);
    const auto j = std::min(static_cast<std::size_t>(pos), n - 2);
    out[i] = lerp(values[j], values[j + 1], pos - static_cast<double>(j));
  }
  return out;
}

std::vector<double> resample_to_count(const UniformSeries& u, std::int64_t count) {
  return resample_to_count(std::span<const double>(u.values), count);
}

NormParams fit_norm(std::span<const double> values) {
  if (values.empty()) throw Error("cannot fit normalization on an empty series");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return NormParams{*lo, *hi};
}

double normalize(double v, const NormParams& p) {
  if (p.hi == p.lo) return 0.0;
  return (v - p.lo) / (p.hi - p.lo);
}

double denormalize(double v, const NormParams& p) {
  if (p.hi == p.lo) return p.lo;
  return p.lo + v * (p.hi - p.lo);
}

std::vector<double> normalize(std::span<const double> values, const NormParams& p) {
  if (values.empty()) throw Error("cannot normalize an empty series");
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [&](double v) { return normalize(v, p); });
  return out;
}

std::vector<double> denormalize(std::span<const double> values, const NormParams& p) {
  if (values.empty()) throw Error("cannot denormalize an empty series");
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [&](double v) { return denormalize(v, p); });
  return out;
}

}  // namespace genlog
