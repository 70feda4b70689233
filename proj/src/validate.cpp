// SPDX-License-Identifier: Apache-2.0
#include "genlog/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "genlog/error.hpp"
#include "genlog/simd.hpp"

namespace genlog {

DtwResult dtw(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error("dtw needs two non-empty series");
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const auto& k = simd::kernels();

  // acc[i*m + j]: cheapest alignment of a[0..i] with b[0..j].
  std::vector<double> acc(n * m);
  std::vector<double> cost(m);

  k.abs_diff(a[0], b.data(), cost.data(), m);
  acc[0] = cost[0];
  for (std::size_t j = 1; j < m; ++j) acc[j] = acc[j - 1] + cost[j];

  for (std::size_t i = 1; i < n; ++i) {
    k.abs_diff(a[i], b.data(), cost.data(), m);
    const double* prev = acc.data() + (i - 1) * m;
    double* row = acc.data() + i * m;
    row[0] = prev[0] + cost[0];
    k.min_plus(prev, cost.data(), row, m);  // diagonal and up
    for (std::size_t j = 1; j < m; ++j) row[j] = std::min(row[j], row[j - 1] + cost[j]);
  }

  DtwResult res;
  res.distance = acc[n * m - 1];
  std::size_t i = n - 1, j = m - 1;
  res.path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      const double diag = acc[(i - 1) * m + (j - 1)];
      const double left = acc[i * m + (j - 1)];
      const double up = acc[(i - 1) * m + j];
      if (diag <= left && diag <= up) {
        --i;
        --j;
      } else if (left <= up) {
        --j;
      } else {
        --i;
      }
    }
    res.path.emplace_back(i, j);
  }
  std::reverse(res.path.begin(), res.path.end());
  return res;
}

SeriesStats series_stats(std::span<const double> values) {
  if (values.empty()) throw Error("statistics of an empty series");
  SeriesStats s;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.variance = sq / n;
  s.stddev = std::sqrt(s.variance);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

double sorted_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error("quantile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double w = h - static_cast<double>(lo);
  if (w == 0.0) return sorted[lo];
  return std::clamp(sorted[lo] + w * (sorted[lo + 1] - sorted[lo]), sorted[lo], sorted[lo + 1]);
}

Envelope envelope(std::span<const std::vector<double>> collection) {
  if (collection.empty()) throw Error("envelope of an empty collection");
  const std::size_t len = collection.front().size();
  for (const auto& s : collection)
    if (s.size() != len) throw Error("envelope needs equal-length series");

  Envelope e;
  e.min.resize(len);
  e.q25.resize(len);
  e.median.resize(len);
  e.q75.resize(len);
  e.max.resize(len);
  std::vector<double> column(collection.size());
  for (std::size_t t = 0; t < len; ++t) {
    for (std::size_t s = 0; s < collection.size(); ++s) column[s] = collection[s][t];
    std::sort(column.begin(), column.end());
    e.min[t] = column.front();
    e.q25[t] = sorted_quantile(column, 0.25);
    e.median[t] = sorted_quantile(column, 0.5);
    e.q75[t] = sorted_quantile(column, 0.75);
    e.max[t] = column.back();
  }
  return e;
}

VarianceReport variance_report(std::span<const SeriesPair> own_pairs, std::span<const SeriesPair> cross_pairs) {
  if (own_pairs.empty()) throw Error("variance report needs at least one own-input pair");
  if (cross_pairs.empty()) throw Error("variance report needs at least one cross-input pair");
  auto mean_dtw = [](std::span<const SeriesPair> pairs) {
    double s = 0.0;
    for (const auto& p : pairs) s += dtw(p.generated, p.original).distance;
    return s / static_cast<double>(pairs.size());
  };
  VarianceReport r;
  r.own_pairs = own_pairs.size();
  r.cross_pairs = cross_pairs.size();
  r.own_mean_dtw = mean_dtw(own_pairs);
  r.cross_mean_dtw = mean_dtw(cross_pairs);
  r.degenerate_model = !(r.own_mean_dtw > 0.0);
  r.cross_exceeds_own = r.cross_mean_dtw > r.own_mean_dtw;
  return r;
}

nlohmann::json to_json(const DtwResult& r) {
  nlohmann::json path = nlohmann::json::array();
  for (const auto& [i, j] : r.path) path.push_back({i, j});
  return {{"distance", r.distance}, {"path", std::move(path)}};
}

nlohmann::json to_json(const SeriesStats& s) {
  return {{"mean", s.mean}, {"variance", s.variance}, {"std", s.stddev}, {"min", s.min}, {"max", s.max}};
}

nlohmann::json to_json(const Envelope& e) {
  return {{"length", e.length()}, {"min", e.min}, {"q25", e.q25}, {"median", e.median}, {"q75", e.q75},
          {"max", e.max}};
}

nlohmann::json to_json(const VarianceReport& r) {
  return {{"own_mean_dtw", r.own_mean_dtw},       {"cross_mean_dtw", r.cross_mean_dtw},
          {"own_pairs", r.own_pairs},             {"cross_pairs", r.cross_pairs},
          {"degenerate_model", r.degenerate_model}, {"cross_exceeds_own", r.cross_exceeds_own}};
}

}  // namespace genlog
