// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

namespace genlog {

struct DtwResult {
  double distance = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> path;
};

/// Full O(n*m) dynamic time warping with local cost |a_i - b_j|. The path is
/// recovered by backtracking, preferring diagonal, then left (i, j-1), then up.
DtwResult dtw(std::span<const double> a, std::span<const double> b);

struct SeriesStats {
  double mean = 0.0;
  double variance = 0.0;  // population
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
};

SeriesStats series_stats(std::span<const double> values);

/// Per-index order statistics across equal-length series. Quartiles use
/// linear interpolation between closest ranks: q(p) at rank (n-1)p.
struct Envelope {
  std::vector<double> min;
  std::vector<double> q25;
  std::vector<double> median;
  std::vector<double> q75;
  std::vector<double> max;

  std::size_t length() const noexcept { return min.size(); }
};

Envelope envelope(std::span<const std::vector<double>> collection);

/// Linear-interpolation quantile of an ascending-sorted sample.
double sorted_quantile(std::span<const double> sorted, double p);

struct SeriesPair {
  std::vector<double> generated;
  std::vector<double> original;
};

struct VarianceReport {
  double own_mean_dtw = 0.0;
  double cross_mean_dtw = 0.0;
  std::size_t own_pairs = 0;
  std::size_t cross_pairs = 0;
  /// Own-input generation reproduced the original exactly.
  bool degenerate_model = false;
  bool cross_exceeds_own = false;
};

VarianceReport variance_report(std::span<const SeriesPair> own_pairs,
                               std::span<const SeriesPair> cross_pairs);

nlohmann::json to_json(const DtwResult& r);
nlohmann::json to_json(const SeriesStats& s);
nlohmann::json to_json(const Envelope& e);
nlohmann::json to_json(const VarianceReport& r);

}  // namespace genlog
