// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "genlog/lstm.hpp"
#include "genlog/optim.hpp"
#include "genlog/resample.hpp"
#include "genlog/types.hpp"

namespace genlog {

struct TrainConfig {
  std::size_t hidden_size = 32;
  std::size_t lookback = 16;
  std::int64_t max_epochs = 200;
  AdamConfig adam;
  /// Epochs without a `min_delta` improvement of the best loss before stopping.
  std::int64_t patience = 10;
  double min_delta = 1e-6;
  std::uint64_t seed = 0;

  /// Throws Error naming the first violated constraint.
  void check() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct ModelRecord {
  MetricId metric;
  BatchId batch;
  LstmParams params;
  NormParams norm;
  std::vector<double> loss_history;
  std::int64_t stopped_epoch = 0;
  TrainConfig config;

  double best_loss() const;
  friend bool operator==(const ModelRecord&, const ModelRecord&) = default;
};

/// Trains on one series. Values are min-max normalized, windowed, and fitted
/// with full-batch Adam until early stopping or max_epochs. Returns the
/// parameters that achieved the lowest recorded loss.
ModelRecord train(const UniformSeries& series, const TrainConfig& cfg);

/// Same as above over several series of one metric: normalization is fitted
/// on all values and the windows of every series are pooled.
ModelRecord train(std::span<const UniformSeries> series, const TrainConfig& cfg);

/// Parameters drawn uniformly in +-1/sqrt(H), forget bias 1.
LstmParams init_params(std::size_t hidden, std::uint64_t seed);

nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});
nlohmann::json to_json(const ModelRecord& rec);
ModelRecord model_from_json(const nlohmann::json& j);

void save_model(const ModelRecord& rec, const std::filesystem::path& path);
ModelRecord load_model(const std::filesystem::path& path);

}  // namespace genlog
