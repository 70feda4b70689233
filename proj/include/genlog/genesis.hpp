// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "genlog/random.hpp"
#include "genlog/resample.hpp"
#include "genlog/train.hpp"
#include "genlog/types.hpp"

namespace genlog {

struct InputRef {
  BatchId batch;
  std::string log;
  friend auto operator<=>(const InputRef&, const InputRef&) = default;
};

/// Generation basis for one metric: active model batches and eligible inputs.
struct MetricSelection {
  std::set<BatchId> models;
  std::set<InputRef> inputs;
};

using SelectionSet = std::map<MetricId, MetricSelection>;

/// Trained models and resampled input series available for generation.
class Registry {
 public:
  void add_model(ModelRecord rec);
  void add_input(const InputRef& ref, UniformSeries series);

  const ModelRecord* model(const MetricId& metric, const BatchId& batch) const;
  const UniformSeries* input(const MetricId& metric, const InputRef& ref) const;

  const std::map<std::pair<MetricId, BatchId>, ModelRecord>& models() const { return models_; }
  const std::map<std::pair<MetricId, InputRef>, UniformSeries>& inputs() const { return inputs_; }

 private:
  std::map<std::pair<MetricId, BatchId>, ModelRecord> models_;
  std::map<std::pair<MetricId, InputRef>, UniformSeries> inputs_;
};

/// Throws Error when the selection references something missing from the
/// registry or leaves a metric without a model or an input.
void check_selection(const SelectionSet& selection, const Registry& registry);

struct Provenance {
  BatchId model_batch;
  BatchId input_batch;
  std::string input_log;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct GeneratedSeries {
  MetricId metric;
  std::vector<double> values;
  Provenance provenance;
  /// Grid of the input series the values were generated from.
  Timestamp t0;
  Millis dt_ms = 1;
  friend bool operator==(const GeneratedSeries&, const GeneratedSeries&) = default;
};

struct DrawnPair {
  const ModelRecord* model = nullptr;
  const UniformSeries* input = nullptr;
  InputRef input_ref;
};

/// Draws a model index, then independently an input index, each uniformly
/// at random from the sorted selection sets.
DrawnPair draw_pair(const SelectionSet& selection, const Registry& registry,
                    const MetricId& metric, Rng& rng);

/// Teacher-forced one-step-ahead generation. The first L values copy the
/// input; value k >= L is the model's prediction from input[k-L, k).
GeneratedSeries generate_series(const ModelRecord& model, const UniformSeries& input,
                                const InputRef& input_ref = {});

struct GenRequest {
  SelectionSet selection;
  std::int64_t count = 1;
  std::uint64_t seed = 0;
};

/// One synthetic part: a generated series for every selected metric.
using GeneratedPart = std::map<MetricId, GeneratedSeries>;

/// Produces `count` parts. Within each part metrics are visited in sorted
/// order, drawing one pair per metric from a single seeded stream.
std::vector<GeneratedPart> generate_batch(const GenRequest& req, const Registry& registry);

}  // namespace genlog
