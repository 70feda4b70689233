// SPDX-License-Identifier: Apache-2.0
#include "genlog/genesis.hpp"

#include <iterator>

#include "genlog/error.hpp"
#include "genlog/lstm.hpp"

namespace genlog {

void Registry::add_model(ModelRecord rec) {
  auto key = std::make_pair(rec.metric, rec.batch);
  models_.insert_or_assign(std::move(key), std::move(rec));
}

void Registry::add_input(const InputRef& ref, UniformSeries series) {
  auto key = std::make_pair(series.metric, ref);
  inputs_.insert_or_assign(std::move(key), std::move(series));
}

const ModelRecord* Registry::model(const MetricId& metric, const BatchId& batch) const {
  const auto it = models_.find({metric, batch});
  return it == models_.end() ? nullptr : &it->second;
}

const UniformSeries* Registry::input(const MetricId& metric, const InputRef& ref) const {
  const auto it = inputs_.find({metric, ref});
  return it == inputs_.end() ? nullptr : &it->second;
}

void check_selection(const SelectionSet& selection, const Registry& registry) {
  if (selection.empty()) throw Error("selection is empty");
  for (const auto& [metric, sel] : selection) {
    if (sel.models.empty()) throw Error("metric '" + metric.str() + "' has no active model");
    if (sel.inputs.empty()) throw Error("metric '" + metric.str() + "' has no eligible input");
    for (const auto& b : sel.models)
      if (!registry.model(metric, b)) throw Error("no trained model for " + metric.str() + "/" + b.str());
    for (const auto& in : sel.inputs)
      if (!registry.input(metric, in)) throw Error("no input series for " + metric.str() + "/" + in.log);
  }
}

DrawnPair draw_pair(const SelectionSet& selection, const Registry& registry, const MetricId& metric, Rng& rng) {
  const auto it = selection.find(metric);
  if (it == selection.end()) throw Error("metric '" + metric.str() + "' is not selected");
  const auto& sel = it->second;
  if (sel.models.empty()) throw Error("metric '" + metric.str() + "' has no active model");
  if (sel.inputs.empty()) throw Error("metric '" + metric.str() + "' has no eligible input");

  const auto mi = uniform_index(rng, sel.models.size());
  const auto ii = uniform_index(rng, sel.inputs.size());
  const BatchId& model_batch = *std::next(sel.models.begin(), static_cast<std::ptrdiff_t>(mi));
  const InputRef& ref = *std::next(sel.inputs.begin(), static_cast<std::ptrdiff_t>(ii));

  DrawnPair pair;
  pair.model = registry.model(metric, model_batch);
  pair.input = registry.input(metric, ref);
  pair.input_ref = ref;
  if (!pair.model) throw Error("no trained model for " + metric.str() + "/" + model_batch.str());
  if (!pair.input) throw Error("no input series for " + metric.str() + "/" + ref.log);
  return pair;
}

GeneratedSeries generate_series(const ModelRecord& model, const UniformSeries& input, const InputRef& input_ref) {
  const std::size_t L = model.config.lookback;
  if (input.metric != model.metric)
    throw Error("input metric '" + input.metric.str() + "' does not match model metric '" + model.metric.str() + "'");
  if (input.values.size() < L + 1)
    throw Error("input too short: need at least " + std::to_string(L + 1) + " values, got " +
                std::to_string(input.values.size()));

  const std::vector<double> norm = normalize(input.values, model.norm);
  GeneratedSeries out;
  out.metric = model.metric;
  out.provenance = Provenance{model.batch, input_ref.batch, input_ref.log};
  out.t0 = input.t0;
  out.dt_ms = input.dt_ms;
  out.values.resize(input.values.size());
  std::copy_n(input.values.begin(), L, out.values.begin());
  for (std::size_t k = L; k < norm.size(); ++k) {
    const double pred = predict_window(model.params, std::span<const double>(norm).subspan(k - L, L));
    out.values[k] = denormalize(pred, model.norm);
  }
  return out;
}

std::vector<GeneratedPart> generate_batch(const GenRequest& req, const Registry& registry) {
  if (req.count < 1) throw Error("generation count must be at least 1");
  check_selection(req.selection, registry);
  Rng rng(req.seed);
  std::vector<GeneratedPart> parts;
  parts.reserve(static_cast<std::size_t>(req.count));
  for (std::int64_t part = 0; part < req.count; ++part) {
    GeneratedPart gp;
    for (const auto& [metric, sel] : req.selection) {
      try {
        const DrawnPair pair = draw_pair(req.selection, registry, metric, rng);
        gp.emplace(metric, generate_series(*pair.model, *pair.input, pair.input_ref));
      } catch (const Error& e) {
        throw Error("part " + std::to_string(part) + ", metric " + metric.str() + ": " + e.what());
      }
    }
    parts.push_back(std::move(gp));
  }
  return parts;
}

}  // namespace genlog
