// SPDX-License-Identifier: Apache-2.0
#include "genlog/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "genlog/error.hpp"
#include "genlog/random.hpp"

namespace genlog {
namespace {

using nlohmann::json;

constexpr const char* kModelFormat = "genlog-model/1";
constexpr const char* kParamOrder[] = {"Wf", "Uf", "bf", "Wi", "Ui", "bi", "Wo", "Uo", "bo",
                                       "Wg", "Ug", "bg", "Wy", "by"};

}  // namespace

void TrainConfig::check() const {
  if (hidden_size < 1) throw Error("hidden_size must be at least 1");
  if (lookback < 1) throw Error("lookback must be at least 1");
  if (max_epochs < 1) throw Error("max_epochs must be at least 1");
  if (!(adam.learning_rate > 0.0)) throw Error("learning_rate must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0)) throw Error("beta1 must lie in [0, 1)");
  if (!(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) throw Error("beta2 must lie in [0, 1)");
  if (!(adam.epsilon > 0.0)) throw Error("epsilon must be positive");
  if (patience < 1) throw Error("patience must be at least 1");
  if (!(min_delta >= 0.0)) throw Error("min_delta must be non-negative");
}

double ModelRecord::best_loss() const {
  if (loss_history.empty()) return std::numeric_limits<double>::infinity();
  return *std::min_element(loss_history.begin(), loss_history.end());
}

LstmParams init_params(std::size_t hidden, std::uint64_t seed) {
  LstmParams p(hidden);
  Rng rng(seed);
  const double a = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (double& v : p.flat()) v = uniform_real(rng, -a, a);
  auto bf = p.bias(Gate::forget);
  std::fill(bf.begin(), bf.end(), 1.0);
  return p;
}

ModelRecord train(const UniformSeries& series, const TrainConfig& cfg) {
  return train(std::span<const UniformSeries>(&series, 1), cfg);
}

ModelRecord train(std::span<const UniformSeries> series, const TrainConfig& cfg) {
  cfg.check();
  if (series.empty()) throw Error("no series to train on");

  std::vector<double> all;
  std::size_t longest = 0;
  for (const auto& s : series) {
    if (s.metric != series.front().metric) throw Error("training series mix metrics");
    all.insert(all.end(), s.values.begin(), s.values.end());
    longest = std::max(longest, s.values.size());
  }
  if (longest < cfg.lookback + 2)
    throw Error("series too short: need at least " + std::to_string(cfg.lookback + 2) + " values, got " +
                std::to_string(longest));

  ModelRecord rec;
  rec.metric = series.front().metric;
  rec.config = cfg;
  rec.norm = fit_norm(all);

  SupervisedSet set;
  set.lookback = cfg.lookback;
  for (const auto& s : series) {
    if (s.values.size() < cfg.lookback + 2) continue;
    set.append(make_supervised(normalize(s.values, rec.norm), cfg.lookback));
  }

  LstmParams params = init_params(cfg.hidden_size, cfg.seed);
  LstmParams best = params;
  AdamState state(params.size());
  double best_loss = std::numeric_limits<double>::infinity();
  double reference = std::numeric_limits<double>::infinity();
  std::int64_t stale = 0;

  for (std::int64_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const LstmGradients g = bptt_gradients(params, set);
    if (!std::isfinite(g.loss)) throw Error("non-finite loss at epoch " + std::to_string(epoch));
    rec.loss_history.push_back(g.loss);
    rec.stopped_epoch = epoch;
    if (g.loss < best_loss) {
      best_loss = g.loss;
      best = params;
    }
    if (g.loss < reference - cfg.min_delta) {
      reference = g.loss;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
    if (epoch == cfg.max_epochs) break;
    adam_step(params.flat(), g.grad.flat(), state, epoch, cfg.adam);
  }
  rec.params = std::move(best);
  return rec;
}

json to_json(const TrainConfig& cfg) {
  return json{{"hidden_size", cfg.hidden_size}, {"lookback", cfg.lookback},
              {"max_epochs", cfg.max_epochs},   {"learning_rate", cfg.adam.learning_rate},
              {"beta1", cfg.adam.beta1},        {"beta2", cfg.adam.beta2},
              {"epsilon", cfg.adam.epsilon},    {"patience", cfg.patience},
              {"min_delta", cfg.min_delta},     {"seed", cfg.seed}};
}

TrainConfig train_config_from_json(const json& j, TrainConfig base) {
  if (!j.is_object()) throw Error("training config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw Error("training config '" + key + "' must be a number");
    if (key == "hidden_size") base.hidden_size = value.get<std::size_t>();
    else if (key == "lookback") base.lookback = value.get<std::size_t>();
    else if (key == "max_epochs") base.max_epochs = value.get<std::int64_t>();
    else if (key == "learning_rate") base.adam.learning_rate = value.get<double>();
    else if (key == "beta1") base.adam.beta1 = value.get<double>();
    else if (key == "beta2") base.adam.beta2 = value.get<double>();
    else if (key == "epsilon") base.adam.epsilon = value.get<double>();
    else if (key == "patience") base.patience = value.get<std::int64_t>();
    else if (key == "min_delta") base.min_delta = value.get<double>();
    else if (key == "seed") base.seed = value.get<std::uint64_t>();
    else throw Error("unknown training config key '" + key + "'");
  }
  base.check();
  return base;
}

json to_json(const ModelRecord& rec) {
  json order = json::array();
  for (const char* name : kParamOrder) order.push_back(name);
  return json{{"format", kModelFormat},
              {"metric", rec.metric.str()},
              {"batch", rec.batch.str()},
              {"hidden_size", rec.params.hidden()},
              {"param_order", std::move(order)},
              {"params", std::vector<double>(rec.params.flat().begin(), rec.params.flat().end())},
              {"norm", {{"lo", rec.norm.lo}, {"hi", rec.norm.hi}}},
              {"config", to_json(rec.config)},
              {"loss_history", rec.loss_history},
              {"stopped_epoch", rec.stopped_epoch}};
}

ModelRecord model_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kModelFormat) throw Error("unsupported model format");
    ModelRecord rec;
    rec.metric = MetricId(j.at("metric").get<std::string>());
    rec.batch = BatchId(j.at("batch").get<std::string>());
    const auto hidden = j.at("hidden_size").get<std::size_t>();
    const auto flat = j.at("params").get<std::vector<double>>();
    if (flat.size() != LstmParams::flat_size(hidden)) throw Error("parameter count does not match hidden_size");
    rec.params = LstmParams(hidden);
    std::copy(flat.begin(), flat.end(), rec.params.flat().begin());
    rec.norm = NormParams{j.at("norm").at("lo").get<double>(), j.at("norm").at("hi").get<double>()};
    rec.config = train_config_from_json(j.at("config"));
    rec.loss_history = j.at("loss_history").get<std::vector<double>>();
    rec.stopped_epoch = j.at("stopped_epoch").get<std::int64_t>();
    if (rec.loss_history.empty()) throw Error("model has an empty loss history");
    return rec;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed model record: ") + e.what());
  }
}

void save_model(const ModelRecord& rec, const std::filesystem::path& path) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp);
    out << to_json(rec).dump(1) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

ModelRecord load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read model " + path.string());
  try {
    return model_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error("malformed model " + path.string() + ": " + e.what());
  }
}

}  // namespace genlog
