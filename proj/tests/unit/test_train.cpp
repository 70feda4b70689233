// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include "genlog/error.hpp"
#include "genlog/train.hpp"
#include "support/test_support.hpp"

using namespace genlog;

namespace {

UniformSeries uniform(std::vector<double> v, const char* metric = "m") {
  return UniformSeries{MetricId(metric), Timestamp{0}, 10, std::move(v)};
}

UniformSeries sine(std::size_t n, double period, double drift = 0.0) {
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k)
    v[k] = std::sin(2 * std::numbers::pi * static_cast<double>(k) / period) + drift * static_cast<double>(k);
  return uniform(std::move(v));
}

TrainConfig small() {
  TrainConfig c;
  c.hidden_size = 4;
  c.lookback = 4;
  c.max_epochs = 25;
  c.seed = 3;
  return c;
}

bool bit_equal(const ModelRecord& a, const ModelRecord& b) {
  if (a.params.size() != b.params.size() || a.loss_history.size() != b.loss_history.size()) return false;
  return std::memcmp(a.params.flat().data(), b.params.flat().data(), a.params.size() * sizeof(double)) == 0 &&
         std::memcmp(a.loss_history.data(), b.loss_history.data(), a.loss_history.size() * sizeof(double)) == 0 &&
         a.stopped_epoch == b.stopped_epoch && a.norm == b.norm;
}

}  // namespace

TEST(TrainConfig, Validation) {
  EXPECT_NO_THROW(TrainConfig{}.check());
  const TrainConfig d;
  EXPECT_EQ(d.hidden_size, 32u);
  EXPECT_EQ(d.lookback, 16u);
  EXPECT_EQ(d.max_epochs, 200);
  EXPECT_EQ(d.adam.learning_rate, 1e-3);
  EXPECT_EQ(d.adam.beta1, 0.9);
  EXPECT_EQ(d.adam.beta2, 0.999);
  EXPECT_EQ(d.adam.epsilon, 1e-8);
  EXPECT_EQ(d.patience, 10);
  EXPECT_EQ(d.min_delta, 1e-6);
  auto bad = [](auto mutate) {
    TrainConfig c;
    mutate(c);
    EXPECT_THROW(c.check(), Error);
  };
  bad([](TrainConfig& c) { c.hidden_size = 0; });
  bad([](TrainConfig& c) { c.lookback = 0; });
  bad([](TrainConfig& c) { c.adam.learning_rate = 0; });
  bad([](TrainConfig& c) { c.adam.beta1 = 1.0; });
  bad([](TrainConfig& c) { c.adam.beta2 = -0.1; });
  bad([](TrainConfig& c) { c.adam.epsilon = 0; });
  bad([](TrainConfig& c) { c.max_epochs = 0; });
}

TEST(InitParams, RangeAndForgetBias) {
  const LstmParams p = init_params(9, 77);
  const double bound = 1.0 / 3.0;
  for (double b : p.bias(Gate::forget)) EXPECT_EQ(b, 1.0);
  const std::size_t H = 9, block = H + H * H + H;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const bool forget_bias = k >= H + H * H && k < block;
    if (!forget_bias) {
      EXPECT_GE(p.flat()[k], -bound);
      EXPECT_LT(p.flat()[k], bound);
    }
  }
  EXPECT_EQ(init_params(9, 77), p);
  EXPECT_NE(init_params(9, 78), p);
}

// At lr 1e-3 Adam overshoots this target and about a third of seeds stop
// between 1e-6 and 1e-5; at 3e-4 every seed tried gets there.
TEST(Train, ConstantSeriesIsLearnedAndStopsEarly) {
  TrainConfig c;
  c.adam.learning_rate = 3e-4;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    c.seed = seed;
    const ModelRecord rec = train(uniform(std::vector<double>(120, 5.0)), c);
    EXPECT_LE(rec.best_loss(), 1e-6) << "seed " << seed;
    EXPECT_LT(rec.stopped_epoch, rec.config.max_epochs) << "seed " << seed;
    EXPECT_EQ(rec.norm.lo, 5.0);
    EXPECT_EQ(rec.norm.hi, 5.0);
  }
}

TEST(Train, SineLossDropsTenfold) {
  const ModelRecord rec = train(sine(400, 50), TrainConfig{});
  ASSERT_FALSE(rec.loss_history.empty());
  EXPECT_LT(rec.loss_history.back(), 0.1 * rec.loss_history.front())
      << "first " << rec.loss_history.front() << " last " << rec.loss_history.back();
}

TEST(Train, SameSeedIsBitIdentical) {
  const UniformSeries s = sine(80, 20);
  const ModelRecord a = train(s, small());
  const ModelRecord b = train(s, small());
  EXPECT_TRUE(bit_equal(a, b));
  EXPECT_EQ(a, b);
  TrainConfig other = small();
  other.seed = 4;
  EXPECT_FALSE(bit_equal(a, train(s, other)));
}

TEST(Train, HistoryAndEarlyStoppingInvariants) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    TrainConfig c = small();
    c.seed = seed;
    c.max_epochs = 150;
    c.patience = 5;
    c.min_delta = 1e-4;
    const ModelRecord rec = train(sine(60, 15), c);
    ASSERT_FALSE(rec.loss_history.empty());
    EXPECT_LE(rec.stopped_epoch, c.max_epochs);
    EXPECT_EQ(static_cast<std::int64_t>(rec.loss_history.size()), rec.stopped_epoch);
    for (double l : rec.loss_history) {
      EXPECT_TRUE(std::isfinite(l));
      EXPECT_GE(l, 0.0);
    }
    if (rec.stopped_epoch < c.max_epochs) {
      // The reference loss in force when the last `patience` epochs began was
      // not beaten by min_delta in any of them.
      const auto& h = rec.loss_history;
      const std::size_t n = h.size();
      const std::size_t p = static_cast<std::size_t>(c.patience);
      ASSERT_GT(n, p);
      double ref = h[0];
      for (std::size_t k = 1; k + p < n; ++k)
        if (h[k] < ref - c.min_delta) ref = h[k];
      for (std::size_t k = n - p; k < n; ++k) EXPECT_GE(h[k], ref - c.min_delta);
    }
    // The returned parameters are the best ones seen.
    const SupervisedSet set = make_supervised(normalize(sine(60, 15).values, rec.norm), c.lookback);
    EXPECT_DOUBLE_EQ(dataset_loss(rec.params, set), rec.best_loss());
  }
}

TEST(Train, TooShortSeries) {
  TrainConfig c = small();
  try {
    train(uniform(std::vector<double>(5, 1.0)), c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("series too short"), std::string::npos);
  }
  EXPECT_NO_THROW(train(uniform({1, 2, 3, 4, 5, 6}), c));
}

TEST(Train, PoolsSeveralSeries) {
  const std::vector<UniformSeries> both{sine(40, 10), sine(30, 10, 0.05)};
  const ModelRecord rec = train(both, small());
  EXPECT_EQ(rec.norm.lo, std::min(fit_norm(both[0].values).lo, fit_norm(both[1].values).lo));
  EXPECT_EQ(rec.norm.hi, std::max(fit_norm(both[0].values).hi, fit_norm(both[1].values).hi));
  // Too-short members are skipped, not fatal.
  const std::vector<UniformSeries> mixed{sine(40, 10), uniform({1, 2})};
  EXPECT_NO_THROW(train(mixed, small()));
  const std::vector<UniformSeries> metric_mix{sine(40, 10), uniform(std::vector<double>(40, 1.0), "other")};
  EXPECT_THROW(train(metric_mix, small()), Error);
}

TEST(ModelJson, RoundTripIsBitExact) {
  ModelRecord rec = train(sine(50, 12), small());
  rec.metric = MetricId("load_x");
  rec.batch = BatchId("batch14");
  const nlohmann::json j = to_json(rec);
  EXPECT_EQ(j.at("format"), "genlog-model/1");
  const ModelRecord back = model_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_TRUE(bit_equal(rec, back));
  EXPECT_EQ(back, rec);

  test::TempDir dir("model");
  save_model(rec, dir / "m.json");
  EXPECT_EQ(load_model(dir / "m.json"), rec);
  EXPECT_THROW(load_model(dir / "missing.json"), Error);
}

TEST(ModelJson, AwkwardDoublesSurvive) {
  ModelRecord rec;
  rec.metric = MetricId("m");
  rec.batch = BatchId("b");
  rec.params = LstmParams(2);
  std::mt19937_64 rng(9);
  for (auto& x : rec.params.flat()) {
    std::uint64_t bits;
    do {
      bits = rng();
      std::memcpy(&x, &bits, sizeof x);
    } while (!std::isfinite(x));
  }
  rec.params.flat()[0] = 5e-324;
  rec.params.flat()[1] = -0.0;
  rec.norm = {0.1, 0.30000000000000004};
  rec.loss_history = {0.5, 1e-300};
  rec.stopped_epoch = 2;
  const ModelRecord back = model_from_json(nlohmann::json::parse(to_json(rec).dump()));
  EXPECT_TRUE(bit_equal(rec, back));
}

TEST(ModelJson, RejectsMalformed) {
  ModelRecord rec = train(sine(30, 12), small());
  nlohmann::json j = to_json(rec);
  j["params"].erase(0);
  EXPECT_THROW(model_from_json(j), Error);
  EXPECT_THROW(model_from_json(nlohmann::json{{"format", "other"}}), Error);
}

TEST(TrainConfigJson, FlatKeys) {
  TrainConfig c;
  c.hidden_size = 7;
  c.adam.learning_rate = 0.01;
  EXPECT_EQ(train_config_from_json(to_json(c)), c);
  const TrainConfig over = train_config_from_json(nlohmann::json{{"lookback", 3}, {"patience", 2}}, c);
  EXPECT_EQ(over.lookback, 3u);
  EXPECT_EQ(over.patience, 2);
  EXPECT_EQ(over.hidden_size, 7u);
  EXPECT_THROW(train_config_from_json(nlohmann::json{{"lookbak", 3}}), Error);
  EXPECT_THROW(train_config_from_json(nlohmann::json{{"hidden_size", 0}}), Error);
}
