// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "genlog/error.hpp"
#include "genlog/genesis.hpp"
#include "oracles/oracles.hpp"

using namespace genlog;

namespace {

const MetricId kM("load_x");

ModelRecord model(const char* batch, std::size_t L = 3, std::uint64_t seed = 1) {
  ModelRecord rec;
  rec.metric = kM;
  rec.batch = BatchId(batch);
  rec.config.hidden_size = 3;
  rec.config.lookback = L;
  rec.params = init_params(3, seed);
  rec.norm = {-2.0, 6.0};
  rec.loss_history = {1.0};
  rec.stopped_epoch = 1;
  return rec;
}

UniformSeries input(std::size_t n, double phase, MetricId metric = kM) {
  UniformSeries u{std::move(metric), Timestamp{1000}, 25, {}};
  for (std::size_t k = 0; k < n; ++k) u.values.push_back(2 + 3 * std::sin(0.3 * static_cast<double>(k) + phase));
  return u;
}

// Paper-style 2x2: models of batch14/15 and one input log per batch.
struct TwoByTwo {
  Registry reg;
  SelectionSet sel;
  TwoByTwo() {
    reg.add_model(model("batch14", 3, 1));
    reg.add_model(model("batch15", 3, 2));
    reg.add_input({BatchId("batch14"), "d14"}, input(30, 0.0));
    reg.add_input({BatchId("batch15"), "d15"}, input(30, 1.0));
    sel[kM].models = {BatchId("batch14"), BatchId("batch15")};
    sel[kM].inputs = {{BatchId("batch14"), "d14"}, {BatchId("batch15"), "d15"}};
  }
};

}  // namespace

TEST(DrawPair, SupportIsExactlyTheFourCombinations) {
  TwoByTwo f;
  Rng rng(2024);
  std::map<std::pair<std::string, std::string>, int> hits;
  const int n = 10000;
  for (int k = 0; k < n; ++k) {
    const DrawnPair p = draw_pair(f.sel, f.reg, kM, rng);
    ASSERT_NE(p.model, nullptr);
    ASSERT_NE(p.input, nullptr);
    EXPECT_EQ(p.input, f.reg.input(kM, p.input_ref));
    ++hits[{p.model->batch.str(), p.input_ref.log}];
  }
  ASSERT_EQ(hits.size(), 4u);
  for (const auto& [pair, count] : hits) {
    const double freq = static_cast<double>(count) / n;
    EXPECT_GE(freq, 0.22) << pair.first << "/" << pair.second;
    EXPECT_LE(freq, 0.28) << pair.first << "/" << pair.second;
  }
}

TEST(DrawPair, SingletonAlwaysSamePair) {
  TwoByTwo f;
  f.sel[kM].models = {BatchId("batch15")};
  f.sel[kM].inputs = {{BatchId("batch14"), "d14"}};
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    const DrawnPair p = draw_pair(f.sel, f.reg, kM, rng);
    EXPECT_EQ(p.model->batch, BatchId("batch15"));
    EXPECT_EQ(p.input_ref.log, "d14");
  }
}

TEST(DrawPair, EmptySetsAreErrors) {
  TwoByTwo f;
  Rng rng(5);
  SelectionSet no_models = f.sel;
  no_models[kM].models.clear();
  EXPECT_THROW(draw_pair(no_models, f.reg, kM, rng), Error);
  SelectionSet no_inputs = f.sel;
  no_inputs[kM].inputs.clear();
  EXPECT_THROW(draw_pair(no_inputs, f.reg, kM, rng), Error);
  EXPECT_THROW(draw_pair(f.sel, f.reg, MetricId("other"), rng), Error);
  EXPECT_THROW(check_selection(no_models, f.reg), Error);
  EXPECT_THROW(check_selection(SelectionSet{}, f.reg), Error);
  SelectionSet ghost = f.sel;
  ghost[kM].models.insert(BatchId("batch99"));
  EXPECT_THROW(check_selection(ghost, f.reg), Error);
  EXPECT_NO_THROW(check_selection(f.sel, f.reg));
}

TEST(GenerateSeries, ConstantHead) {
  ModelRecord m = model("b", 4);
  for (auto& x : m.params.flat()) x = 0.0;
  m.params.head_bias() = 0.5;
  m.norm = {0.0, 1.0};
  const UniformSeries in = input(20, 0.3);
  const GeneratedSeries g = generate_series(m, in, {BatchId("b"), "log"});
  ASSERT_EQ(g.values.size(), in.values.size());
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(g.values[k], in.values[k]);
  for (std::size_t k = 4; k < g.values.size(); ++k) EXPECT_EQ(g.values[k], 0.5);
  EXPECT_EQ(g.provenance, (Provenance{BatchId("b"), BatchId("b"), "log"}));
  EXPECT_EQ(g.t0, in.t0);
  EXPECT_EQ(g.dt_ms, in.dt_ms);
}

TEST(GenerateSeries, LengthContract) {
  for (std::size_t n = 4; n < 40; n += 5) EXPECT_EQ(generate_series(model("b", 3), input(n, 0)).values.size(), n);
}

TEST(GenerateSeries, MatchesStepByStepReference) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    ModelRecord m = model("b", 2 + trial % 5, 100 + trial);
    m.norm = {std::uniform_real_distribution<double>(-3, 0)(rng), std::uniform_real_distribution<double>(4, 8)(rng)};
    const UniformSeries in = input(25 + trial, 0.1 * trial);
    const GeneratedSeries g = generate_series(m, in);
    const std::vector<double> flat(m.params.flat().begin(), m.params.flat().end());
    const std::size_t L = m.config.lookback;
    for (std::size_t k = 0; k < in.values.size(); ++k) {
      if (k < L) {
        EXPECT_EQ(g.values[k], in.values[k]);
        continue;
      }
      std::vector<double> window;
      for (std::size_t j = k - L; j < k; ++j) window.push_back((in.values[j] - m.norm.lo) / (m.norm.hi - m.norm.lo));
      const double want = m.norm.lo + oracle::predict(flat, 3, window) * (m.norm.hi - m.norm.lo);
      EXPECT_NEAR(g.values[k], want, 1e-12);
    }
  }
}

TEST(GenerateSeries, Errors) {
  EXPECT_THROW(generate_series(model("b", 5), input(5, 0)), Error);
  EXPECT_NO_THROW(generate_series(model("b", 5), input(6, 0)));
  EXPECT_THROW(generate_series(model("b", 3), input(10, 0, MetricId("other"))), Error);
}

TEST(GenerateBatch, SingletonProvenance) {
  TwoByTwo f;
  GenRequest req;
  req.selection[kM].models = {BatchId("batch14")};
  req.selection[kM].inputs = {{BatchId("batch15"), "d15"}};
  req.count = 1;
  const auto parts = generate_batch(req, f.reg);
  ASSERT_EQ(parts.size(), 1u);
  EXPECT_EQ(parts[0].at(kM).provenance, (Provenance{BatchId("batch14"), BatchId("batch15"), "d15"}));
}

TEST(GenerateBatch, HundredPartsDeterministicAndClosed) {
  TwoByTwo f;
  GenRequest req{f.sel, 100, 77};
  const auto a = generate_batch(req, f.reg);
  const auto b = generate_batch(req, f.reg);
  ASSERT_EQ(a.size(), 100u);
  EXPECT_EQ(a, b);
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& part : a) {
    const auto& p = part.at(kM).provenance;
    EXPECT_TRUE(f.sel[kM].models.contains(p.model_batch));
    EXPECT_TRUE(f.sel[kM].inputs.contains(InputRef{p.input_batch, p.input_log}));
    seen.insert({p.model_batch.str(), p.input_log});
  }
  EXPECT_EQ(seen.size(), 4u);
  req.seed = 78;
  EXPECT_NE(generate_batch(req, f.reg), a);
  req.count = 0;
  EXPECT_THROW(generate_batch(req, f.reg), Error);
}

TEST(GenerateBatch, DrawOrderIsSortedMetricsFromOneStream) {
  TwoByTwo f;
  const MetricId other("a_first");
  ModelRecord mo = model("batch14", 3, 9);
  mo.metric = other;
  f.reg.add_model(mo);
  f.reg.add_input({BatchId("batch14"), "d14"}, input(30, 2.0, other));
  f.reg.add_input({BatchId("batch15"), "d15"}, input(30, 3.0, other));
  f.sel[other].models = {BatchId("batch14")};
  f.sel[other].inputs = {{BatchId("batch14"), "d14"}, {BatchId("batch15"), "d15"}};
  const auto parts = generate_batch(GenRequest{f.sel, 20, 3}, f.reg);
  Rng rng(3);
  for (const auto& part : parts) {
    ASSERT_EQ(part.size(), 2u);
    for (const MetricId& m : {other, kM}) {  // sorted order
      const DrawnPair p = draw_pair(f.sel, f.reg, m, rng);
      EXPECT_EQ(part.at(m).provenance.model_batch, p.model->batch);
      EXPECT_EQ(part.at(m).provenance.input_log, p.input_ref.log);
    }
  }
}

TEST(GenerateBatch, ErrorsCarryPartAndMetric) {
  TwoByTwo f;
  f.reg.add_input({BatchId("batch15"), "d15"}, input(3, 1.0));  // too short for L = 3
  GenRequest req;
  req.selection[kM].models = {BatchId("batch14")};
  req.selection[kM].inputs = {{BatchId("batch15"), "d15"}};
  try {
    generate_batch(req, f.reg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("part 0, metric load_x"), std::string::npos) << e.what();
  }
}

TEST(Random, UniformIndexAndDeriveSeed) {
  Rng rng(1);
  std::vector<int> counts(3, 0);
  for (int k = 0; k < 30000; ++k) ++counts[uniform_index(rng, 3)];
  for (int c : counts) EXPECT_NEAR(c / 30000.0, 1.0 / 3.0, 0.015);
  for (int k = 0; k < 1000; ++k) {
    const double x = uniform_real(rng, -1.5, 2.5);
    EXPECT_GE(x, -1.5);
    EXPECT_LT(x, 2.5);
  }
  EXPECT_EQ(derive_seed(5, "a"), derive_seed(5, "a"));
  EXPECT_NE(derive_seed(5, "a"), derive_seed(5, "b"));
  EXPECT_NE(derive_seed(5, "a"), derive_seed(6, "a"));
  // FNV-1a + splitmix64 evaluated independently in Python.
  EXPECT_EQ(derive_seed(0, "load_x\x1f" "batch14"), 18326786444552762062ULL);
  EXPECT_EQ(derive_seed(7, ""), 2542908220362270422ULL);
  EXPECT_EQ(derive_seed(123456789, "abc"), 14062158241844238676ULL);
  // The engine itself is the standard one; 10000th draw of the default seed.
  Rng standard;
  standard.discard(9999);
  EXPECT_EQ(standard(), 9981545732273789042ULL);
}
