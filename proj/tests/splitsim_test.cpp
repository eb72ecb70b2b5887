/*
 * Copyright 2026 The slsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "slsim/error.hpp"
#include "slsim/nn/grad_check.hpp"
#include "slsim/scenario/generator.hpp"
#include "slsim/splitsim/trainer.hpp"

using namespace slsim;
using namespace slsim::splitsim;

namespace {

// 8x8 frames keep the device CNN cheap while exercising every code path.
scenario::SeriesDataset small_dataset(std::size_t frames, double event_rate = 20.0,
                                      double jitter = 0.5, std::uint64_t seed = 3) {
  scenario::BlockageScenario s;
  s.blocker_h = 6;
  s.blocker_w = 4;
  s.los_band_w = 2;
  s.event_rate = event_rate;
  s.power_jitter_db = jitter;
  s.seed = seed;
  return scenario::generate(s, frames, 8, 8, 33.0);
}

SplitConfig small_config(Modality m, nn::PoolWindow pool = {8, 8}) {
  SplitConfig c;
  c.modality = m;
  c.pool = pool;
  c.minibatch = 16;
  c.train_end = 600;
  c.conv_channels = 4;
  c.hidden = 8;
  c.max_epochs = 2;
  return c;
}

class PerfectPredictor final : public PowerPredictor {
 public:
  std::vector<double> predict_dbm(const scenario::SeriesDataset& d, std::span<const std::size_t> anchors,
                                  std::size_t, std::size_t horizon) const override {
    std::vector<double> out;
    for (std::size_t k : anchors) out.push_back(d.powers_dbm[k + horizon - 1]);
    return out;
  }
};

}  // namespace

TEST(Windows, DefaultSplit) {
  const auto w = make_windows(13228, 4, 120.0, 33.0);
  EXPECT_EQ(w.horizon, 4u);
  ASSERT_EQ(w.train.size(), 9925u);
  EXPECT_EQ(w.train.front(), 4u);
  EXPECT_EQ(w.train.back(), 9928u);
  ASSERT_EQ(w.val.size(), 3296u);
  EXPECT_EQ(w.val.front(), 9929u);
  EXPECT_EQ(w.val.back(), 13224u);
}

TEST(Windows, UnitHorizonAndErrors) {
  const auto w = make_windows(50, 1, 33.0, 33.0, 40);
  EXPECT_EQ(w.horizon, 1u);
  EXPECT_EQ(w.train.front(), 1u);
  EXPECT_EQ(w.val.back(), 49u);
  EXPECT_THROW(make_windows(4 + 4 - 1, 4, 120.0, 33.0), DimensionError);
  EXPECT_NO_THROW(make_windows(4 + 4, 4, 120.0, 33.0));
}

TEST(SplitModel, CutWidthFollowsPooling) {
  ModelShape s;
  s.pool = {4, 4};
  EXPECT_EQ(s.cut_width(), 100u);
  EXPECT_EQ(s.lstm_input(), 101u);
  s.modality = Modality::img;
  EXPECT_EQ(s.lstm_input(), 100u);
  s.modality = Modality::rf;
  EXPECT_EQ(s.lstm_input(), 1u);
  s.pool = {3, 3};
  EXPECT_THROW(s.validate(), DimensionError);
}

TEST(SplitModel, FullCompositeGradients) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ModelShape shape;
    shape.img_h = shape.img_w = 6;
    shape.pool = {seed % 2 ? 3u : 6u, 3};
    shape.conv_channels = 2;
    shape.hidden = 3;
    SplitModel model(shape, seed);
    Rng rng(seed + 500);
    std::vector<std::vector<Tensor>> frames(2);
    std::vector<WindowInputs> batch(2);
    for (std::size_t b = 0; b < 2; ++b) {
      for (int j = 0; j < 4; ++j) {
        Tensor f({6, 6});
        for (auto& v : f.values()) v = rng.uniform();
        frames[b].push_back(f);
        batch[b].powers.push_back(rng.uniform(-1, 1));
      }
      batch[b].target = rng.uniform(-1, 1);
    }
    auto loss = [&] {
      std::vector<WindowInputs> in = batch;
      for (std::size_t b = 0; b < 2; ++b)
        for (const auto& f : frames[b]) in[b].features.push_back(model.device_forward(f));
      return model.server_pass(in, nullptr).loss;
    };
    auto analytic = [&] {
      ModelGrads g = model.zero_grads();
      std::vector<WindowInputs> in = batch;
      std::vector<std::vector<DeviceCnn::Cache>> caches(2, std::vector<DeviceCnn::Cache>(4));
      for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t j = 0; j < 4; ++j) in[b].features.push_back(model.device_forward(frames[b][j], &caches[b][j]));
      auto pass = model.server_pass(in, &g);
      for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t j = 0; j < 4; ++j) model.device().backward(caches[b][j], pass.feature_grads[b][j], g.conv1, g.conv2);
      std::vector<Tensor> out;
      for (Tensor* t : g.tensors()) out.push_back(*t);
      return out;
    };
    nn::GradCheckProblem prob{model.parameters(), loss, analytic};
    EXPECT_LT(nn::grad_check(prob), 1e-4) << "seed " << seed;
  }
}

TEST(SlStep, RfHasNoCutTraffic) {
  const auto d = small_dataset(800);
  auto cfg = small_config(Modality::rf);
  cfg.compute_time_s = 0.005;
  SplitTrainer t(cfg, d);
  const std::vector<std::size_t> batch(t.windows().train.begin(), t.windows().train.begin() + 16);
  auto r = t.step(batch);
  EXPECT_FALSE(r.starved);
  EXPECT_EQ(r.row.ul_slots, 0u);
  EXPECT_EQ(r.row.dl_slots, 0u);
  EXPECT_EQ(r.row.ul_bits, 0u);
  EXPECT_DOUBLE_EQ(t.clock_s(), 0.005);
}

TEST(SlStep, OnePixelCutUsesOneSlot) {
  const auto d = scenario::generate(scenario::BlockageScenario{}, 200);
  SplitConfig cfg;
  cfg.train_end = 150;
  cfg.minibatch = 8;
  SplitTrainer t(cfg, d);
  for (int i = 0; i < 5; ++i) {
    const std::vector<std::size_t> batch(t.windows().train.begin() + i * 8, t.windows().train.begin() + i * 8 + 8);
    auto r = t.step(batch);
    EXPECT_EQ(r.row.ul_slots, 1u);
    EXPECT_EQ(r.row.dl_slots, 1u);
    EXPECT_EQ(r.row.ul_bits, 40u * 40u / 1600u * 8u * 32u * 4u);
  }
}

TEST(SlStep, FullResolutionStarves) {
  const auto d = scenario::generate(scenario::BlockageScenario{}, 300);
  SplitConfig cfg;
  cfg.pool = {1, 1};
  cfg.train_end = 200;
  SplitTrainer t(cfg, d);
  const auto before = t.model().server().head.weights;
  const auto record = t.run();
  EXPECT_EQ(record.outcome, Outcome::starved);
  EXPECT_TRUE(record.steps.empty());
  EXPECT_EQ(t.model().server().head.weights, before);
}

TEST(Train, EpochCapBindsWithUnreachableTarget) {
  const auto d = small_dataset(800);
  auto cfg = small_config(Modality::img_rf);
  cfg.stop_rmse_db = 1e-9;
  cfg.max_epochs = 3;
  const auto rec = train(cfg, d);
  EXPECT_EQ(rec.outcome, Outcome::epoch_capped);
  EXPECT_EQ(rec.epochs.size(), 3u);
  // 597 train windows -> 37 full minibatches of 16 per epoch.
  EXPECT_EQ(rec.steps.size(), 3u * 37u);
}

TEST(Train, ClockAndPayloadAccounting) {
  const auto d = small_dataset(800);
  auto cfg = small_config(Modality::img_rf, {4, 4});
  cfg.compute_time_s = 0.002;
  // 8192 bits over 250 kHz: per-slot success near exp(-1.3), so retransmissions happen.
  cfg.uplink.bandwidth_hz = 2.5e5;
  SplitTrainer t(cfg, d);
  const auto rec = t.run();
  ASSERT_FALSE(rec.steps.empty());
  const auto bits = channel::payload_bits(cfg.payload(8, 8));
  std::uint64_t ul = 0, dl = 0;
  double prev = 0.0;
  bool retransmitted = false;
  for (const auto& r : rec.steps) {
    EXPECT_EQ(r.ul_bits, bits);
    EXPECT_EQ(r.dl_bits, bits);
    EXPECT_GE(r.ul_slots, 1u);
    EXPECT_GE(r.dl_slots, 1u);
    retransmitted |= r.ul_slots > 1;
    ul += r.ul_slots;
    dl += r.dl_slots;
    EXPECT_GT(r.sim_time_s, prev);
    prev = r.sim_time_s;
    EXPECT_EQ(r.sim_time_s, cfg.compute_time_s * static_cast<double>(r.step) +
                                cfg.uplink.slot_s * static_cast<double>(ul) +
                                cfg.downlink.slot_s * static_cast<double>(dl));
  }
  EXPECT_TRUE(retransmitted);
}

TEST(Train, DeterministicRecords) {
  const auto d = small_dataset(800);
  auto cfg = small_config(Modality::img_rf, {4, 4});
  std::ostringstream a, b;
  write_run_csv(train(cfg, d), a);
  write_run_csv(train(cfg, d), b);
  EXPECT_EQ(a.str(), b.str());
  cfg.seed = 2;
  std::ostringstream c;
  write_run_csv(train(cfg, d), c);
  EXPECT_NE(a.str(), c.str());
}

TEST(Train, TimeBudgetStopsRun) {
  const auto d = small_dataset(800);
  auto cfg = small_config(Modality::img_rf);
  cfg.time_budget_s = 0.02;
  const auto rec = train(cfg, d);
  EXPECT_EQ(rec.outcome, Outcome::time_budget);
  EXPECT_EQ(rec.steps.size(), 10u);  // two 1 ms slots per step
  ASSERT_TRUE(rec.steps.back().val_rmse_db.has_value());
}

TEST(Train, ConstantTraceLearnedQuickly) {
  const auto d = small_dataset(13228, 0.0, 0.0);
  for (Modality m : {Modality::rf, Modality::img, Modality::img_rf}) {
    SplitConfig cfg;
    cfg.modality = m;
    cfg.pool = {4, 4};
    cfg.conv_channels = 4;
    cfg.max_epochs = 5;
    cfg.stop_rmse_db = 0.1;
    const auto rec = train(cfg, d);
    EXPECT_LT(rec.final_rmse_db, 0.1) << to_string(m);
    EXPECT_LE(rec.epochs.size(), 5u);
  }
}

TEST(Train, OneStepReducesBatchLoss) {
  const auto d = small_dataset(800);
  int improved = 0;
  const int seeds = 40;
  for (int seed = 0; seed < seeds; ++seed) {
    auto cfg = small_config(Modality::img_rf, {4, 4});
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.adam.lr = 1e-3;
    SplitTrainer t(cfg, d);
    const std::vector<std::size_t> batch(t.windows().train.begin() + seed,
                                         t.windows().train.begin() + seed + 16);
    const double before = t.batch_loss(batch);
    t.step(batch);
    improved += t.batch_loss(batch) < before ? 1 : 0;
  }
  EXPECT_GE(improved, static_cast<int>(std::ceil(0.95 * seeds)));
}

TEST(Trace, SingleRowAndPerfectStub) {
  const auto d = small_dataset(800);
  PerfectPredictor perfect;
  const auto one = predict_trace(perfect, d, 4, 4, 10, 10);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].anchor, 10u);
  const auto all = predict_trace(perfect, d, 4, 4, 4, 796);
  for (const auto& r : all) EXPECT_EQ(r.truth_dbm, r.pred_dbm);
  EXPECT_THROW(predict_trace(perfect, d, 4, 4, 3, 10), DimensionError);
  EXPECT_THROW(predict_trace(perfect, d, 4, 4, 700, 797), DimensionError);
}

TEST(Trace, TransitionAnchorsSurroundSwitches) {
  scenario::SeriesDataset d;
  d.img_h = d.img_w = 1;
  d.powers_dbm = std::vector<double>(40, -60.0);
  for (int i = 20; i < 30; ++i) d.powers_dbm[i] = -80.0;
  d.pixels.assign(40, 1.0f);
  std::vector<std::size_t> anchors;
  for (std::size_t k = 1; k <= 36; ++k) anchors.push_back(k);
  const auto t = transition_anchors(d, anchors, 4, -70.0);
  // Switches at 0-based frames 20 and 30; target k+3 must lie within 16..24 or 26..34.
  std::vector<std::size_t> want;
  for (std::size_t k = 13; k <= 31; ++k)
    if (k != 22) want.push_back(k);
  EXPECT_EQ(t, want);
}

TEST(Train, CoarserCutBuysMoreStepsPerSecond) {
  const auto d = small_dataset(800);
  auto coarse = small_config(Modality::img_rf, {8, 8});
  coarse.uplink.bandwidth_hz = 1.03e6;  // 2x2 payload (32768 bits) decodes with p around 0.06
  coarse.max_epochs = 1000;
  coarse.stop_rmse_db = 1e-9;
  coarse.time_budget_s = 5.0;
  auto fine = coarse;
  fine.pool = {2, 2};

  auto expected_slots = [&](const SplitConfig& c) {
    const auto bits = channel::payload_bits(c.payload(8, 8));
    return std::pair{1.0 / channel::slot_success_prob(bits, c.uplink),
                     1.0 / channel::slot_success_prob(bits, c.downlink)};
  };
  const auto [fine_ul, fine_dl] = expected_slots(fine);
  const auto [coarse_ul, coarse_dl] = expected_slots(coarse);
  ASSERT_GT(fine_ul, 5.0);
  ASSERT_LT(fine_ul, 50.0);
  const double ratio = (fine_ul + fine_dl) / (coarse_ul + coarse_dl);

  const auto rc = train(coarse, d);
  const auto rf = train(fine, d);
  ASSERT_EQ(rc.outcome, Outcome::time_budget);
  ASSERT_EQ(rf.outcome, Outcome::time_budget);
  const double observed = static_cast<double>(rc.steps.size()) / static_cast<double>(rf.steps.size());
  // Steps of the fine run are random (geometric uplink slots); allow three standard errors.
  const double p = 1.0 / fine_ul;
  const double cv = std::sqrt(1.0 - p) / p / (fine_ul + fine_dl) / std::sqrt(static_cast<double>(rf.steps.size()));
  EXPECT_GE(observed, ratio * (1.0 - 3.0 * cv)) << "expected ratio " << ratio;
  EXPECT_NEAR(observed, ratio, 3.0 * cv * ratio + 0.01 * ratio);
}
