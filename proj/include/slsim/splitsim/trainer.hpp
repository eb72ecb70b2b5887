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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slsim/channel/link.hpp"
#include "slsim/nn/adam.hpp"
#include "slsim/rng.hpp"
#include "slsim/scenario/dataset.hpp"
#include "slsim/splitsim/model.hpp"
#include "slsim/splitsim/windows.hpp"

namespace slsim::splitsim {

struct SplitConfig {
  Modality modality = Modality::img_rf;
  nn::PoolWindow pool{40, 40};
  std::size_t minibatch = 64;
  std::size_t bit_depth = 32;
  std::size_t seq_len = 4;
  double horizon_ms = 120.0;
  std::size_t train_end = kDefaultTrainEnd;
  channel::LinkParams uplink = channel::LinkParams::default_uplink();
  channel::LinkParams downlink = channel::LinkParams::default_downlink();
  double compute_time_s = 0.0;
  double stop_rmse_db = 2.7;
  std::size_t max_epochs = 100;
  double time_budget_s = 0.0;  // 0 disables the simulated-time budget
  std::uint64_t starvation_cap = channel::kDefaultStarvationCap;
  std::uint64_t seed = 1;
  nn::AdamConfig adam;
  std::size_t conv_channels = 8;
  std::size_t kernel = 3;
  std::size_t hidden = 32;

  void validate() const;
  ModelShape model_shape(std::size_t img_h, std::size_t img_w) const;
  /// Cut payload of one step for frames of the given size.
  channel::PayloadSpec payload(std::size_t img_h, std::size_t img_w) const;
};

enum class Outcome { converged, epoch_capped, time_budget, starved };
std::string to_string(Outcome o);

struct StepRow {
  std::size_t step = 0;   // 1-based
  std::size_t epoch = 0;  // 1-based
  double loss_db2 = 0.0;  // training MSE in physical units (dB^2)
  std::uint64_t ul_slots = 0;
  std::uint64_t dl_slots = 0;
  std::uint64_t ul_bits = 0;
  std::uint64_t dl_bits = 0;
  double sim_time_s = 0.0;
  std::optional<double> val_rmse_db;
};

struct EpochRow {
  std::size_t epoch = 0;
  std::size_t steps = 0;  // cumulative
  double sim_time_s = 0.0;
  double val_rmse_db = 0.0;
};

struct RunRecord {
  std::vector<StepRow> steps;
  std::vector<EpochRow> epochs;
  Outcome outcome = Outcome::epoch_capped;
  double final_rmse_db = 0.0;
  double sim_time_s = 0.0;
};

/// Writes columns step,epoch,loss,ul_slots,dl_slots,sim_time_s,val_rmse_db.
void write_run_csv(const RunRecord& record, std::ostream& out);

/// Standardisation of powers in dB using train-split statistics.
struct PowerScaler {
  double mean = 0.0;
  double std = 1.0;

  static PowerScaler fit(std::span<const double> powers_dbm);
  double to_model(double dbm) const { return (dbm - mean) / std; }
  double to_dbm(double z) const { return z * std + mean; }
};

/// Maps window anchors to predicted powers in dBm.
class PowerPredictor {
 public:
  virtual ~PowerPredictor() = default;
  virtual std::vector<double> predict_dbm(const scenario::SeriesDataset& dataset,
                                          std::span<const std::size_t> anchors, std::size_t seq_len,
                                          std::size_t horizon) const = 0;
};

class ModelPredictor final : public PowerPredictor {
 public:
  ModelPredictor(const SplitModel& model, PowerScaler scaler) : model_(model), scaler_(scaler) {}
  std::vector<double> predict_dbm(const scenario::SeriesDataset& dataset,
                                  std::span<const std::size_t> anchors, std::size_t seq_len,
                                  std::size_t horizon) const override;

 private:
  const SplitModel& model_;
  PowerScaler scaler_;
};

struct StepResult {
  bool starved = false;
  StepRow row;
};

/// Owns one split-learning run: model, optimizer states, simulated clock
/// and the seeded channel and shuffle streams.
class SplitTrainer {
 public:
  SplitTrainer(SplitConfig config, const scenario::SeriesDataset& dataset);

  const SplitConfig& config() const { return config_; }
  const WindowSplit& windows() const { return windows_; }
  const PowerScaler& scaler() const { return scaler_; }
  const SplitModel& model() const { return model_; }
  SplitModel& model() { return model_; }
  /// compute_time * steps + uplink slot_len * uplink slots + downlink slot_len * downlink slots.
  double clock_s() const;
  std::size_t steps_taken() const { return steps_; }

  /// One protocol round over the given anchors: device forward, uplink,
  /// server forward/backward, downlink, device backward, Adam update.
  StepResult step(std::span<const std::size_t> anchors, std::size_t epoch = 1);

  /// Standardised MSE of the current model on the anchors, no airtime charged.
  double batch_loss(std::span<const std::size_t> anchors) const;

  /// Validation RMSE in dB over the given anchors.
  double rmse_db(std::span<const std::size_t> anchors) const;

  /// Full training loop with shuffling, per-epoch validation and the stopping rules.
  RunRecord run();

  ModelPredictor predictor() const { return ModelPredictor(model_, scaler_); }

 private:
  WindowInputs window_inputs(std::size_t anchor, std::vector<Tensor> features) const;

  SplitConfig config_;
  const scenario::SeriesDataset& dataset_;
  WindowSplit windows_;
  PowerScaler scaler_;
  SplitModel model_;
  std::vector<nn::AdamState> adam_;
  Rng shuffle_rng_;
  Rng uplink_rng_;
  Rng downlink_rng_;
  std::size_t steps_ = 0;
  std::uint64_t ul_slots_total_ = 0;
  std::uint64_t dl_slots_total_ = 0;
};

/// Convenience wrapper: build a trainer and run it to completion.
RunRecord train(const SplitConfig& config, const scenario::SeriesDataset& dataset);

struct TraceRow {
  std::size_t anchor = 0;
  double truth_dbm = 0.0;
  double pred_dbm = 0.0;
};

/// Truth and prediction for anchors first..last (1-based, inclusive).
std::vector<TraceRow> predict_trace(const PowerPredictor& predictor,
                                    const scenario::SeriesDataset& dataset, std::size_t seq_len,
                                    std::size_t horizon, std::size_t first, std::size_t last);

/// Writes columns k,truth_dbm,pred_dbm.
void write_trace_csv(const std::vector<TraceRow>& trace, std::ostream& out);

double rmse_db(const PowerPredictor& predictor, const scenario::SeriesDataset& dataset,
               std::span<const std::size_t> anchors, std::size_t seq_len, std::size_t horizon);

/// Anchors whose target lies within +/- horizon frames of a LoS <-> non-LoS
/// switch, where a frame counts as blocked when its power is below the threshold.
std::vector<std::size_t> transition_anchors(const scenario::SeriesDataset& dataset,
                                            std::span<const std::size_t> anchors,
                                            std::size_t horizon, double threshold_dbm);

}  // namespace slsim::splitsim
