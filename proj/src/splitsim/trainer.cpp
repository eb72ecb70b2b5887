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

#include "slsim/splitsim/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <cstdio>
#include <ostream>

#include "slsim/error.hpp"

namespace slsim::splitsim {
namespace {

enum Stream : std::uint64_t { kInit = 11, kShuffle = 12, kUplink = 13, kDownlink = 14 };

// Cut tensors travel at the configured bit depth; 32 bits means float32.
void quantize(Tensor& t, std::size_t bit_depth) {
  if (bit_depth != 32) return;
  for (auto& v : t.values()) v = static_cast<double>(static_cast<float>(v));
}

void write_number(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  out << buf;
}

// Cut features for every frame the anchors touch, keyed by 0-based frame index.
std::map<std::size_t, Tensor> frame_features(const SplitModel& model,
                                             const scenario::SeriesDataset& dataset,
                                             std::span<const std::size_t> anchors,
                                             std::size_t seq_len) {
  std::map<std::size_t, Tensor> out;
  if (!model.shape().uses_images()) return out;
  for (std::size_t k : anchors)
    for (std::size_t j = k - seq_len; j < k; ++j)
      if (!out.contains(j)) out.emplace(j, model.device_forward(dataset.frame(j)));
  return out;
}

}  // namespace

void SplitConfig::validate() const {
  if (!(stop_rmse_db > 0.0)) throw ConfigError("split: stop_rmse must be positive");
  if (max_epochs < 1) throw ConfigError("split: max_epochs must be at least 1");
  if (minibatch < 1) throw ConfigError("split: minibatch must be at least 1");
  if (bit_depth < 1) throw ConfigError("split: bit_depth must be at least 1");
  if (seq_len < 1) throw ConfigError("split: seq_len must be at least 1");
  if (!(compute_time_s >= 0.0)) throw ConfigError("split: compute_time must be non-negative");
  if (!(time_budget_s >= 0.0)) throw ConfigError("split: time_budget must be non-negative");
  if (starvation_cap < 1) throw ConfigError("split: starvation_cap must be at least 1");
  uplink.validate();
  downlink.validate();
  adam.validate();
}

ModelShape SplitConfig::model_shape(std::size_t img_h, std::size_t img_w) const {
  ModelShape s;
  s.modality = modality;
  s.img_h = img_h;
  s.img_w = img_w;
  s.pool = pool;
  s.conv_channels = conv_channels;
  s.kernel = kernel;
  s.hidden = hidden;
  return s;
}

channel::PayloadSpec SplitConfig::payload(std::size_t img_h, std::size_t img_w) const {
  return {img_h, img_w, pool.h, pool.w, minibatch, bit_depth, seq_len};
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::converged: return "converged";
    case Outcome::epoch_capped: return "epoch-capped";
    case Outcome::time_budget: return "time-budget";
    case Outcome::starved: return "starved";
  }
  return "?";
}

void write_run_csv(const RunRecord& record, std::ostream& out) {
  out << "step,epoch,loss,ul_slots,dl_slots,sim_time_s,val_rmse_db\n";
  for (const auto& r : record.steps) {
    out << r.step << ',' << r.epoch << ',';
    write_number(out, r.loss_db2);
    out << ',' << r.ul_slots << ',' << r.dl_slots << ',';
    write_number(out, r.sim_time_s);
    out << ',';
    if (r.val_rmse_db) write_number(out, *r.val_rmse_db);
    out << '\n';
  }
}

void write_trace_csv(const std::vector<TraceRow>& trace, std::ostream& out) {
  out << "k,truth_dbm,pred_dbm\n";
  for (const auto& r : trace) {
    out << r.anchor << ',';
    write_number(out, r.truth_dbm);
    out << ',';
    write_number(out, r.pred_dbm);
    out << '\n';
  }
}

PowerScaler PowerScaler::fit(std::span<const double> powers) {
  if (powers.empty()) throw ConfigError("scaler: no powers to fit");
  double mean = 0.0;
  for (double p : powers) mean += p;
  mean /= static_cast<double>(powers.size());
  double var = 0.0;
  for (double p : powers) var += (p - mean) * (p - mean);
  var /= static_cast<double>(powers.size());
  const double sd = std::sqrt(var);
  // A flat trace carries no scale; fall back to identity scaling.
  return {mean, sd > 1e-6 ? sd : 1.0};
}

std::vector<double> ModelPredictor::predict_dbm(const scenario::SeriesDataset& dataset,
                                                std::span<const std::size_t> anchors,
                                                std::size_t seq_len, std::size_t) const {
  const auto features = frame_features(model_, dataset, anchors, seq_len);
  std::vector<double> out;
  out.reserve(anchors.size());
  std::vector<double> powers(seq_len);
  for (std::size_t k : anchors) {
    std::vector<Tensor> feats;
    for (std::size_t j = 0; j < seq_len; ++j) {
      const std::size_t idx = k - seq_len + j;
      powers[j] = scaler_.to_model(dataset.powers_dbm[idx]);
      if (model_.shape().uses_images()) feats.push_back(features.at(idx));
    }
    out.push_back(scaler_.to_dbm(model_.predict(feats, powers)));
  }
  return out;
}

SplitTrainer::SplitTrainer(SplitConfig config, const scenario::SeriesDataset& dataset)
    : config_(std::move(config)),
      dataset_(dataset),
      windows_(make_windows(dataset.size(), config_.seq_len, config_.horizon_ms,
                            dataset.frame_interval_ms, config_.train_end)),
      scaler_(PowerScaler::fit(std::span<const double>(dataset.powers_dbm)
                                   .first(std::min(config_.train_end, dataset.size())))),
      model_(config_.model_shape(dataset.img_h, dataset.img_w), Rng::stream(config_.seed, kInit).next_u64()),
      shuffle_rng_(Rng::stream(config_.seed, kShuffle)),
      uplink_rng_(Rng::stream(config_.seed, kUplink)),
      downlink_rng_(Rng::stream(config_.seed, kDownlink)) {
  config_.validate();
  if (windows_.train.size() < config_.minibatch)
    throw ConfigError("split: fewer training windows than one minibatch");
  if (windows_.val.empty()) throw ConfigError("split: no validation windows after train_end");
  for (Tensor* p : model_.parameters()) adam_.emplace_back(p->shape(), config_.adam);
}

WindowInputs SplitTrainer::window_inputs(std::size_t anchor, std::vector<Tensor> features) const {
  WindowInputs in;
  in.features = std::move(features);
  for (std::size_t j = anchor - config_.seq_len; j < anchor; ++j)
    in.powers.push_back(scaler_.to_model(dataset_.powers_dbm[j]));
  in.target = scaler_.to_model(dataset_.powers_dbm[anchor + windows_.horizon - 1]);
  return in;
}

StepResult SplitTrainer::step(std::span<const std::size_t> anchors, std::size_t epoch) {
  if (anchors.empty()) throw DimensionError("step: empty minibatch");
  const std::size_t seq_len = config_.seq_len;
  const bool images = model_.shape().uses_images();
  StepResult result;
  StepRow& row = result.row;
  row.epoch = epoch;

  // Device: CNN over every frame of every window, cut activations quantised.
  std::vector<std::vector<DeviceCnn::Cache>> caches(anchors.size());
  std::vector<WindowInputs> batch;
  batch.reserve(anchors.size());
  for (std::size_t b = 0; b < anchors.size(); ++b) {
    std::vector<Tensor> features;
    if (images) {
      caches[b].resize(seq_len);
      for (std::size_t j = 0; j < seq_len; ++j) {
        Tensor f = model_.device_forward(dataset_.frame(anchors[b] - seq_len + j), &caches[b][j]);
        quantize(f, config_.bit_depth);
        features.push_back(std::move(f));
      }
    }
    batch.push_back(window_inputs(anchors[b], std::move(features)));
  }

  if (images) {
    auto spec = config_.payload(dataset_.img_h, dataset_.img_w);
    spec.minibatch = anchors.size();
    row.ul_bits = channel::payload_bits(spec);
    const auto ul = channel::transfer_slots(row.ul_bits, config_.uplink, uplink_rng_, config_.starvation_cap);
    row.ul_slots = ul.slots;
    if (ul.starved) {
      result.starved = true;
      return result;
    }
  }

  ModelGrads grads = model_.zero_grads();
  auto pass = model_.server_pass(batch, &grads);
  row.loss_db2 = pass.loss * scaler_.std * scaler_.std;

  if (images) {
    // Gradients w.r.t. the cut have the activations' element count.
    row.dl_bits = row.ul_bits;
    const auto dl = channel::transfer_slots(row.dl_bits, config_.downlink, downlink_rng_, config_.starvation_cap);
    row.dl_slots = dl.slots;
    if (dl.starved) {
      result.starved = true;
      return result;
    }
    for (std::size_t b = 0; b < anchors.size(); ++b)
      for (std::size_t j = 0; j < seq_len; ++j) {
        quantize(pass.feature_grads[b][j], config_.bit_depth);
        model_.device().backward(caches[b][j], pass.feature_grads[b][j], grads.conv1, grads.conv2);
      }
  }

  auto params = model_.parameters();
  auto grad_tensors = grads.tensors();
  for (std::size_t i = 0; i < params.size(); ++i) nn::adam_step(*params[i], *grad_tensors[i], adam_[i]);

  ++steps_;
  ul_slots_total_ += row.ul_slots;
  dl_slots_total_ += row.dl_slots;
  row.step = steps_;
  row.sim_time_s = clock_s();
  return result;
}

double SplitTrainer::clock_s() const {
  return config_.compute_time_s * static_cast<double>(steps_) +
         config_.uplink.slot_s * static_cast<double>(ul_slots_total_) +
         config_.downlink.slot_s * static_cast<double>(dl_slots_total_);
}

double SplitTrainer::batch_loss(std::span<const std::size_t> anchors) const {
  const auto features = frame_features(model_, dataset_, anchors, config_.seq_len);
  std::vector<WindowInputs> batch;
  for (std::size_t k : anchors) {
    std::vector<Tensor> feats;
    if (model_.shape().uses_images())
      for (std::size_t j = k - config_.seq_len; j < k; ++j) feats.push_back(features.at(j));
    batch.push_back(window_inputs(k, std::move(feats)));
  }
  return model_.server_pass(batch, nullptr).loss;
}

double SplitTrainer::rmse_db(std::span<const std::size_t> anchors) const {
  return splitsim::rmse_db(predictor(), dataset_, anchors, config_.seq_len, windows_.horizon);
}

RunRecord SplitTrainer::run() {
  RunRecord record;
  const std::size_t batches = windows_.train.size() / config_.minibatch;
  std::vector<std::size_t> order = windows_.train;
  auto finish = [&](Outcome outcome, std::size_t epoch, bool attach) {
    record.outcome = outcome;
    record.final_rmse_db = rmse_db(windows_.val);
    record.sim_time_s = clock_s();
    if (attach) {
      if (!record.steps.empty()) record.steps.back().val_rmse_db = record.final_rmse_db;
      record.epochs.push_back({epoch, steps_, clock_s(), record.final_rmse_db});
    }
    return record;
  };

  for (std::size_t epoch = 1; epoch <= config_.max_epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle_rng_.below(i)]);
    for (std::size_t b = 0; b < batches; ++b) {
      const auto batch = std::span<const std::size_t>(order).subspan(b * config_.minibatch, config_.minibatch);
      auto result = step(batch, epoch);
      if (result.starved) return finish(Outcome::starved, epoch, false);
      record.steps.push_back(result.row);
      if (config_.time_budget_s > 0.0 && clock_s() >= config_.time_budget_s)
        return finish(Outcome::time_budget, epoch, true);
    }
    const double rmse = rmse_db(windows_.val);
    record.steps.back().val_rmse_db = rmse;
    record.epochs.push_back({epoch, steps_, clock_s(), rmse});
    record.final_rmse_db = rmse;
    record.sim_time_s = clock_s();
    if (rmse <= config_.stop_rmse_db) {
      record.outcome = Outcome::converged;
      return record;
    }
  }
  record.outcome = Outcome::epoch_capped;
  return record;
}

RunRecord train(const SplitConfig& config, const scenario::SeriesDataset& dataset) {
  SplitTrainer trainer(config, dataset);
  return trainer.run();
}

std::vector<TraceRow> predict_trace(const PowerPredictor& predictor,
                                    const scenario::SeriesDataset& dataset, std::size_t seq_len,
                                    std::size_t horizon, std::size_t first, std::size_t last) {
  if (first > last || first < seq_len || last + horizon > dataset.size())
    throw DimensionError("trace: anchors " + std::to_string(first) + ".." + std::to_string(last) +
                         " outside valid windows " + std::to_string(seq_len) + ".." +
                         std::to_string(dataset.size() >= horizon ? dataset.size() - horizon : 0));
  std::vector<std::size_t> anchors;
  for (std::size_t k = first; k <= last; ++k) anchors.push_back(k);
  const auto preds = predictor.predict_dbm(dataset, anchors, seq_len, horizon);
  std::vector<TraceRow> rows;
  for (std::size_t i = 0; i < anchors.size(); ++i)
    rows.push_back({anchors[i], dataset.powers_dbm[anchors[i] + horizon - 1], preds[i]});
  return rows;
}

double rmse_db(const PowerPredictor& predictor, const scenario::SeriesDataset& dataset,
               std::span<const std::size_t> anchors, std::size_t seq_len, std::size_t horizon) {
  if (anchors.empty()) throw DimensionError("rmse: no anchors");
  const auto preds = predictor.predict_dbm(dataset, anchors, seq_len, horizon);
  double acc = 0.0;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const double d = preds[i] - dataset.powers_dbm[anchors[i] + horizon - 1];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(anchors.size()));
}

std::vector<std::size_t> transition_anchors(const scenario::SeriesDataset& dataset,
                                            std::span<const std::size_t> anchors,
                                            std::size_t horizon, double threshold_dbm) {
  const std::size_t n = dataset.size();
  // near[i]: a state switch happens within +/- horizon of 0-based frame i.
  std::vector<bool> near(n, false);
  for (std::size_t i = 1; i < n; ++i) {
    const bool prev = dataset.powers_dbm[i - 1] < threshold_dbm;
    const bool cur = dataset.powers_dbm[i] < threshold_dbm;
    if (prev == cur) continue;
    const std::size_t lo = i >= horizon ? i - horizon : 0;
    const std::size_t hi = std::min(n - 1, i + horizon);
    for (std::size_t j = lo; j <= hi; ++j) near[j] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t k : anchors) {
    const std::size_t target = k + horizon - 1;
    if (target < n && near[target]) out.push_back(k);
  }
  return out;
}

}  // namespace slsim::splitsim
