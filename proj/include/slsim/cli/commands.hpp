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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "slsim/cli/config.hpp"
#include "slsim/privacy/leakage.hpp"
#include "slsim/scenario/dataset.hpp"
#include "slsim/splitsim/model.hpp"
#include "slsim/splitsim/trainer.hpp"

namespace slsim::cli {

struct CommandContext {
  ExperimentConfig config;
  std::filesystem::path out_dir;
  std::filesystem::path data_path;  // DSET1 file read or written
  std::ostream* log = nullptr;      // progress lines; may be null
};

struct LinkRow {
  nn::PoolWindow pool;
  std::uint64_t payload_bits = 0;
  double threshold = 0.0;
  double success_prob = 0.0;
  double expected_slots = 0.0;  // 1/p; +inf when the link is starved
};

std::vector<LinkRow> link_table(const ExperimentConfig& config);
/// Columns pooling,payload_bits,threshold,success_prob,expected_slots.
void write_link_csv(const std::vector<LinkRow>& rows, std::ostream& out);

/// One (modality, pooling) training run and its artefacts.
struct TrainResult {
  splitsim::Modality modality;
  nn::PoolWindow pool;
  splitsim::RunRecord record;
  double transition_rmse_db = 0.0;
  std::string tag;  // file-name stem, e.g. "img_rf_40x40" or "rf"
};

std::string run_tag(splitsim::Modality modality, nn::PoolWindow pool);

/// Validation frames, evenly strided, at most `budget` of them (0-based).
std::vector<std::size_t> privacy_samples(const scenario::SeriesDataset& dataset,
                                         std::size_t train_end, std::size_t budget);

/// Leakage for each configured pooling. The device CNN's convolutions are
/// reused with each pooling window; identity features compare raw frames
/// with themselves. Throws ConfigError when fewer than three samples exist.
std::vector<privacy::LeakageReport> privacy_sweep(const ExperimentConfig& config,
                                                  const scenario::SeriesDataset& dataset,
                                                  const splitsim::DeviceCnn* device);
/// Columns w_h,w_w,n,leakage,stress_raw,stress_feat.
void write_privacy_csv(const std::vector<privacy::LeakageReport>& rows, std::ostream& out);

/// Plain (P2) graymap, values linearly mapped from [lo, hi] to 0..255.
void write_pgm(const Tensor& image, double lo, double hi, std::ostream& out);

/// Frames shown in the feature-map dumps: the validation frame where the
/// blocker covers the most area and the three frames 3, 6 and 9 before it.
std::vector<std::size_t> dump_frames(const scenario::SeriesDataset& dataset, std::size_t train_end);

void cmd_gen_data(const CommandContext& ctx);
void cmd_link_table(const CommandContext& ctx);
std::vector<TrainResult> cmd_train(const CommandContext& ctx);
void cmd_privacy(const CommandContext& ctx);
/// Concatenates every CSV in the output directory, in name order, into report.txt.
void cmd_report(const CommandContext& ctx);

}  // namespace slsim::cli
