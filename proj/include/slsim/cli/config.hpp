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
#include <string>
#include <vector>

#include "slsim/channel/link.hpp"
#include "slsim/nn/layers.hpp"
#include "slsim/scenario/generator.hpp"
#include "slsim/splitsim/trainer.hpp"

namespace slsim::cli {

/// Link constants in the units they are quoted in.
struct LinkSection {
  double tx_power_dbm = 0.0;
  double bandwidth_mhz = 0.0;
  double distance_m = 4.0;
  double path_loss_exp = 5.0;
  double noise_density_dbm_hz = -174.0;
  double slot_ms = 1.0;

  channel::LinkParams params(channel::Direction direction) const;
};

struct ScenarioSection {
  scenario::BlockageScenario model;
  std::size_t frames = 13228;
  std::size_t img_h = 40;
  std::size_t img_w = 40;
  double frame_interval_ms = 33.0;
};

struct SplitSection {
  std::vector<splitsim::Modality> modalities{splitsim::Modality::rf, splitsim::Modality::img,
                                             splitsim::Modality::img_rf};
  std::vector<nn::PoolWindow> poolings{{40, 40}};
  std::size_t minibatch = 64;
  std::size_t bit_depth = 32;
  std::size_t seq_len = 4;
  double horizon_ms = 120.0;
  std::size_t train_end = splitsim::kDefaultTrainEnd;
  double compute_time_ms = 0.0;
  double stop_rmse_db = 2.7;
  std::size_t max_epochs = 100;
  double time_budget_s = 0.0;
  std::uint64_t starvation_cap = channel::kDefaultStarvationCap;
  std::uint64_t seed = 1;
  double learning_rate = 0.001;
  std::size_t conv_channels = 8;
  std::size_t kernel = 3;
  std::size_t hidden = 32;
  /// Received power below this counts as blocked when scoring transition windows.
  double blocked_threshold_dbm = -70.0;
};

struct LinkTableSection {
  std::vector<nn::PoolWindow> poolings{{1, 1}, {4, 4}, {10, 10}, {40, 40}};
};

enum class FeatureSource { trained, random, identity };
std::string to_string(FeatureSource f);

struct PrivacySection {
  std::vector<nn::PoolWindow> poolings{{1, 1}, {4, 4}, {10, 10}, {40, 40}};
  std::size_t samples = 500;
  std::size_t mds_dim = 2;
  FeatureSource features = FeatureSource::trained;
  /// Pooling of the Img+RF run whose device CNN is probed when features = trained.
  nn::PoolWindow train_pooling{40, 40};
};

struct OutputSection {
  std::string dir = "out";
};

/// Everything one experiment needs. Serialised as a flat INI file with the
/// sections [scenario], [uplink], [downlink], [split], [link_table],
/// [privacy] and [output].
struct ExperimentConfig {
  ScenarioSection scenario;
  LinkSection uplink{7.5, 30.0};
  LinkSection downlink{40.0, 100.0};
  SplitSection split;
  LinkTableSection link_table;
  PrivacySection privacy;
  OutputSection output;

  /// Throws ConfigError naming the offending key.
  void validate() const;

  splitsim::SplitConfig split_config(splitsim::Modality modality, nn::PoolWindow pool) const;
  /// Overrides both the scenario and the training seed.
  void override_seed(std::uint64_t seed);
};

/// Parses INI text. Unknown sections or keys, malformed values and duplicate
/// keys raise ConfigError; missing keys keep their defaults.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every key in a fixed order; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const ExperimentConfig& config);

std::string format_pool(nn::PoolWindow pool);

}  // namespace slsim::cli
