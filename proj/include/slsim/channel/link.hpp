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
#include <limits>

#include "slsim/rng.hpp"

namespace slsim::channel {

enum class Direction { uplink, downlink };

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

/// Radio constants of one link direction, in SI linear units.
struct LinkParams {
  double tx_power_w = 0.0;
  double bandwidth_hz = 0.0;
  double distance_m = 0.0;
  double path_loss_exp = 0.0;
  double noise_density_w_per_hz = 0.0;
  double slot_s = 0.0;
  Direction direction = Direction::uplink;

  /// Builds from the units radio engineers quote: dBm, MHz, m, dBm/Hz, ms.
  static LinkParams from_engineering(double tx_power_dbm, double bandwidth_mhz, double distance_m,
                                     double path_loss_exp, double noise_density_dbm_per_hz,
                                     double slot_ms, Direction direction);

  /// 7.5 dBm over 30 MHz at 4 m, path-loss exponent 5, -174 dBm/Hz, 1 ms slots.
  static LinkParams default_uplink();
  /// 40 dBm over 100 MHz, otherwise as the uplink.
  static LinkParams default_downlink();

  /// Throws ConfigError unless every constant is positive and the exponent is at least 2.
  void validate() const;
};

/// Sizes one cut-layer transfer.
struct PayloadSpec {
  std::uint64_t img_h = 40;
  std::uint64_t img_w = 40;
  std::uint64_t pool_h = 1;
  std::uint64_t pool_w = 1;
  std::uint64_t minibatch = 64;
  std::uint64_t bit_depth = 32;
  std::uint64_t seq_len = 4;
};

/// N_H * N_W * B * R * L / (w_H * w_W). Throws DimensionError if the window
/// does not tile the image.
std::uint64_t payload_bits(const PayloadSpec& spec);

/// Fading-averaged SNR P r^-alpha / (sigma^2 W), linear scale.
double mean_snr(const LinkParams& link);

/// SNR needed to carry `bits` in one slot: 2^(bits / (tau W)) - 1. Saturates
/// to +inf when the power of two overflows.
double decode_threshold(std::uint64_t bits, const LinkParams& link);

/// Probability a single slot decodes under unit-mean exponential fading,
/// exp(-threshold / mean_snr).
double slot_success_prob(std::uint64_t bits, const LinkParams& link);

inline constexpr std::uint64_t kDefaultStarvationCap = 1'000'000;

/// Result of a retransmitted transfer. A starved transfer hit the slot cap
/// without decoding; `slots` then equals the cap.
struct TransferResult {
  std::uint64_t slots = 0;
  bool starved = false;
};

/// Draws one fading realisation per slot and retransmits the whole payload
/// until a slot decodes or the cap is exceeded.
TransferResult transfer_slots(std::uint64_t bits, const LinkParams& link, Rng& rng,
                              std::uint64_t cap = kDefaultStarvationCap);

}  // namespace slsim::channel
