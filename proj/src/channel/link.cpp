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

#include "slsim/channel/link.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "slsim/error.hpp"

namespace slsim::channel {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

LinkParams LinkParams::from_engineering(double tx_power_dbm, double bandwidth_mhz,
                                        double distance_m, double path_loss_exp,
                                        double noise_density_dbm_per_hz, double slot_ms,
                                        Direction direction) {
  LinkParams p;
  p.tx_power_w = dbm_to_watts(tx_power_dbm);
  p.bandwidth_hz = bandwidth_mhz * 1e6;
  p.distance_m = distance_m;
  p.path_loss_exp = path_loss_exp;
  p.noise_density_w_per_hz = dbm_to_watts(noise_density_dbm_per_hz);
  p.slot_s = slot_ms * 1e-3;
  p.direction = direction;
  p.validate();
  return p;
}

LinkParams LinkParams::default_uplink() {
  return from_engineering(7.5, 30.0, 4.0, 5.0, -174.0, 1.0, Direction::uplink);
}

LinkParams LinkParams::default_downlink() {
  return from_engineering(40.0, 100.0, 4.0, 5.0, -174.0, 1.0, Direction::downlink);
}

void LinkParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string("link: ") + name + " must be positive and finite");
  };
  positive(tx_power_w, "tx_power");
  positive(bandwidth_hz, "bandwidth");
  positive(distance_m, "distance");
  positive(noise_density_w_per_hz, "noise_density");
  positive(slot_s, "slot_len");
  if (!(path_loss_exp >= 2.0) || !std::isfinite(path_loss_exp))
    throw ConfigError("link: path_loss_exp must be at least 2");
}

std::uint64_t payload_bits(const PayloadSpec& s) {
  if (s.pool_h == 0 || s.pool_w == 0 || s.img_h % s.pool_h != 0 || s.img_w % s.pool_w != 0) {
    throw DimensionError("payload: pooling window " + std::to_string(s.pool_h) + "x" +
                         std::to_string(s.pool_w) + " does not tile image " +
                         std::to_string(s.img_h) + "x" + std::to_string(s.img_w));
  }
  return (s.img_h / s.pool_h) * (s.img_w / s.pool_w) * s.minibatch * s.bit_depth * s.seq_len;
}

double mean_snr(const LinkParams& link) {
  return link.tx_power_w * std::pow(link.distance_m, -link.path_loss_exp) /
         (link.noise_density_w_per_hz * link.bandwidth_hz);
}

double decode_threshold(std::uint64_t bits, const LinkParams& link) {
  const double spectral_eff = static_cast<double>(bits) / (link.slot_s * link.bandwidth_hz);
  // exp2 overflows past 1024; report saturation rather than rely on errno.
  if (spectral_eff >= 1024.0) return std::numeric_limits<double>::infinity();
  return std::expm1(spectral_eff * std::numbers::ln2);
}

double slot_success_prob(std::uint64_t bits, const LinkParams& link) {
  const double theta = decode_threshold(bits, link);
  if (std::isinf(theta)) return 0.0;
  return std::exp(-theta / mean_snr(link));
}

TransferResult transfer_slots(std::uint64_t bits, const LinkParams& link, Rng& rng,
                              std::uint64_t cap) {
  const double theta = decode_threshold(bits, link);
  // A unit-mean exponential draw from 53-bit uniforms never exceeds ~36.7, so
  // when the closed form has underflowed no slot can ever decode.
  if (slot_success_prob(bits, link) == 0.0) return {cap, true};
  const double required_fade = theta / mean_snr(link);
  for (std::uint64_t slot = 1; slot <= cap; ++slot) {
    if (rng.exponential() > required_fade) return {slot, false};
  }
  return {cap, true};
}

}  // namespace slsim::channel
