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

#include "slsim/scenario/generator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slsim/error.hpp"
#include "slsim/rng.hpp"

namespace slsim::scenario {
namespace {

enum Stream : std::uint64_t { kTexture = 1, kEvents = 2, kJitter = 3 };

// Column of the blocker's left edge `t` frames after spawn.
long blocker_left(const BlockageEvent& ev, std::size_t t, const BlockageScenario& s,
                  std::size_t img_w) {
  const long travelled = static_cast<long>(std::floor(s.blocker_speed * static_cast<double>(t)));
  if (ev.left_to_right) return -static_cast<long>(s.blocker_w) + travelled;
  return static_cast<long>(img_w) - travelled;
}

bool has_left_frame(const BlockageEvent& ev, long left, const BlockageScenario& s,
                    std::size_t img_w) {
  if (ev.left_to_right) return left >= static_cast<long>(img_w);
  return left + static_cast<long>(s.blocker_w) <= 0;
}

}  // namespace

std::size_t los_band_start(std::size_t img_w, std::size_t band_w) {
  return (img_w - band_w) / 2;
}

void BlockageScenario::validate(std::size_t img_h, std::size_t img_w) const {
  if (img_h == 0 || img_w == 0) throw ConfigError("scenario: image extents must be positive");
  if (blocker_h == 0 || blocker_w == 0 || blocker_h > img_h || blocker_w > img_w)
    throw DimensionError("scenario: blocker " + std::to_string(blocker_h) + "x" +
                         std::to_string(blocker_w) + " does not fit frame " +
                         std::to_string(img_h) + "x" + std::to_string(img_w));
  if (!(los_power_dbm > blocked_power_dbm))
    throw ConfigError("scenario: los_power must exceed blocked_power");
  if (ramp_len < 1) throw ConfigError("scenario: ramp_len must be at least 1");
  if (!(blocker_speed > 0.0)) throw ConfigError("scenario: blocker_speed must be positive");
  if (!(blocker_depth >= 0.0 && blocker_depth <= 1.0))
    throw ConfigError("scenario: blocker_depth must lie in [0,1]");
  if (!(event_rate >= 0.0)) throw ConfigError("scenario: event_rate must be non-negative");
  if (!(power_jitter_db >= 0.0)) throw ConfigError("scenario: power_jitter must be non-negative");
  if (los_band_w == 0 || los_band_w > img_w)
    throw ConfigError("scenario: los band width must lie in [1, image width]");
  if (!(texture_amplitude >= 0.0 && texture_amplitude <= 1.0))
    throw ConfigError("scenario: texture_amplitude must lie in [0,1]");
}

GeneratedSeries generate_detailed(const BlockageScenario& s, std::size_t frames,
                                  std::size_t img_h, std::size_t img_w,
                                  double frame_interval_ms) {
  s.validate(img_h, img_w);
  if (frames == 0) throw ConfigError("scenario: frame count must be positive");
  if (!(frame_interval_ms > 0.0)) throw ConfigError("scenario: frame interval must be positive");

  GeneratedSeries out;
  auto& ds = out.dataset;
  ds.img_h = img_h;
  ds.img_w = img_w;
  ds.frame_interval_ms = frame_interval_ms;
  ds.seed = s.seed;
  ds.pixels.resize(frames * img_h * img_w);
  ds.powers_dbm.resize(frames);
  out.occluded.assign(frames, false);

  Rng texture_rng = Rng::stream(s.seed, kTexture);
  std::vector<float> background(img_h * img_w);
  for (auto& v : background)
    v = static_cast<float>(1.0 - s.texture_amplitude * texture_rng.uniform());

  // Crossing process: one blocker at a time, exponential idle gaps sized so
  // the long-run crossing count matches event_rate.
  Rng event_rng = Rng::stream(s.seed, kEvents);
  const double crossing_frames =
      std::ceil(static_cast<double>(img_w + s.blocker_w) / s.blocker_speed);
  const double mean_gap = s.event_rate > 0.0
                              ? std::max(1000.0 / s.event_rate - crossing_frames, 0.0)
                              : 0.0;
  auto next_gap = [&] {
    return static_cast<std::size_t>(std::floor(event_rng.exponential() * mean_gap));
  };

  const std::size_t band0 = los_band_start(img_w, s.los_band_w);
  const long band_lo = static_cast<long>(band0);
  const long band_hi = static_cast<long>(band0 + s.los_band_w);
  const std::size_t row0 = img_h - s.blocker_h;

  bool active = false;
  BlockageEvent current;
  std::size_t next_spawn = s.event_rate > 0.0 ? next_gap() : frames;

  for (std::size_t k = 0; k < frames; ++k) {
    if (!active && k >= next_spawn) {
      current = {k, event_rng.uniform() < 0.5};
      out.events.push_back(current);
      active = true;
    }
    float* frame = &ds.pixels[k * img_h * img_w];
    std::copy(background.begin(), background.end(), frame);
    if (!active) continue;

    const long left = blocker_left(current, k - current.spawn, s, img_w);
    if (has_left_frame(current, left, s, img_w)) {
      active = false;
      next_spawn = k + next_gap();
      if (next_spawn == k) {
        // Back-to-back crossing: start it on this frame.
        current = {k, event_rng.uniform() < 0.5};
        out.events.push_back(current);
        active = true;
      } else {
        continue;
      }
    }
    const long l = blocker_left(current, k - current.spawn, s, img_w);
    const long r = l + static_cast<long>(s.blocker_w);
    const long c0 = std::max(l, 0L);
    const long c1 = std::min(r, static_cast<long>(img_w));
    const auto depth = static_cast<float>(s.blocker_depth);
    for (std::size_t y = row0; y < img_h; ++y)
      for (long x = c0; x < c1; ++x) {
        float& px = frame[y * img_w + static_cast<std::size_t>(x)];
        px = std::min(px, depth);
      }
    out.occluded[k] = l < band_hi && r > band_lo;
  }

  // Attenuation ramps in over the first ramp_len occluded frames and back out
  // over the last ramp_len, so unoccluded frames stay at the LoS level.
  Rng jitter_rng = Rng::stream(s.seed, kJitter);
  const double depth_db = s.los_power_dbm - s.blocked_power_dbm;
  const double ramp = static_cast<double>(s.ramp_len);
  std::size_t k = 0;
  std::vector<double> attenuation(frames, 0.0);
  while (k < frames) {
    if (!out.occluded[k]) {
      ++k;
      continue;
    }
    std::size_t end = k;
    while (end < frames && out.occluded[end]) ++end;
    for (std::size_t j = k; j < end; ++j) {
      const double in = static_cast<double>(j - k + 1) / ramp;
      const double outw = static_cast<double>(end - j) / ramp;
      attenuation[j] = depth_db * std::min({1.0, in, outw});
    }
    k = end;
  }
  for (std::size_t j = 0; j < frames; ++j) {
    const double jitter = s.power_jitter_db > 0.0 ? s.power_jitter_db * jitter_rng.normal() : 0.0;
    ds.powers_dbm[j] = s.los_power_dbm + jitter - attenuation[j];
  }
  return out;
}

}  // namespace slsim::scenario
