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
#include <vector>

#include "slsim/scenario/dataset.hpp"

namespace slsim::scenario {

/// Parameters of the synthetic blockage process. A single rectangular
/// blocker standing on the bottom edge walks across the frame and shadows
/// the line-of-sight path while it covers the central column band.
struct BlockageScenario {
  double los_power_dbm = -60.0;
  double blocked_power_dbm = -80.0;
  double power_jitter_db = 0.5;
  double blocker_speed = 1.0;  // pixels per frame
  std::size_t blocker_h = 30;
  std::size_t blocker_w = 24;
  double blocker_depth = 0.4;
  double event_rate = 4.0;  // expected crossings per 1000 frames
  std::size_t ramp_len = 3;
  std::size_t los_band_w = 4;
  double texture_amplitude = 0.05;
  std::uint64_t seed = 1;

  void validate(std::size_t img_h, std::size_t img_w) const;
};

struct BlockageEvent {
  std::size_t spawn = 0;  // frame at offset zero, blocker just outside the frame
  bool left_to_right = true;
};

struct GeneratedSeries {
  SeriesDataset dataset;
  std::vector<BlockageEvent> events;
  std::vector<bool> occluded;  // per frame: blocker covers part of the LoS band
};

GeneratedSeries generate_detailed(const BlockageScenario& scenario, std::size_t frames,
                                  std::size_t img_h, std::size_t img_w, double frame_interval_ms);

inline SeriesDataset generate(const BlockageScenario& scenario, std::size_t frames,
                              std::size_t img_h = 40, std::size_t img_w = 40,
                              double frame_interval_ms = 33.0) {
  return generate_detailed(scenario, frames, img_h, img_w, frame_interval_ms).dataset;
}

/// First column of the LoS band.
std::size_t los_band_start(std::size_t img_w, std::size_t band_w);

}  // namespace slsim::scenario
