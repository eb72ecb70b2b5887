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

#include <cstddef>
#include <vector>

namespace slsim::splitsim {

inline constexpr std::size_t kDefaultTrainEnd = 9928;

/// Window anchor indices k (1-based). A window at k reads samples
/// k-L+1..k and targets the power at k+horizon.
struct WindowSplit {
  std::size_t seq_len = 0;
  std::size_t horizon = 0;
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};

/// Horizon in frames, round(horizon_ms / frame_interval_ms), at least 1.
std::size_t horizon_frames(double horizon_ms, double frame_interval_ms);

/// Train anchors L..train_end, validation anchors after train_end; anchors
/// whose target would fall past the end are dropped. Throws DimensionError
/// when the series cannot hold a single window.
WindowSplit make_windows(std::size_t series_len, std::size_t seq_len, double horizon_ms,
                         double frame_interval_ms, std::size_t train_end = kDefaultTrainEnd);

}  // namespace slsim::splitsim
