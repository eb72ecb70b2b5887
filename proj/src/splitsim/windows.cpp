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

#include "slsim/splitsim/windows.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slsim/error.hpp"

namespace slsim::splitsim {

std::size_t horizon_frames(double horizon_ms, double frame_interval_ms) {
  if (!(horizon_ms > 0.0) || !(frame_interval_ms > 0.0))
    throw ConfigError("windows: horizon and frame interval must be positive");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(horizon_ms / frame_interval_ms)));
}

WindowSplit make_windows(std::size_t series_len, std::size_t seq_len, double horizon_ms,
                         double frame_interval_ms, std::size_t train_end) {
  if (seq_len == 0) throw ConfigError("windows: sequence length must be positive");
  WindowSplit split{seq_len, horizon_frames(horizon_ms, frame_interval_ms), {}, {}};
  const std::size_t h = split.horizon;
  if (series_len < seq_len + h)
    throw DimensionError("windows: series of " + std::to_string(series_len) +
                         " samples is shorter than L+H = " + std::to_string(seq_len + h));
  const std::size_t last_anchor = series_len - h;
  for (std::size_t k = seq_len; k <= std::min(train_end, last_anchor); ++k) split.train.push_back(k);
  for (std::size_t k = std::max(train_end + 1, seq_len); k <= last_anchor; ++k) split.val.push_back(k);
  return split;
}

}  // namespace slsim::splitsim
