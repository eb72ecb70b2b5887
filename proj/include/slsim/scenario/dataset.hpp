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
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "slsim/tensor.hpp"

namespace slsim::scenario {

/// Time-indexed pairs of normalised depth frame (1 = far) and received power
/// in dBm. Frames are held at 32-bit precision, the on-disk precision.
struct SeriesDataset {
  std::size_t img_h = 0;
  std::size_t img_w = 0;
  double frame_interval_ms = 33.0;
  std::uint64_t seed = 0;
  std::vector<float> pixels;        // K * img_h * img_w, frame-major then row-major
  std::vector<double> powers_dbm;   // K

  std::size_t size() const { return powers_dbm.size(); }
  std::size_t frame_pixels() const { return img_h * img_w; }

  /// Frame k (0-based) as an [img_h, img_w] tensor.
  Tensor frame(std::size_t k) const;
  std::span<const float> frame_span(std::size_t k) const;

  /// Throws ConfigError when lengths disagree, a pixel leaves [0,1] or a power is not finite.
  void validate() const;

  friend bool operator==(const SeriesDataset&, const SeriesDataset&) = default;
};

class DatasetFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class MalformedHeaderError : public DatasetFormatError {
 public:
  using DatasetFormatError::DatasetFormatError;
};
class TruncatedPayloadError : public DatasetFormatError {
 public:
  using DatasetFormatError::DatasetFormatError;
};
class ChecksumMismatchError : public DatasetFormatError {
 public:
  using DatasetFormatError::DatasetFormatError;
};

// DSET1 layout: ASCII header lines
//   DSET1 / version 1 / K <n> / N_H <h> / N_W <w> / gamma_ms <g> / seed <s>
// closed by an empty line, then K records of little-endian float32 pixels
// followed by a little-endian float64 power, then a little-endian CRC-32 of
// the record bytes.
void save(const SeriesDataset& dataset, const std::filesystem::path& path);
SeriesDataset load(const std::filesystem::path& path);

/// Size in bytes of the ASCII header `save` writes for this dataset.
std::size_t header_size(const SeriesDataset& dataset);

}  // namespace slsim::scenario
