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

#include "slsim/scenario/dataset.hpp"

#include <zlib.h>

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "slsim/error.hpp"

namespace slsim::scenario {

Tensor SeriesDataset::frame(std::size_t k) const {
  const auto px = frame_span(k);
  return Tensor({img_h, img_w}, std::vector<double>(px.begin(), px.end()));
}

std::span<const float> SeriesDataset::frame_span(std::size_t k) const {
  return std::span<const float>(pixels).subspan(k * frame_pixels(), frame_pixels());
}

void SeriesDataset::validate() const {
  if (img_h == 0 || img_w == 0) throw ConfigError("dataset: image extents must be positive");
  if (pixels.size() != powers_dbm.size() * frame_pixels())
    throw ConfigError("dataset: frame count and power count disagree");
  for (float v : pixels)
    if (!(v >= 0.0f && v <= 1.0f)) throw ConfigError("dataset: pixel outside [0,1]");
  for (double p : powers_dbm)
    if (!std::isfinite(p)) throw ConfigError("dataset: non-finite power");
}

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put_le(std::string& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(const unsigned char* p) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(p[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string make_header(const SeriesDataset& d) {
  std::ostringstream h;
  h << "DSET1\n"
    << "version 1\n"
    << "K " << d.size() << "\n"
    << "N_H " << d.img_h << "\n"
    << "N_W " << d.img_w << "\n"
    << "gamma_ms " << format_double(d.frame_interval_ms) << "\n"
    << "seed " << d.seed << "\n\n";
  return h.str();
}

std::uint32_t crc_of(const unsigned char* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  while (n > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

template <typename T>
T parse_field(const std::string& line, const char* key) {
  const std::string prefix = std::string(key) + " ";
  if (line.rfind(prefix, 0) != 0)
    throw MalformedHeaderError("DSET1 header: expected '" + std::string(key) + "', got '" + line + "'");
  const std::string text = line.substr(prefix.size());
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw MalformedHeaderError("DSET1 header: bad value for '" + std::string(key) + "': '" + text + "'");
  return value;
}

}  // namespace

std::size_t header_size(const SeriesDataset& dataset) { return make_header(dataset).size(); }

void save(const SeriesDataset& d, const std::filesystem::path& path) {
  d.validate();
  std::string bytes = make_header(d);
  const std::size_t payload_start = bytes.size();
  bytes.reserve(payload_start + d.size() * (d.frame_pixels() * 4 + 8) + 4);
  for (std::size_t k = 0; k < d.size(); ++k) {
    for (float v : d.frame_span(k)) put_le(bytes, v);
    put_le(bytes, d.powers_dbm[k]);
  }
  const auto crc = crc_of(reinterpret_cast<const unsigned char*>(bytes.data()) + payload_start,
                          bytes.size() - payload_start);
  put_le(bytes, crc);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

SeriesDataset load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::size_t pos = 0;
  auto next_line = [&]() -> std::string {
    const auto nl = bytes.find('\n', pos);
    if (nl == std::string::npos || nl - pos > 256)
      throw MalformedHeaderError("DSET1 header: unterminated line in " + path.string());
    std::string line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    return line;
  };

  if (next_line() != "DSET1") throw MalformedHeaderError("not a DSET1 file: " + path.string());
  if (parse_field<int>(next_line(), "version") != 1)
    throw MalformedHeaderError("DSET1 header: unsupported version");
  SeriesDataset d;
  const auto frames = parse_field<std::uint64_t>(next_line(), "K");
  d.img_h = parse_field<std::size_t>(next_line(), "N_H");
  d.img_w = parse_field<std::size_t>(next_line(), "N_W");
  d.frame_interval_ms = parse_field<double>(next_line(), "gamma_ms");
  d.seed = parse_field<std::uint64_t>(next_line(), "seed");
  if (!next_line().empty()) throw MalformedHeaderError("DSET1 header: missing blank terminator line");
  if (d.img_h == 0 || d.img_w == 0) throw MalformedHeaderError("DSET1 header: zero image extent");
  if (!(d.frame_interval_ms > 0.0)) throw MalformedHeaderError("DSET1 header: non-positive gamma_ms");

  const std::size_t record = d.frame_pixels() * 4 + 8;
  const std::size_t available = bytes.size() - pos;
  if (frames > (available < 4 ? 0 : (available - 4) / record) ||
      available < frames * record + 4) {
    throw TruncatedPayloadError("DSET1 payload truncated: header declares " + std::to_string(frames) +
                                " records, file holds " + std::to_string(available) + " payload bytes");
  }
  if (available != frames * record + 4)
    throw DatasetFormatError("DSET1 payload has trailing bytes: " + path.string());

  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + pos;
  const std::uint32_t stored = get_le<std::uint32_t>(p + frames * record);
  if (crc_of(p, frames * record) != stored)
    throw ChecksumMismatchError("DSET1 checksum mismatch: " + path.string());

  d.pixels.resize(frames * d.frame_pixels());
  d.powers_dbm.resize(frames);
  for (std::size_t k = 0; k < frames; ++k) {
    const unsigned char* rec = p + k * record;
    for (std::size_t i = 0; i < d.frame_pixels(); ++i)
      d.pixels[k * d.frame_pixels() + i] = get_le<float>(rec + 4 * i);
    d.powers_dbm[k] = get_le<double>(rec + 4 * d.frame_pixels());
  }
  return d;
}

}  // namespace slsim::scenario
