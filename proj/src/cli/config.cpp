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

#include "slsim/cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "slsim/error.hpp"

namespace slsim::cli {
namespace {

using splitsim::Modality;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    out.push_back(trim(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

template <class T>
void parse_number(const std::string& text, T& out) {
  const std::string t = trim(text);
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty())
    throw std::invalid_argument("not a number: '" + text + "'");
}

std::string format_value(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}
std::string format_value(std::size_t v) { return std::to_string(v); }
std::string format_value(const std::string& v) { return v; }
std::string format_value(FeatureSource v) { return to_string(v); }
std::string format_value(const std::vector<Modality>& v) {
  std::string out;
  for (Modality m : v) out += (out.empty() ? "" : ",") + splitsim::to_string(m);
  return out;
}
std::string format_value(const std::vector<nn::PoolWindow>& v) {
  std::string out;
  for (const auto& p : v) out += (out.empty() ? "" : ",") + format_pool(p);
  return out;
}
std::string format_value(nn::PoolWindow v) { return format_pool(v); }

void parse_value(const std::string& t, double& out) { parse_number(t, out); }
void parse_value(const std::string& t, std::size_t& out) { parse_number(t, out); }
void parse_value(const std::string& t, std::string& out) { out = trim(t); }

void parse_value(const std::string& t, FeatureSource& out) {
  const std::string s = trim(t);
  if (s == "trained") out = FeatureSource::trained;
  else if (s == "random") out = FeatureSource::random;
  else if (s == "identity") out = FeatureSource::identity;
  else throw std::invalid_argument("expected trained, random or identity, got '" + s + "'");
}

void parse_value(const std::string& t, nn::PoolWindow& out) {
  const std::string s = trim(t);
  const auto x = s.find('x');
  if (x == std::string::npos) throw std::invalid_argument("expected HxW, got '" + s + "'");
  parse_number(s.substr(0, x), out.h);
  parse_number(s.substr(x + 1), out.w);
}

void parse_value(const std::string& t, std::vector<Modality>& out) {
  out.clear();
  for (const auto& item : split_list(t)) out.push_back(splitsim::parse_modality(item));
}

void parse_value(const std::string& t, std::vector<nn::PoolWindow>& out) {
  out.clear();
  for (const auto& item : split_list(t)) parse_value(item, out.emplace_back());
}

struct Field {
  std::string section;
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

template <class Access>
Field make_field(std::string section, std::string key, Access access) {
  return {std::move(section), std::move(key),
          [access](const ExperimentConfig& c) {
            return format_value(access(const_cast<ExperimentConfig&>(c)));
          },
          [access](ExperimentConfig& c, const std::string& text) { parse_value(text, access(c)); }};
}

#define SLSIM_FIELD(section, key, member) \
  make_field(section, key, [](ExperimentConfig& c) -> auto& { return c.member; })

std::vector<Field> link_fields(const std::string& s, LinkSection ExperimentConfig::*link) {
  auto field = [&](const char* key, double LinkSection::*m) {
    return make_field(s, key, [link, m](ExperimentConfig& c) -> double& { return (c.*link).*m; });
  };
  return {field("tx_power_dbm", &LinkSection::tx_power_dbm),
          field("bandwidth_mhz", &LinkSection::bandwidth_mhz),
          field("distance_m", &LinkSection::distance_m),
          field("path_loss_exponent", &LinkSection::path_loss_exp),
          field("noise_density_dbm_hz", &LinkSection::noise_density_dbm_hz),
          field("slot_ms", &LinkSection::slot_ms)};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> all = [] {
    std::vector<Field> f = {
        SLSIM_FIELD("scenario", "frames", scenario.frames),
        SLSIM_FIELD("scenario", "img_h", scenario.img_h),
        SLSIM_FIELD("scenario", "img_w", scenario.img_w),
        SLSIM_FIELD("scenario", "frame_interval_ms", scenario.frame_interval_ms),
        SLSIM_FIELD("scenario", "los_power_dbm", scenario.model.los_power_dbm),
        SLSIM_FIELD("scenario", "blocked_power_dbm", scenario.model.blocked_power_dbm),
        SLSIM_FIELD("scenario", "power_jitter_db", scenario.model.power_jitter_db),
        SLSIM_FIELD("scenario", "blocker_speed", scenario.model.blocker_speed),
        SLSIM_FIELD("scenario", "blocker_h", scenario.model.blocker_h),
        SLSIM_FIELD("scenario", "blocker_w", scenario.model.blocker_w),
        SLSIM_FIELD("scenario", "blocker_depth", scenario.model.blocker_depth),
        SLSIM_FIELD("scenario", "event_rate", scenario.model.event_rate),
        SLSIM_FIELD("scenario", "ramp_len", scenario.model.ramp_len),
        SLSIM_FIELD("scenario", "los_band_w", scenario.model.los_band_w),
        SLSIM_FIELD("scenario", "texture_amplitude", scenario.model.texture_amplitude),
        SLSIM_FIELD("scenario", "seed", scenario.model.seed),
    };
    for (auto& x : link_fields("uplink", &ExperimentConfig::uplink)) f.push_back(std::move(x));
    for (auto& x : link_fields("downlink", &ExperimentConfig::downlink)) f.push_back(std::move(x));
    std::vector<Field> rest = {
        SLSIM_FIELD("split", "modalities", split.modalities),
        SLSIM_FIELD("split", "poolings", split.poolings),
        SLSIM_FIELD("split", "minibatch", split.minibatch),
        SLSIM_FIELD("split", "bit_depth", split.bit_depth),
        SLSIM_FIELD("split", "seq_len", split.seq_len),
        SLSIM_FIELD("split", "horizon_ms", split.horizon_ms),
        SLSIM_FIELD("split", "train_end", split.train_end),
        SLSIM_FIELD("split", "compute_time_ms", split.compute_time_ms),
        SLSIM_FIELD("split", "stop_rmse_db", split.stop_rmse_db),
        SLSIM_FIELD("split", "max_epochs", split.max_epochs),
        SLSIM_FIELD("split", "time_budget_s", split.time_budget_s),
        SLSIM_FIELD("split", "starvation_cap", split.starvation_cap),
        SLSIM_FIELD("split", "seed", split.seed),
        SLSIM_FIELD("split", "learning_rate", split.learning_rate),
        SLSIM_FIELD("split", "conv_channels", split.conv_channels),
        SLSIM_FIELD("split", "kernel", split.kernel),
        SLSIM_FIELD("split", "hidden", split.hidden),
        SLSIM_FIELD("split", "blocked_threshold_dbm", split.blocked_threshold_dbm),
        SLSIM_FIELD("link_table", "poolings", link_table.poolings),
        SLSIM_FIELD("privacy", "poolings", privacy.poolings),
        SLSIM_FIELD("privacy", "samples", privacy.samples),
        SLSIM_FIELD("privacy", "mds_dim", privacy.mds_dim),
        SLSIM_FIELD("privacy", "features", privacy.features),
        SLSIM_FIELD("privacy", "train_pooling", privacy.train_pooling),
        SLSIM_FIELD("output", "dir", output.dir),
    };
    for (auto& x : rest) f.push_back(std::move(x));
    return f;
  }();
  return all;
}

#undef SLSIM_FIELD

void require_tiles(const ExperimentConfig& c, const std::vector<nn::PoolWindow>& pools,
                   const std::string& key) {
  if (pools.empty()) throw ConfigError(key + ": at least one pooling window is required");
  for (const auto& p : pools)
    if (p.h == 0 || p.w == 0 || c.scenario.img_h % p.h != 0 || c.scenario.img_w % p.w != 0)
      throw ConfigError(key + ": " + format_pool(p) + " does not tile " +
                        std::to_string(c.scenario.img_h) + "x" + std::to_string(c.scenario.img_w));
}

}  // namespace

std::string to_string(FeatureSource f) {
  switch (f) {
    case FeatureSource::trained: return "trained";
    case FeatureSource::random: return "random";
    case FeatureSource::identity: return "identity";
  }
  return "?";
}

std::string format_pool(nn::PoolWindow pool) {
  return std::to_string(pool.h) + "x" + std::to_string(pool.w);
}

channel::LinkParams LinkSection::params(channel::Direction direction) const {
  return channel::LinkParams::from_engineering(tx_power_dbm, bandwidth_mhz, distance_m,
                                               path_loss_exp, noise_density_dbm_hz, slot_ms,
                                               direction);
}

splitsim::SplitConfig ExperimentConfig::split_config(Modality modality, nn::PoolWindow pool) const {
  splitsim::SplitConfig s;
  s.modality = modality;
  s.pool = pool;
  s.minibatch = split.minibatch;
  s.bit_depth = split.bit_depth;
  s.seq_len = split.seq_len;
  s.horizon_ms = split.horizon_ms;
  s.train_end = split.train_end;
  s.uplink = uplink.params(channel::Direction::uplink);
  s.downlink = downlink.params(channel::Direction::downlink);
  s.compute_time_s = split.compute_time_ms / 1000.0;
  s.stop_rmse_db = split.stop_rmse_db;
  s.max_epochs = split.max_epochs;
  s.time_budget_s = split.time_budget_s;
  s.starvation_cap = split.starvation_cap;
  s.seed = split.seed;
  s.adam.lr = split.learning_rate;
  s.conv_channels = split.conv_channels;
  s.kernel = split.kernel;
  s.hidden = split.hidden;
  return s;
}

void ExperimentConfig::override_seed(std::uint64_t seed) {
  scenario.model.seed = seed;
  split.seed = seed;
}

void ExperimentConfig::validate() const {
  if (scenario.frames < 1) throw ConfigError("scenario.frames: must be at least 1");
  if (scenario.img_h < 1 || scenario.img_w < 1) throw ConfigError("scenario.img_h/img_w: must be positive");
  if (!(scenario.frame_interval_ms > 0.0))
    throw ConfigError("scenario.frame_interval_ms: must be positive");
  scenario.model.validate(scenario.img_h, scenario.img_w);
  if (split.modalities.empty()) throw ConfigError("split.modalities: at least one modality is required");
  require_tiles(*this, split.poolings, "split.poolings");
  require_tiles(*this, link_table.poolings, "link_table.poolings");
  require_tiles(*this, privacy.poolings, "privacy.poolings");
  require_tiles(*this, {privacy.train_pooling}, "privacy.train_pooling");
  if (privacy.mds_dim < 1) throw ConfigError("privacy.mds_dim: must be at least 1");
  if (output.dir.empty()) throw ConfigError("output.dir: must not be empty");
  if (split.kernel % 2 == 0) throw ConfigError("split.kernel: must be odd");
  if (!(split.horizon_ms > 0.0)) throw ConfigError("split.horizon_ms: must be positive");
  for (Modality m : split.modalities)
    for (const auto& p : split.poolings) {
      const auto s = split_config(m, p);
      s.validate();
      s.model_shape(scenario.img_h, scenario.img_w).validate();
    }
}

ExperimentConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config: " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  ExperimentConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("config: key '" + section + "' appears outside any section");
    for (const auto& [key, value] : body) {
      const auto& all = fields();
      const auto it = std::find_if(all.begin(), all.end(), [&](const Field& f) {
        return f.section == section && f.key == key;
      });
      if (it == all.end()) throw ConfigError("config: unknown key '" + section + "." + key + "'");
      try {
        it->set(config, value.data());
      } catch (const std::exception& e) {
        throw ConfigError("config: bad value for '" + section + "." + key + "': " + e.what());
      }
    }
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string serialize_config(const ExperimentConfig& config) {
  std::string out;
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      out += (section.empty() ? "[" : "\n[") + f.section + "]\n";
      section = f.section;
    }
    out += f.key + " = " + f.get(config) + "\n";
  }
  return out;
}

}  // namespace slsim::cli
