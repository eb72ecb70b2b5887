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

#include "slsim/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "slsim/error.hpp"
#include "slsim/privacy/mds.hpp"

namespace slsim::cli {
namespace fs = std::filesystem;
using splitsim::Modality;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void log_line(const CommandContext& ctx, const std::string& line) {
  if (ctx.log) *ctx.log << line << '\n' << std::flush;
}

scenario::SeriesDataset load_dataset(const CommandContext& ctx) {
  if (!fs::exists(ctx.data_path))
    throw std::runtime_error("dataset " + ctx.data_path.string() +
                             " not found; run gen-data first or pass --data");
  auto d = scenario::load(ctx.data_path);
  if (d.img_h != ctx.config.scenario.img_h || d.img_w != ctx.config.scenario.img_w)
    throw ConfigError("dataset " + ctx.data_path.string() + " holds " + std::to_string(d.img_h) +
                      "x" + std::to_string(d.img_w) + " frames, config expects " +
                      std::to_string(ctx.config.scenario.img_h) + "x" +
                      std::to_string(ctx.config.scenario.img_w));
  return d;
}

}  // namespace

std::vector<LinkRow> link_table(const ExperimentConfig& config) {
  const auto ul = config.uplink.params(channel::Direction::uplink);
  ul.validate();
  std::vector<LinkRow> rows;
  for (const auto& pool : config.link_table.poolings) {
    const channel::PayloadSpec spec{config.scenario.img_h, config.scenario.img_w, pool.h, pool.w,
                                    config.split.minibatch, config.split.bit_depth,
                                    config.split.seq_len};
    LinkRow r;
    r.pool = pool;
    r.payload_bits = channel::payload_bits(spec);
    r.threshold = channel::decode_threshold(r.payload_bits, ul);
    r.success_prob = channel::slot_success_prob(r.payload_bits, ul);
    r.expected_slots = r.success_prob > 0.0 ? 1.0 / r.success_prob
                                            : std::numeric_limits<double>::infinity();
    rows.push_back(r);
  }
  return rows;
}

void write_link_csv(const std::vector<LinkRow>& rows, std::ostream& out) {
  out << "pooling,payload_bits,threshold,success_prob,expected_slots\n";
  for (const auto& r : rows)
    out << format_pool(r.pool) << ',' << r.payload_bits << ',' << num(r.threshold) << ','
        << num(r.success_prob) << ',' << num(r.expected_slots) << '\n';
}

std::string run_tag(Modality modality, nn::PoolWindow pool) {
  switch (modality) {
    case Modality::rf: return "rf";
    case Modality::img: return "img_" + format_pool(pool);
    case Modality::img_rf: return "img_rf_" + format_pool(pool);
  }
  return "?";
}

std::vector<std::size_t> privacy_samples(const scenario::SeriesDataset& dataset,
                                         std::size_t train_end, std::size_t budget) {
  const std::size_t k = dataset.size();
  const std::size_t first = std::min(train_end, k);
  const std::size_t count = k - first;
  const std::size_t n = std::min(budget, count);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(first + i * count / n);
  return out;
}

std::vector<privacy::LeakageReport> privacy_sweep(const ExperimentConfig& config,
                                                  const scenario::SeriesDataset& dataset,
                                                  const splitsim::DeviceCnn* device) {
  const auto idx = privacy_samples(dataset, config.split.train_end, config.privacy.samples);
  if (idx.size() < 3)
    throw ConfigError("privacy: need at least 3 validation frames, have " +
                      std::to_string(idx.size()));
  std::vector<Tensor> raw;
  for (std::size_t k : idx) raw.push_back(dataset.frame(k));
  const auto raw_distances = privacy::pairwise_distances(raw);

  std::vector<privacy::LeakageReport> rows;
  for (const auto& pool : config.privacy.poolings) {
    std::vector<Tensor> features;
    if (device) {
      splitsim::DeviceCnn probe = *device;
      probe.pool = pool;
      for (const auto& f : raw) features.push_back(probe.forward(f));
    } else {
      features = raw;
    }
    auto report = privacy::leakage_score(raw_distances, features, config.privacy.mds_dim);
    report.pool = pool;
    rows.push_back(report);
  }
  return rows;
}

void write_privacy_csv(const std::vector<privacy::LeakageReport>& rows, std::ostream& out) {
  out << "w_h,w_w,n,leakage,stress_raw,stress_feat\n";
  for (const auto& r : rows)
    out << r.pool.h << ',' << r.pool.w << ',' << r.samples << ',' << num(r.leakage) << ','
        << num(r.stress_raw) << ',' << num(r.stress_feat) << '\n';
}

void write_pgm(const Tensor& image, double lo, double hi, std::ostream& out) {
  if (image.shape().size() != 2)
    throw DimensionError("pgm: expected [H,W], got " + slsim::to_string(image.shape()));
  const std::size_t h = image.shape()[0], w = image.shape()[1];
  out << "P2\n" << w << ' ' << h << "\n255\n";
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      const double v = hi > lo ? (image.at(i, j) - lo) / (hi - lo) : 0.0;
      out << (j ? " " : "") << std::lround(std::clamp(v, 0.0, 1.0) * 255.0);
    }
    out << '\n';
  }
}

std::vector<std::size_t> dump_frames(const scenario::SeriesDataset& dataset, std::size_t train_end) {
  const std::size_t k = dataset.size();
  if (k < 10) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < std::min<std::size_t>(k, 4); ++i) out.push_back(i);
    return out;
  }
  std::size_t best = std::min(train_end, k - 1);
  double best_mean = 2.0;
  for (std::size_t i = best; i < k; ++i) {
    double s = 0.0;
    for (float v : dataset.frame_span(i)) s += v;
    const double mean = s / static_cast<double>(dataset.frame_pixels());
    if (mean < best_mean) best_mean = mean, best = i;
  }
  best = std::max<std::size_t>(best, 9);
  return {best - 9, best - 6, best - 3, best};
}

void cmd_gen_data(const CommandContext& ctx) {
  const auto& s = ctx.config.scenario;
  const auto dataset = scenario::generate(s.model, s.frames, s.img_h, s.img_w, s.frame_interval_ms);
  if (ctx.data_path.has_parent_path()) fs::create_directories(ctx.data_path.parent_path());
  scenario::save(dataset, ctx.data_path);
  log_line(ctx, "gen-data: " + std::to_string(dataset.size()) + " frames -> " +
                    ctx.data_path.string() + " (" + std::to_string(fs::file_size(ctx.data_path)) +
                    " bytes)");
}

void cmd_link_table(const CommandContext& ctx) {
  fs::create_directories(ctx.out_dir);
  const auto path = ctx.out_dir / "link_table.csv";
  auto out = open_out(path);
  write_link_csv(link_table(ctx.config), out);
  log_line(ctx, "link-table: " + path.string());
}

std::vector<TrainResult> cmd_train(const CommandContext& ctx) {
  const auto dataset = load_dataset(ctx);
  fs::create_directories(ctx.out_dir);
  const auto& cfg = ctx.config;
  const auto frames = dump_frames(dataset, cfg.split.train_end);

  std::vector<std::pair<Modality, nn::PoolWindow>> runs;
  for (Modality m : cfg.split.modalities) {
    if (m == Modality::rf) {
      runs.emplace_back(m, cfg.split.poolings.front());
      continue;
    }
    for (const auto& p : cfg.split.poolings) runs.emplace_back(m, p);
  }

  bool raw_dumped = false;
  std::vector<TrainResult> results;
  for (const auto& [modality, pool] : runs) {
    splitsim::SplitTrainer trainer(cfg.split_config(modality, pool), dataset);
    TrainResult r{modality, pool, trainer.run(), 0.0, run_tag(modality, pool)};
    const auto& w = trainer.windows();
    if (w.val.empty()) throw ConfigError("train: no validation windows after split.train_end");
    {
      auto out = open_out(ctx.out_dir / ("curve_" + r.tag + ".csv"));
      splitsim::write_run_csv(r.record, out);
    }
    const auto predictor = trainer.predictor();
    {
      auto out = open_out(ctx.out_dir / ("trace_" + r.tag + ".csv"));
      splitsim::write_trace_csv(splitsim::predict_trace(predictor, dataset, w.seq_len, w.horizon,
                                                        w.val.front(), w.val.back()),
                                out);
    }
    const auto trans = splitsim::transition_anchors(dataset, w.val, w.horizon,
                                                    cfg.split.blocked_threshold_dbm);
    r.transition_rmse_db = trans.empty()
                               ? std::nan("")
                               : splitsim::rmse_db(predictor, dataset, trans, w.seq_len, w.horizon);

    if (modality != Modality::rf) {
      if (!raw_dumped) {
        for (std::size_t k : frames) {
          auto out = open_out(ctx.out_dir / ("raw_" + std::to_string(k) + ".pgm"));
          write_pgm(dataset.frame(k), 0.0, 1.0, out);
        }
        raw_dumped = true;
      }
      std::vector<Tensor> maps;
      double lo = INFINITY, hi = -INFINITY;
      for (std::size_t k : frames) {
        Tensor f = trainer.model().device_forward(dataset.frame(k));
        for (double v : f.values()) lo = std::min(lo, v), hi = std::max(hi, v);
        maps.push_back(f.reshaped({cfg.scenario.img_h / pool.h, cfg.scenario.img_w / pool.w}));
      }
      for (std::size_t i = 0; i < frames.size(); ++i) {
        auto out = open_out(ctx.out_dir / ("fmap_" + r.tag + "_" + std::to_string(frames[i]) + ".pgm"));
        write_pgm(maps[i], lo, hi, out);
      }
    }
    log_line(ctx, "train " + r.tag + ": " + splitsim::to_string(r.record.outcome) + ", " +
                      std::to_string(r.record.epochs.size()) + " epochs, " +
                      std::to_string(r.record.steps.size()) + " steps, sim " +
                      num(r.record.sim_time_s) + " s, val rmse " + num(r.record.final_rmse_db) +
                      " dB, transition rmse " + num(r.transition_rmse_db) + " dB");
    results.push_back(std::move(r));
  }
  return results;
}

void cmd_privacy(const CommandContext& ctx) {
  const auto dataset = load_dataset(ctx);
  fs::create_directories(ctx.out_dir);
  const auto& cfg = ctx.config;
  const auto split = cfg.split_config(Modality::img_rf, cfg.privacy.train_pooling);

  std::optional<splitsim::SplitModel> model;
  switch (cfg.privacy.features) {
    case FeatureSource::trained: {
      splitsim::SplitTrainer trainer(split, dataset);
      const auto record = trainer.run();
      log_line(ctx, "privacy: trained " + run_tag(Modality::img_rf, split.pool) + " CNN (" +
                        splitsim::to_string(record.outcome) + ", val rmse " +
                        num(record.final_rmse_db) + " dB)");
      model = trainer.model();
      break;
    }
    case FeatureSource::random:
      model.emplace(split.model_shape(cfg.scenario.img_h, cfg.scenario.img_w), split.seed);
      break;
    case FeatureSource::identity:
      break;
  }
  const auto rows = privacy_sweep(cfg, dataset, model ? &model->device() : nullptr);
  const auto path = ctx.out_dir / "privacy.csv";
  auto out = open_out(path);
  write_privacy_csv(rows, out);
  log_line(ctx, "privacy: " + path.string());
}

void cmd_report(const CommandContext& ctx) {
  if (!fs::is_directory(ctx.out_dir))
    throw std::runtime_error("report: output directory " + ctx.out_dir.string() + " not found");
  std::vector<fs::path> csvs;
  for (const auto& e : fs::directory_iterator(ctx.out_dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") csvs.push_back(e.path());
  std::sort(csvs.begin(), csvs.end());
  const auto path = ctx.out_dir / "report.txt";
  auto out = open_out(path);
  for (const auto& p : csvs) {
    std::ifstream in(p, std::ios::binary);
    out << "== " << p.filename().string() << " ==\n" << in.rdbuf() << '\n';
  }
  log_line(ctx, "report: " + std::to_string(csvs.size()) + " tables -> " + path.string());
}

}  // namespace slsim::cli
