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

#include <CLI11.hpp>

#include <iostream>

#include "slsim/cli/commands.hpp"

namespace {

using slsim::cli::CommandContext;

struct Options {
  std::string config;
  std::string out;
  std::string data;
  std::optional<std::uint64_t> seed;
};

CommandContext make_context(const Options& opt) {
  CommandContext ctx;
  if (!opt.config.empty()) ctx.config = slsim::cli::load_config(opt.config);
  if (opt.seed) ctx.config.override_seed(*opt.seed);
  if (!opt.out.empty()) ctx.config.output.dir = opt.out;
  ctx.config.validate();
  ctx.out_dir = ctx.config.output.dir;
  ctx.data_path = opt.data.empty() ? ctx.out_dir / "dataset.dset" : std::filesystem::path(opt.data);
  ctx.log = &std::cout;
  return ctx;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Split-learning over a simulated mmWave link: data, link analysis, training, privacy"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--config", opt.config, "INI experiment config (defaults when omitted)")
      ->check(CLI::ExistingFile);
  app.add_option("--out", opt.out, "output directory, overrides [output] dir");
  app.add_option("--data", opt.data, "dataset file (default <out>/dataset.dset)");
  app.add_option("--seed", opt.seed, "overrides the scenario and training seeds");

  struct Command {
    const char* name;
    const char* help;
    std::function<void(const CommandContext&)> run;
  };
  const std::vector<Command> commands = {
      {"gen-data", "generate the synthetic depth/power dataset", slsim::cli::cmd_gen_data},
      {"link-table", "uplink payload and success probability per pooling",
       slsim::cli::cmd_link_table},
      {"train", "split-learning runs for every configured modality and pooling",
       [](const CommandContext& c) { slsim::cli::cmd_train(c); }},
      {"privacy", "privacy leakage per pooling", slsim::cli::cmd_privacy},
      {"report", "concatenate the output CSVs into report.txt", slsim::cli::cmd_report},
      {"print-config", "print the effective config", [](const CommandContext& c) {
         std::cout << slsim::cli::serialize_config(c.config);
       }},
  };
  for (const auto& c : commands) app.add_subcommand(c.name, c.help);

  CLI11_PARSE(app, argc, argv);
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const auto ctx = make_context(opt);
    for (const auto& c : commands)
      if (name == c.name) c.run(ctx);
  } catch (const std::exception& e) {
    std::cerr << "slsim " << name << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
