// Copyright 2026 The storystyle Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver. Exit codes: 0 success, 1 validation failure,
// 2 missing input, 3 runtime or numeric failure.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "storystyle/error.h"
#include "storystyle/pipeline.h"

namespace {

namespace ss = storystyle;

constexpr int kExitValidation = 1;
constexpr int kExitMissing = 2;
constexpr int kExitRuntime = 3;

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string mode;
  bool resume = false;
  std::optional<std::int64_t> steps;
};

ss::PipelineConfig build_config(const GlobalFlags& flags) {
  ss::PipelineConfig config;
  if (!flags.config.empty()) {
    config = ss::load_pipeline_config(flags.config);
  } else {
    config = ss::pipeline_config_from(ss::KeyValueConfig{});
  }
  if (flags.seed) config.seed = *flags.seed;
  if (!flags.out.empty()) config.out_dir = flags.out;
  if (!flags.mode.empty()) {
    auto mode = ss::parse_pairing_mode(flags.mode);
    if (!mode) {
      throw ss::ValidationError("--mode must be consecutive or emotion, got '" +
                                flags.mode + "'");
    }
    config.pairing_mode = *mode;
  }
  config.resume = flags.resume;
  if (flags.steps) config.train_steps = *flags.steps;
  return config;
}

int run(const GlobalFlags& flags,
        const std::function<ss::CommandResult(const ss::PipelineConfig&)>& command) {
  try {
    const ss::CommandResult result = command(build_config(flags));
    std::cout << result.report;
    return 0;
  } catch (const ss::MissingInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMissing;
  } catch (const ss::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ss::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corpus augmentation and expressive style training toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags flags;
  app.add_option("--config", flags.config, "key = value configuration file");
  app.add_option("--seed", flags.seed, "master seed (overrides config)");
  app.add_option("--out", flags.out, "output directory (overrides config)");

  std::function<ss::CommandResult(const ss::PipelineConfig&)> command;
  auto* stats = app.add_subcommand("stats", "utterance length and pause statistics");
  stats->callback([&] { command = ss::cmd_stats; });
  auto* label = app.add_subcommand("label", "threshold or fetch emotion labels");
  label->callback([&] { command = ss::cmd_label; });
  auto* augment = app.add_subcommand("augment", "build concatenated training pairs");
  augment->add_option("--mode", flags.mode, "pairing: consecutive or emotion");
  augment->callback([&] { command = ss::cmd_augment; });
  auto* train = app.add_subcommand("train-style", "train the style module");
  train->add_flag("--resume", flags.resume, "continue from the saved checkpoint");
  train->add_option("--steps", flags.steps, "training steps (overrides config)");
  train->callback([&] { command = ss::cmd_train_style; });
  auto* eval = app.add_subcommand("eval", "objective evaluation report");
  eval->callback([&] { command = ss::cmd_eval; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }
  return run(flags, command);
}
