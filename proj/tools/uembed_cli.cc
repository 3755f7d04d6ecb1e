// Copyright 2026 The uembed Authors.
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

// uembed: run embedding experiments and write CSV tables.
//
//   uembed design-sim --config design.cfg --out results/ [--seed 7]
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.
// UEMBED_THREADS sets the worker count.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "uembed/config.h"
#include "uembed/error.h"
#include "uembed/experiments.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string config;
  std::string out;
  std::optional<uint64_t> seed;
};

uembed::ExperimentConfig load(const Options& opt, uembed::ExperimentKind kind) {
  uembed::ExperimentConfig cfg;
  if (!opt.config.empty()) cfg = uembed::parse_config(opt.config);
  if (cfg.kind && *cfg.kind != kind)
    throw uembed::ConfigError("config names experiment '" + uembed::experiment_kind_name(*cfg.kind) +
                              "' but the subcommand runs '" + uembed::experiment_kind_name(kind) +
                              "'");
  cfg.kind = kind;
  if (opt.seed) cfg.seed = *opt.seed;
  if (!opt.out.empty()) cfg.output_dir = opt.out;
  if (cfg.output_dir.empty()) throw uembed::ConfigError("no output directory (use --out)");
  uembed::validate_config(cfg);
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec || !std::filesystem::is_directory(cfg.output_dir))
    throw uembed::ConfigError("output directory '" + cfg.output_dir + "' is not writable");
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Universal embeddings: distance-map simulations and bound calculators"};
  app.require_subcommand(1);

  Options opt;
  const std::pair<const char*, uembed::ExperimentKind> commands[] = {
      {"design-sim", uembed::ExperimentKind::kDesignSim},
      {"quant-sim", uembed::ExperimentKind::kQuantizationSim},
      {"scatter", uembed::ExperimentKind::kUniversalScatter},
      {"retrieve", uembed::ExperimentKind::kRetrieval},
      {"bounds", uembed::ExperimentKind::kBoundsSweep},
      {"map-eval", uembed::ExperimentKind::kMapEval},
  };
  std::optional<uembed::ExperimentKind> chosen;
  for (const auto& [name, kind] : commands) {
    CLI::App* sub = app.add_subcommand(name, "Run the " + uembed::experiment_kind_name(kind) +
                                                 " experiment");
    sub->add_option("--config", opt.config, "Config file (key = value lines)");
    sub->add_option("--out", opt.out, "Output directory");
    sub->add_option("--seed", opt.seed, "Seed override");
    const uembed::ExperimentKind k = kind;
    sub->callback([&chosen, k] { chosen = k; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  uembed::ExperimentConfig cfg;
  try {
    cfg = load(opt, *chosen);
  } catch (const uembed::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }

  try {
    const uembed::NamedTables tables = uembed::run_experiment(cfg);
    uembed::write_tables(tables, cfg.output_dir);
    for (const auto& [name, table] : tables)
      std::cout << (std::filesystem::path(cfg.output_dir) / name).string() << " ("
                << table.rows.size() << " rows)\n";
  } catch (const uembed::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return EXIT_SUCCESS;
}
