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

// Experiment configuration files.
//
//   # comment
//   experiment = design_sim
//   M = 2000
//   scale_list = 0.2, 0.4
//
// One `key = value` per line; `#` starts a comment; lists are
// comma-separated. Unknown and repeated keys are errors.

#ifndef UEMBED_CONFIG_H_
#define UEMBED_CONFIG_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "uembed/projection.h"

namespace uembed {

enum class ExperimentKind {
  kDesignSim,
  kQuantizationSim,
  kUniversalScatter,
  kRetrieval,
  kBoundsSweep,
  kMapEval,
};

ExperimentKind parse_experiment_kind(std::string_view name);
std::string experiment_kind_name(ExperimentKind k);

struct ExperimentConfig {
  std::optional<ExperimentKind> kind;
  uint64_t seed = 1;
  std::string output_dir;

  // Signals and embedding.
  size_t N = 1000;
  size_t M = 2000;
  size_t pairs = 500;
  double d_max = 2.0;
  std::string map;  // empty: experiment default
  Family family = Family::kGaussian;
  double scale = 1.0;  // sigma or gamma
  std::vector<double> scale_list = {0.2, 0.4};
  double delta = 1.0;
  std::vector<double> delta_list;
  std::vector<int> bits_list = {1, 2, 4};
  std::vector<size_t> m_list;
  std::vector<std::string> quant_families = {"mixture", "multibit"};
  double multibit_period = 0.4;  // 2^B Delta held fixed across B
  double fail_prob = 0.01;
  double eps = 0.1;

  // Retrieval.
  size_t clusters = 50;
  size_t points_per_cluster = 5;
  double cluster_noise = 0.6;
  size_t neighbors = 20;  // J
  size_t trials = 20;
  double extreme_delta = 1e7;

  // Bounds sweep.
  std::vector<double> q_list = {2, 100, 10000};
  std::vector<double> eps_list = {0.05, 0.1, 0.2};
  double hbar = 1.0;
  std::vector<double> n_list = {16, 64, 256, 1024};
  std::vector<double> r_ratio_list = {0.05, 0.25, 0.6, 1.5};
  size_t mc_trials = 100000;
  double c0 = 1e-6;

  // map-eval.
  size_t points = 200;

  // Keys that appeared in the file.
  std::set<std::string> keys_set;
};

// Parses file contents. Throws ConfigError naming the offending line.
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig parse_config(const std::string& path);

// Range and consistency checks. Throws ConfigError.
void validate_config(const ExperimentConfig& cfg);

// All keys accepted by the parser.
const std::vector<std::string>& config_keys();

}  // namespace uembed

#endif  // UEMBED_CONFIG_H_
