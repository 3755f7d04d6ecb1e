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

// Experiment runners. Each returns typed summaries together with the CSV
// tables it would write; write_tables() puts them in a directory.
// Output is a pure function of (config, seed).

#ifndef UEMBED_EXPERIMENTS_H_
#define UEMBED_EXPERIMENTS_H_

#include <string>
#include <utility>
#include <vector>

#include "uembed/config.h"
#include "uembed/csv.h"
#include "uembed/maps.h"
#include "uembed/projection.h"
#include "uembed/random.h"

namespace uembed {

using NamedTables = std::vector<std::pair<std::string, CsvTable>>;

void write_tables(const NamedTables& tables, const std::string& dir);

// sqrt(2)/2 (sin 2 pi t + sin 20 pi t).
PeriodicMap default_mixture_map();

// Signal pairs (x_i, x_i + d_i u_i) with d_i evenly spaced on [0, d_max] and
// u_i a uniformly random direction of unit l2 (gaussian) or l1 (cauchy) norm.
// Rows 2i and 2i + 1 of `signals` hold the pair.
struct PairSet {
  Matrix signals;
  std::vector<double> distances;
};
PairSet make_pairs(size_t N, size_t pairs, double d_max, SignalMetric metric,
                   const RandomState& rs);

// Mean squared distance between rows 2i and 2i + 1 of Y.
std::vector<double> pair_sq_distances(const Matrix& Y);

struct DesignRun {
  double sigma = 0.0;
  size_t pairs = 0;
  double frac_within = 0.0;       // |emb - g| <= 0.1
  double violation_rate = 0.0;    // |emb - g| > 0.15
  double hoeffding = 0.0;         // 2 exp(-2 M 0.15^2 / hbar^4)
  double saturation_radius = 0.0;
  double zero_pair_distance = 0.0;
  double max_abs_dev = 0.0;
};
struct DesignResult {
  std::vector<DesignRun> runs;
  NamedTables tables;
};
DesignResult run_design_sim(const ExperimentConfig& cfg);

struct QuantRun {
  std::string family;  // mixture | multibit
  int bits = 0;
  double mean_abs_dev = 0.0;   // mean |emb - unquantized theory|
  double max_sqrt_dev = 0.0;   // max |sqrt(emb) - sqrt(g)|
  double certified_eps = 0.0;  // sqrt-flavor concentration radius at fail_prob
  double quant_error = 0.0;    // per-coordinate quantizer error, normalized E_Q
  double bound = 0.0;          // certified_eps + 2 quant_error
  bool within_bound = false;
};
struct QuantizedJlRun {
  int bits = 0;
  double saturation = 0.0;
  double E_Q = 0.0;             // sqrt(M) 2^-B S
  double delta = 0.0;           // certified multiplicative distortion
  double max_excess = 0.0;      // max |Qd - d| - (delta d + 2 E_Q), <= 0 on success
  double max_quant_dev = 0.0;   // max | ||Qf(x)-Qf(y)|| - ||f(x)-f(y)|| |
  size_t saturated = 0;
  bool pass = false;
};
struct QuantResult {
  std::vector<QuantRun> runs;
  std::vector<QuantizedJlRun> jl;
  NamedTables tables;
};
QuantResult run_quantization_sim(const ExperimentConfig& cfg);

// f(x) = A x with A ~ N(0, 1/M), followed by B-bit post-quantization with
// saturation S, on pairs from make_pairs(N, pairs, d_max). Checks (1 - delta) d - 2 E_Q <= ||Qf(x) - Qf(y)|| <=
// (1 + delta) d + 2 E_Q over `pairs` pairs, delta from the gaussian
// Johnson-Lindenstrauss tail with a union bound at fail_prob.
std::vector<QuantizedJlRun> run_quantized_jl_check(size_t N, size_t M, size_t pairs,
                                                   const std::vector<int>& bits, double saturation,
                                                   double fail_prob, const RandomState& rs,
                                                   double d_max = 2.0);

struct ScatterCell {
  double delta = 0.0;
  size_t M = 0;
  double spread_q95 = 0.0;         // 95% quantile of |hamming - g|
  double theory_radius = 0.0;      // D0 of the closed form
  double fitted_radius = 0.0;      // D0 of the best-fitting sigma / Delta
  double min_hamming = 0.0;
  double max_hamming = 0.0;
};
struct ScatterResult {
  std::vector<ScatterCell> cells;
  NamedTables tables;
};
ScatterResult run_universal_scatter(const ExperimentConfig& cfg);

struct RetrievalDataset {
  Matrix database;                 // clusters * points_per_cluster rows
  std::vector<int> db_labels;
  Matrix queries;                  // one per cluster
  std::vector<int> query_labels;
  size_t attempts = 0;             // draws until the margin held
};
// Cluster centers ~ N(0, I/N), members center + noise N(0, I/N). Redraws
// until every query's farthest same-cluster point is nearer than its nearest
// other-cluster point; throws InvalidArgument after 100 failed draws.
RetrievalDataset make_retrieval_dataset(size_t N, size_t clusters, size_t per_cluster,
                                        double noise, const RandomState& rs);

// Majority vote over the J nearest database rows. Distance ties keep index
// order; vote ties go to the cluster with the best-ranked member.
int majority_vote(const std::vector<double>& dist, const std::vector<int>& labels, size_t J);

struct RetrievalCell {
  double delta = 0.0;   // 0 for the exact l2 row
  size_t M = 0;         // 0 for the exact l2 row
  double accuracy = 0.0;
  std::string kind;     // sweep | extreme | exact_l2
};
struct RetrievalResult {
  std::vector<double> deltas;  // sweep values, ascending
  std::vector<size_t> bitrates;
  std::vector<RetrievalCell> cells;
  double chance = 0.0;
  NamedTables tables;

  double accuracy(double delta, size_t M) const;
};
RetrievalResult run_retrieval(const ExperimentConfig& cfg);

struct BoundsResult {
  double threshold_eps = 0.0;   // first eps on a 1e-5 grid where the exponent decays in M
  double threshold_exact = 0.0; // sqrt(c1 / 2)
  size_t p2_cells = 0;
  size_t p2_mc_ok = 0;          // MC <= bound + 3 SE
  size_t p2_region_match = 0;   // (bound < 1) == p2_meaningful
  NamedTables tables;
};
BoundsResult run_bounds_sweep(const ExperimentConfig& cfg);

struct MapEvalResult {
  NamedTables tables;
};
MapEvalResult run_map_eval(const ExperimentConfig& cfg);

// Dispatches on cfg.kind and returns the tables.
NamedTables run_experiment(const ExperimentConfig& cfg);

}  // namespace uembed

#endif  // UEMBED_EXPERIMENTS_H_
