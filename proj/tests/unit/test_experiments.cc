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


#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>

#include "doctest.h"
#include "uembed/error.h"
#include "uembed/experiments.h"
#include "uembed/parallel.h"
#include "uembed/projection.h"

using namespace uembed;

namespace {

std::string dump(const NamedTables& tables) {
  std::ostringstream os;
  for (const auto& [name, t] : tables) {
    os << "== " << name << "\n";
    write_csv(os, t);
  }
  return os.str();
}

ExperimentConfig small(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.seed = 9;
  c.N = 40;
  c.M = 300;
  c.pairs = 30;
  c.clusters = 6;
  c.points_per_cluster = 3;
  c.neighbors = 3;
  c.trials = 2;
  c.m_list = {};
  c.mc_trials = 500;
  c.n_list = {16};
  c.r_ratio_list = {0.05};
  c.points = 11;
  return c;
}

}  // namespace

TEST_CASE("signal pairs") {
  PairSet p = make_pairs(20, 11, 2.0, SignalMetric::kL2, RandomState(1, Stream::kSignals));
  REQUIRE(p.signals.rows == 22);
  const ProjectionSpec g = ProjectionSpec::gaussian(1.0);
  for (size_t i = 0; i < 11; ++i) {
    CHECK(p.distances[i] == doctest::Approx(0.2 * i));
    const double d = signal_distance(g, {p.signals.row(2 * i), 20}, {p.signals.row(2 * i + 1), 20});
    CHECK(d == doctest::Approx(p.distances[i]).epsilon(1e-12));
  }
  PairSet q = make_pairs(20, 5, 1.0, SignalMetric::kL1, RandomState(1, Stream::kSignals));
  const ProjectionSpec c = ProjectionSpec::cauchy(1.0);
  for (size_t i = 0; i < 5; ++i)
    CHECK(signal_distance(c, {q.signals.row(2 * i), 20}, {q.signals.row(2 * i + 1), 20}) ==
          doctest::Approx(q.distances[i]).epsilon(1e-12));
  Matrix Y{4, 2, {0, 1, 1, 1, 0.5, 0.5, 0.5, 0.5}};
  CHECK(pair_sq_distances(Y) == std::vector<double>{0.5, 0.0});
}

TEST_CASE("majority vote") {
  std::vector<double> dist = {0.1, 0.2, 0.3, 0.4, 0.05};
  std::vector<int> labels = {1, 2, 2, 3, 1};
  CHECK(majority_vote(dist, labels, 1) == 1);
  CHECK(majority_vote(dist, labels, 3) == 1);
  // Two votes each for 1 and 2: the best-ranked member decides.
  CHECK(majority_vote(dist, labels, 4) == 1);
  std::vector<double> d2 = {0.3, 0.1, 0.2, 0.9};
  std::vector<int> l2 = {5, 7, 5, 7};
  CHECK(majority_vote(d2, l2, 2) == 7);
  CHECK(majority_vote(d2, l2, 3) == 5);
  // Distance ties keep index order.
  std::vector<double> d3 = {0.5, 0.5, 0.5};
  std::vector<int> l3 = {4, 8, 8};
  CHECK(majority_vote(d3, l3, 1) == 4);
  CHECK(majority_vote(d3, l3, 3) == 8);
  CHECK_THROWS_AS(majority_vote(d3, l3, 0), InvalidArgument);
}

TEST_CASE("retrieval dataset margin") {
  RetrievalDataset ds = make_retrieval_dataset(30, 8, 4, 0.3, RandomState(4));
  REQUIRE(ds.database.rows == 32);
  REQUIRE(ds.queries.rows == 8);
  const ProjectionSpec g = ProjectionSpec::gaussian(1.0);
  for (size_t q = 0; q < 8; ++q) {
    double far_same = 0.0, near_other = INFINITY;
    for (size_t i = 0; i < 32; ++i) {
      const double d = signal_distance(g, {ds.queries.row(q), 30}, {ds.database.row(i), 30});
      if (ds.db_labels[i] == ds.query_labels[q]) far_same = std::max(far_same, d);
      else near_other = std::min(near_other, d);
    }
    CHECK(far_same < near_other);
  }
  CHECK_THROWS_AS(make_retrieval_dataset(30, 8, 4, 50.0, RandomState(4)), InvalidArgument);
}

TEST_CASE("experiments are deterministic and thread independent") {
  for (ExperimentKind k : {ExperimentKind::kDesignSim, ExperimentKind::kQuantizationSim,
                           ExperimentKind::kUniversalScatter, ExperimentKind::kRetrieval,
                           ExperimentKind::kBoundsSweep, ExperimentKind::kMapEval}) {
    ExperimentConfig c = small(k);
    if (k == ExperimentKind::kUniversalScatter) c.m_list = {200, 50};
    if (k == ExperimentKind::kRetrieval) c.m_list = {16, 32};
    if (k == ExperimentKind::kBoundsSweep) c.m_list = {100, 1000};
    set_thread_count(1);
    const std::string a = dump(run_experiment(c));
    set_thread_count(3);
    const std::string b = dump(run_experiment(c));
    CHECK_MESSAGE(a == b, experiment_kind_name(k));
    CHECK(!a.empty());
    c.seed = 10;
    if (k != ExperimentKind::kMapEval && k != ExperimentKind::kBoundsSweep)
      CHECK_MESSAGE(dump(run_experiment(c)) != a, experiment_kind_name(k));
  }
  set_thread_count(0);
  ExperimentConfig none;
  CHECK_THROWS_AS(run_experiment(none), ConfigError);
}

TEST_CASE("map evaluation table") {
  ExperimentConfig c = small(ExperimentKind::kMapEval);
  MapEvalResult r = run_map_eval(c);
  REQUIRE(r.tables.size() == 1);
  const CsvTable& t = r.tables[0].second;
  CHECK(t.header == std::vector<std::string>{"d", "g", "g_sqrt", "K", "lower5", "upper6", "upper7"});
  CHECK(t.rows.size() == 11);
  CHECK(t.rows[0][1] == "0");
  c.map = "sawtooth";
  CHECK(run_map_eval(c).tables[0].second.header.size() == 4);
}

TEST_CASE("quantized johnson-lindenstrauss check") {
  auto runs = run_quantized_jl_check(200, 400, 50, {1, 4, 8}, 1.0, 0.01, RandomState(2));
  REQUIRE(runs.size() == 3);
  for (const auto& r : runs) {
    CHECK(r.pass);
    CHECK(r.saturated == 0);
    CHECK(r.max_excess <= 0.0);
    CHECK(r.E_Q == doctest::Approx(std::sqrt(400.0) * std::ldexp(1.0, -r.bits)));
  }
  CHECK(runs[2].max_quant_dev < runs[0].max_quant_dev);
  // A saturation level inside the signal range clamps coordinates and fails.
  auto clamped = run_quantized_jl_check(200, 400, 50, {8}, 0.05, 0.01, RandomState(2));
  CHECK(clamped[0].saturated > 0);
  CHECK_FALSE(clamped[0].pass);
}

TEST_CASE("tables land on disk") {
  ExperimentConfig c = small(ExperimentKind::kMapEval);
  const auto dir = std::filesystem::temp_directory_path() / "uembed_exp_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  write_tables(run_experiment(c), dir.string());
  CHECK(read_csv((dir / "map_eval.csv").string()).rows.size() == 11);
  std::filesystem::remove_all(dir);
}
