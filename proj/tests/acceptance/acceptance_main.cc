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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "support/oracles.h"
#include "uembed/bounds.h"
#include "uembed/config.h"
#include "uembed/embedder.h"
#include "uembed/experiments.h"
#include "uembed/maps.h"
#include "uembed/parallel.h"
#include "uembed/theory.h"

using namespace uembed;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  bool pass = true;
  std::string details;
};

int failures = 0;

void run(int id, const std::string& title, double budget_s, const std::function<Outcome()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = budget_s <= 0.0 || secs < budget_s;
  const bool pass = o.pass && in_time;
  failures += !pass;
  char timing[96];
  if (budget_s > 0.0)
    std::snprintf(timing, sizeof timing, "%.2f s (budget %.0f s%s)", secs, budget_s,
                  in_time ? "" : ", EXCEEDED");
  else
    std::snprintf(timing, sizeof timing, "%.2f s", secs);
  std::printf("[%s] %2d %s: %s; %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), o.details.c_str(),
              timing);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = std::pow(10.0, a + (b - a) * i / (n - 1));
  return v;
}

std::vector<PeriodicMap> catalog() {
  const PeriodicMap mix = default_mixture_map();
  return {make_square_wave(), make_sawtooth(),    make_multibit(1),      make_multibit(2),
          make_multibit(4),   mix,                quantize_map(mix, 1),  quantize_map(mix, 3)};
}

Outcome closed_form_agreement() {
  double worst = 0.0;
  size_t count = 0;
  for (double sigma : {0.5, 1.0, 2.0})
    for (double delta : {0.5, 1.0, 3.0}) {
      const PeriodicMap sq = make_square_wave();
      const DistanceMapModel model(
          sq, ProjectionSpec::gaussian(sigma * effective_scale_factor(sq, delta)));
      for (double d : logspace(-3.0, 1.0, 100)) {
        worst = std::max(worst, std::abs(universal_binary_map(d, sigma, delta) - model.value(d)));
        ++count;
      }
    }
  return {worst <= 1e-9, fmt("max |closed form - series| = %.2e over %zu points (tol 1e-9)", worst, count)};
}

Outcome oracle_equivalence() {
  using testing::QuadratureOracle;
  constexpr size_t kGrid = 40009;
  struct Case {
    const char* name;
    PeriodicMap map;
    ProjectionSpec spec;
  };
  const Case cases[] = {
      {"square+gaussian", make_square_wave(), ProjectionSpec::gaussian(1.0)},
      {"sawtooth+gaussian", make_sawtooth(), ProjectionSpec::gaussian(1.0)},
      {"mixture+gaussian", default_mixture_map(), ProjectionSpec::gaussian(0.3)},
      {"square+cauchy", make_square_wave(), ProjectionSpec::cauchy(1.0)},
  };
  std::vector<std::pair<const PeriodicMap*, std::unique_ptr<QuadratureOracle>>> tables;
  auto oracle_for = [&](const PeriodicMap& h) -> const QuadratureOracle& {
    for (auto& [m, o] : tables)
      if (m->id() == h.id()) return *o;
    tables.emplace_back(&h, std::make_unique<QuadratureOracle>([&h](double t) { return h(t); }, kGrid));
    return *tables.back().second;
  };
  std::string detail;
  bool pass = true;
  for (const Case& c : cases) {
    const DistanceMapModel model(c.map, c.spec);
    const QuadratureOracle& oracle = oracle_for(c.map);
    double worst = 0.0;
    for (double d : linspace(0.05, 2.0, 10)) {
      const double ref = c.spec.family == Family::kGaussian ? oracle.g_gaussian(c.spec.scale, d)
                                                            : oracle.g_cauchy(c.spec.scale, d);
      worst = std::max(worst, std::abs(ref - model.value(d)));
    }
    pass = pass && worst <= 1e-4;
    detail += fmt("%s%s %.1e", detail.empty() ? "" : ", ", c.name, worst);
  }
  return {pass, "max |oracle - g| " + detail + " (tol 1e-4)"};
}

Outcome saturation_constants() {
  const double bin = universal_binary_map(3.0, 1.0, 1.0);
  const double bin2 = universal_binary_map(1.5, 2.0, 1.0);
  const double saw = DistanceMapModel(make_sawtooth(), ProjectionSpec::gaussian(1.0)).value(50.0);
  double mb_worst = 0.0;
  for (int b : {1, 2, 4, 8})
    mb_worst = std::max(mb_worst, std::abs(multibit_map(50.0, ProjectionSpec::gaussian(1.0), b, 0.1) - 1.0 / 3.0));
  const double saw_cauchy =
      DistanceMapModel(make_sawtooth(), ProjectionSpec::cauchy(1.0), MapFlavor::kSqL2, 1e-12).value(1e7);
  const bool pass = std::abs(bin - 0.5) <= 1e-9 && std::abs(bin2 - 0.5) <= 1e-9 &&
                    std::abs(saw - 1.0 / 3.0) <= 1e-6 && mb_worst <= 1e-6 &&
                    std::abs(saw_cauchy - 1.0 / 3.0) <= 1e-6;
  return {pass, fmt("binary |g-1/2| = %.1e, %.1e at sigma d/Delta = 3; sawtooth |g-1/3| = %.1e "
                    "(gaussian), %.1e (cauchy); multibit closed form |g-1/3| <= %.1e",
                    std::abs(bin - 0.5), std::abs(bin2 - 0.5), std::abs(saw - 1.0 / 3.0),
                    std::abs(saw_cauchy - 1.0 / 3.0), mb_worst)};
}

Outcome bound_sandwich() {
  size_t violations = 0, points = 0;
  for (double sigma : {0.5, 1.0, 2.0})
    for (double delta : {0.5, 1.0, 2.0})
      for (double d : linspace(0.0, 3.0 * delta / sigma, 301)) {
        const double g = universal_binary_map(d, sigma, delta);
        const BinaryMapBounds b = universal_binary_bounds(d, sigma, delta);
        violations += !(b.lower <= g + 1e-12 && g <= std::min(b.upper_exp, b.upper_lin) + 1e-12);
        ++points;
      }
  const double d0 = UniversalBinaryCurve(Family::kGaussian, 1.0, 1.0).saturation_radius();
  const double target = std::sqrt(kPi / 8.0);
  const double rel = std::abs(d0 - target) / target;
  return {violations == 0 && rel <= 0.15,
          fmt("sandwich violations %zu of %zu; D0(95%%) = %.5f Delta/sigma vs Delta sqrt(pi/8)/sigma = "
              "%.5f, relative gap %.1f%% (tol 15%%)",
              violations, points, d0, target, 100.0 * rel)};
}

Outcome kernel_identity() {
  // K and g/2 are summed from the listed spectrum lines, independently of the
  // model, and compared with the mean square of h.
  constexpr double kTol = 1e-5;
  double worst_ratio = 0.0, worst_model = 0.0;
  size_t checks = 0;
  bool pass = true;
  for (const PeriodicMap& h : catalog()) {
    const PowerSpectrum ps = h.power_coeffs(kTol);
    const double parseval = h.mean_square();
    for (const ProjectionSpec& s : {ProjectionSpec::gaussian(0.7), ProjectionSpec::cauchy(0.7)}) {
      const DistanceMapModel m(h, s, MapFlavor::kSqL2, 1e-12, kTol);
      for (double d : {0.0, 0.01, 0.1, 0.5, 1.0, 3.0}) {
        double K = 0.0, half_g = 0.0;
        for (const SpectrumLine& line : ps.coeffs) {
          const double phi = char_fn(s, 2.0 * kPi * line.k, d);
          K += line.power * (line.k == 0 ? 1.0 : phi);
          if (line.k > 0) half_g += line.power * (1.0 - phi);
        }
        const double tail = ps.tail_bound + 1e-13;
        const double err = std::abs(K + half_g - parseval);
        const double model_err = std::max(std::abs(m.kernel(d).value - K), std::abs(0.5 * m.g(d).value - half_g));
        pass = pass && err <= 2.0 * tail && model_err <= 2.0 * tail;
        worst_ratio = std::max(worst_ratio, err / tail);
        worst_model = std::max(worst_model, model_err / tail);
        ++checks;
      }
    }
  }
  return {pass, fmt("max |K + g/2 - sum |H_k|^2| / tail_bound = %.3f, model vs listed series %.3f, "
                    "over %zu checks (limit 2)",
                    worst_ratio, worst_model, checks)};
}

Outcome concentration() {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kDesignSim;
  const DesignResult r = run_design_sim(cfg);
  bool pass = r.runs.size() == 2;
  std::string detail = fmt("N=%zu M=%zu pairs=%zu", cfg.N, cfg.M, cfg.pairs);
  for (const DesignRun& run : r.runs) {
    pass = pass && run.frac_within >= 0.95 && run.violation_rate < run.hoeffding;
    detail += fmt("; sigma=%.1f within 0.1: %.3f, violations at 0.15: %.4f < Hoeffding %.4f",
                  run.sigma, run.frac_within, run.violation_rate, run.hoeffding);
  }
  return {pass, detail};
}

Outcome quantization_trend() {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kQuantizationSim;
  cfg.bits_list = {1, 2, 4};
  const QuantResult r = run_quantization_sim(cfg);
  bool pass = true;
  std::string detail;
  double multibit4 = -1.0;
  for (const char* fam : {"mixture", "multibit"}) {
    std::vector<double> dev;
    for (const QuantRun& q : r.runs)
      if (q.family == fam) dev.push_back(q.mean_abs_dev);
    pass = pass && dev.size() == 3 && dev[0] > dev[1] && dev[1] > dev[2];
    if (dev.size() == 3) {
      detail += fmt("%s%s B=1,2,4: %.4f > %.4f > %.4f", detail.empty() ? "" : "; ", fam, dev[0],
                    dev[1], dev[2]);
      if (std::string(fam) == "multibit") multibit4 = dev[2];
    }
  }
  pass = pass && multibit4 >= 0.0 && multibit4 < 0.01;
  return {pass, detail + fmt("; multibit B=4 mean deviation %.4f (limit 0.01)", multibit4)};
}

Outcome quantized_jl() {
  const auto runs =
      run_quantized_jl_check(1000, 1000, 1000, {1, 2, 4, 6, 8}, 0.25, 0.01, RandomState(8), 1.0);
  bool pass = !runs.empty();
  std::string detail = fmt("N=1000 M=1000 pairs=1000 S=0.25 delta=%.4f", runs.front().delta);
  for (const auto& r : runs) {
    pass = pass && r.pass;
    detail += fmt("; B=%d excess %.3g sat %zu", r.bits, r.max_excess, r.saturated);
  }
  return {pass, detail + " (excess = max |Qd - d| - (delta d + 2 E_Q) must be <= 0)"};
}

BoundsResult bounds_result;

Outcome p2_check() {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kBoundsSweep;
  bounds_result = run_bounds_sweep(cfg);
  const BoundsResult& r = bounds_result;
  const bool pass = r.p2_cells == 16 && r.p2_mc_ok == r.p2_cells && r.p2_region_match == r.p2_cells;
  return {pass, fmt("%zu cells, %zu trials each: MC <= bound + 3 SE in %zu, region match in %zu",
                    r.p2_cells, cfg.mc_trials, r.p2_mc_ok, r.p2_region_match)};
}

Outcome decay_threshold() {
  const double scan = bounds_result.threshold_eps;
  const double exact = std::sqrt(0.5 * std::log(2.0));
  const bool pass = std::round(scan * 1000.0) == std::round(exact * 1000.0);
  return {pass, fmt("exponent sign flip at eps = %.5f, sqrt(0.5 ln 2) = %.5f (3 decimals)", scan, exact)};
}

Outcome subadditivity() {
  const std::vector<double> grid = linspace(0.0, 4.0, 50);
  bool pass = true;
  double worst = -INFINITY;
  size_t n = 0;
  for (const PeriodicMap& h : catalog())
    for (const ProjectionSpec& s : {ProjectionSpec::gaussian(0.5), ProjectionSpec::cauchy(0.5)}) {
      const DistanceMapModel m(h, s, MapFlavor::kSqrt);
      const SubadditivityReport r =
          check_subadditivity([&](double d) { return m.value(d); }, 0.0, 0.0, grid);
      pass = pass && r.pass;
      worst = std::max(worst, r.worst);
      ++n;
    }
  const SubadditivityReport sq = check_subadditivity([](double d) { return d * d; }, 0.0, 0.0, grid);
  pass = pass && !sq.pass;
  return {pass, fmt("sqrt(g) worst slack %.2e over %zu (map, family) pairs on a 50x50 grid; "
                    "g = d^2 %s (worst %.3f at a=%.3f b=%.3f)",
                    worst, n, sq.pass ? "passes (wrong)" : "fails as required", sq.worst, sq.a, sq.b)};
}

Outcome retrieval() {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kRetrieval;
  const RetrievalResult r = run_retrieval(cfg);
  bool pass = r.bitrates.size() == 3;
  std::string detail;
  for (size_t M : r.bitrates) {
    std::vector<double> acc;
    for (double d : r.deltas) acc.push_back(r.accuracy(d, M));
    size_t peak = std::max_element(acc.begin(), acc.end()) - acc.begin();
    bool unimodal = true;
    for (size_t i = 1; i <= peak; ++i) unimodal = unimodal && acc[i] >= acc[i - 1];
    for (size_t i = peak + 1; i < acc.size(); ++i) unimodal = unimodal && acc[i] <= acc[i - 1];
    pass = pass && unimodal;
    detail += fmt("M=%zu %s (peak %.3f at Delta/sqrt(2/pi)=%.2f); ", M, unimodal ? "unimodal" : "NOT unimodal",
                  acc[peak], r.deltas[peak] / std::sqrt(2.0 / kPi));
  }
  size_t best = 0;
  double best_mean = -1.0;
  for (size_t i = 0; i < r.deltas.size(); ++i) {
    double m = 0.0;
    for (size_t M : r.bitrates) m += r.accuracy(r.deltas[i], M);
    if (m > best_mean) best_mean = m, best = i;
  }
  std::string rates;
  bool nondecreasing = true;
  for (size_t j = 0; j < r.bitrates.size(); ++j) {
    const double a = r.accuracy(r.deltas[best], r.bitrates[j]);
    if (j > 0) nondecreasing = nondecreasing && a >= r.accuracy(r.deltas[best], r.bitrates[j - 1]);
    rates += fmt("%s%.3f", j ? " <= " : "", a);
  }
  pass = pass && nondecreasing;
  double extreme_worst = 0.0, exact = -1.0;
  const double n_queries = static_cast<double>(cfg.trials * cfg.clusters);
  const double se = std::sqrt(r.chance * (1.0 - r.chance) / n_queries);
  for (const RetrievalCell& c : r.cells) {
    if (c.kind == "extreme") extreme_worst = std::max(extreme_worst, std::abs(c.accuracy - r.chance));
    if (c.kind == "exact_l2") exact = c.accuracy;
  }
  pass = pass && extreme_worst <= 4.0 * se;
  detail += fmt("best Delta/sqrt(2/pi)=%.2f accuracy by bitrate %s%s; Delta=%.0e |acc - 1/L| <= %.4f "
                "(limit 4 SE = %.4f); exact l2 %.3f",
                r.deltas[best] / std::sqrt(2.0 / kPi), rates.c_str(),
                nondecreasing ? "" : " (NOT nondecreasing)", cfg.extreme_delta, extreme_worst, 4.0 * se,
                exact);
  return {pass, detail};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "uembed_acceptance_determinism";
  fs::remove_all(root);
  size_t files = 0, mismatches = 0;
  std::string bad;
  for (ExperimentKind k : {ExperimentKind::kDesignSim, ExperimentKind::kQuantizationSim,
                           ExperimentKind::kUniversalScatter, ExperimentKind::kRetrieval,
                           ExperimentKind::kBoundsSweep, ExperimentKind::kMapEval}) {
    ExperimentConfig c;
    c.kind = k;
    c.seed = 12345;
    c.N = 200;
    c.M = 500;
    c.pairs = 100;
    c.trials = 3;
    c.clusters = 20;
    c.mc_trials = 5000;
    if (k == ExperimentKind::kRetrieval) c.N = 400;
    if (k == ExperimentKind::kBoundsSweep) c.m_list = {100, 1000};
    std::vector<fs::path> dirs;
    for (unsigned threads : {1u, 4u, 4u}) {
      set_thread_count(threads);
      const fs::path dir = root / (experiment_kind_name(k) + "_" + std::to_string(dirs.size()));
      fs::create_directories(dir);
      write_tables(run_experiment(c), dir.string());
      dirs.push_back(dir);
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const std::string ref = read_file(entry.path());
      for (size_t i = 1; i < dirs.size(); ++i) {
        ++files;
        if (read_file(dirs[i] / entry.path().filename()) != ref) {
          ++mismatches;
          bad += " " + entry.path().filename().string();
        }
      }
    }
  }
  set_thread_count(0);
  fs::remove_all(root);
  return {mismatches == 0 && files > 0,
          fmt("%zu CSV comparisons across all six experiments (reruns at 1 and 4 threads), "
              "%zu differ%s",
              files, mismatches, bad.c_str())};
}

Outcome performance() {
  const size_t S = 10000, N = 1000, M = 2000;
  const EmbeddingOperator op =
      build_operator(ProjectionSpec::gaussian(1.0), make_square_wave(), M, N, RandomState(77));
  Matrix X{S, N, std::vector<double>(S * N)};
  const RandomState rs(78, Stream::kSignals);
  parallel_for(S, [&](size_t s) {
    for (size_t j = 0; j < N; ++j) X.data[s * N + j] = rs.normal(s * N + j) / std::sqrt(double(N));
  });
  const auto t0 = std::chrono::steady_clock::now();
  const auto ys = embed_batch(op, X);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {ys.size() == S && secs < 10.0,
          fmt("embed_batch %zu x N=%zu -> M=%zu in %.2f s with %u worker thread(s), %u hardware "
              "thread(s) (limit 10 s)",
              S, N, M, secs, thread_count(), std::thread::hardware_concurrency())};
}

}  // namespace

int main() {
  run(1, "closed-form agreement", 1.0, closed_form_agreement);
  run(2, "oracle equivalence", 30.0, oracle_equivalence);
  run(3, "saturation constants", 0.0, saturation_constants);
  run(4, "bound sandwich and D0", 0.0, bound_sandwich);
  run(5, "kernel identity", 1.0, kernel_identity);
  run(6, "concentration", 60.0, concentration);
  run(7, "quantization trend", 90.0, quantization_trend);
  run(8, "quantized Johnson-Lindenstrauss", 30.0, quantized_jl);
  run(9, "P2 Monte Carlo", 60.0, p2_check);
  run(10, "decay threshold", 0.0, decay_threshold);
  run(11, "subadditivity", 0.0, subadditivity);
  run(12, "synthetic retrieval", 120.0, retrieval);
  run(13, "determinism", 0.0, determinism);
  run(14, "performance", 0.0, performance);
  std::printf("%d of 14 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
