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

#include "uembed/experiments.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>

#include <boost/math/tools/minima.hpp>

#include "uembed/bounds.h"
#include "uembed/embedder.h"
#include "uembed/error.h"
#include "uembed/parallel.h"
#include "uembed/theory.h"

namespace uembed {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDesignBand = 0.1;
constexpr double kDesignHoeffdingEps = 0.15;

std::string num(double v) { return format_number(v); }
std::string num(size_t v) { return std::to_string(v); }

std::string cell_name(const std::string& prefix, const std::vector<std::pair<std::string, double>>& kv) {
  std::string s = prefix;
  for (const auto& [k, v] : kv) s += "_" + k + num(v);
  return s + ".csv";
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  size_t rank = static_cast<size_t>(std::ceil(q * static_cast<double>(v.size())));
  rank = std::clamp<size_t>(rank, 1, v.size());
  return v[rank - 1];
}

ProjectionSpec spec_at(const ExperimentConfig& cfg, double scale) {
  return ProjectionSpec{cfg.family, scale};
}

PeriodicMap config_map(const ExperimentConfig& cfg, PeriodicMap fallback) {
  return cfg.map.empty() ? fallback : parse_map(cfg.map);
}

CsvTable scatter_table(const std::string& value_name, const std::vector<double>& d,
                       const std::vector<double>& emb, const std::vector<double>& theory) {
  CsvTable t;
  t.header = {"d_true", value_name, "g_theory"};
  for (size_t i = 0; i < d.size(); ++i) t.add_row({num(d[i]), num(emb[i]), num(theory[i])});
  return t;
}

// Concentration radius for the sq_l2 point-cloud guarantee at failure p:
// Q^2 exp(-2 M eps^2 / hbar^4) = p.
double certified_sq_eps(double Q, double M, double hbar, double p) {
  return hbar * hbar * std::sqrt((2.0 * std::log(Q) - std::log(p)) / (2.0 * M));
}

}  // namespace

void write_tables(const NamedTables& tables, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, table] : tables) write_csv((std::filesystem::path(dir) / name).string(), table);
}

PeriodicMap default_mixture_map() {
  const double a = std::sqrt(2.0) / 2.0;
  return make_fourier_mixture({{1, a}, {10, a}});
}

PairSet make_pairs(size_t N, size_t pairs, double d_max, SignalMetric metric,
                   const RandomState& rs) {
  if (N == 0 || pairs == 0) throw InvalidArgument("pair set needs N > 0 and pairs > 0");
  if (!(d_max >= 0.0) || !std::isfinite(d_max)) throw InvalidArgument("d_max must be finite");
  const RandomState base = rs.with_stream(Stream::kSignals).with_substream(0);
  const RandomState dirs = rs.with_stream(Stream::kSignals).with_substream(1);
  PairSet ps;
  ps.signals.rows = 2 * pairs;
  ps.signals.cols = N;
  ps.signals.data.resize(2 * pairs * N);
  ps.distances.resize(pairs);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(N));
  parallel_for(pairs, [&](size_t i) {
    const double d = pairs == 1 ? d_max : d_max * static_cast<double>(i) / (pairs - 1);
    ps.distances[i] = d;
    double* x = ps.signals.row(2 * i);
    double* y = ps.signals.row(2 * i + 1);
    std::vector<double> u(N);
    double norm = 0.0;
    for (size_t j = 0; j < N; ++j) {
      x[j] = base.normal(i * N + j) * inv_sqrt_n;
      u[j] = dirs.normal(i * N + j);
      norm += metric == SignalMetric::kL2 ? u[j] * u[j] : std::abs(u[j]);
    }
    if (metric == SignalMetric::kL2) norm = std::sqrt(norm);
    for (size_t j = 0; j < N; ++j) y[j] = x[j] + d * (u[j] / norm);
    if (d == 0.0) std::copy(x, x + N, y);
  });
  return ps;
}

std::vector<double> pair_sq_distances(const Matrix& Y) {
  if (Y.rows % 2 != 0) throw InvalidArgument("pair matrix needs an even row count");
  std::vector<double> out(Y.rows / 2);
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = embedding_distance(std::span<const double>(Y.row(2 * i), Y.cols),
                                std::span<const double>(Y.row(2 * i + 1), Y.cols),
                                DistanceMetric::kSqL2Mean);
  return out;
}

// ---------------------------------------------------------------------------
// Design simulation

DesignResult run_design_sim(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const RandomState rs(cfg.seed);
  const PeriodicMap map = config_map(cfg, default_mixture_map());
  const ProjectionSpec probe = spec_at(cfg, 1.0);
  const PairSet ps = make_pairs(cfg.N, cfg.pairs, cfg.d_max, probe.metric(), rs.derive(1));
  const double hbar = map.range();

  DesignResult res;
  CsvTable summary;
  summary.header = {"sigma", "pairs", "frac_within_0.1", "violation_rate_0.15",
                    "hoeffding_bound_0.15", "saturation_radius", "max_abs_dev",
                    "zero_pair_distance"};
  for (size_t si = 0; si < cfg.scale_list.size(); ++si) {
    const double sigma = cfg.scale_list[si];
    const EmbeddingOperator op =
        build_operator(spec_at(cfg, sigma), map, cfg.M, cfg.N, rs.derive(100 + si), cfg.delta);
    const DistanceMapModel model(map, op.spec());
    Matrix Y;
    embed_batch_into(op, ps.signals, Y);
    const std::vector<double> emb = pair_sq_distances(Y);
    std::vector<double> theory(emb.size());
    for (size_t i = 0; i < emb.size(); ++i) theory[i] = model.g(ps.distances[i]).value;

    DesignRun run;
    run.sigma = sigma;
    run.pairs = emb.size();
    size_t within = 0, viol = 0;
    for (size_t i = 0; i < emb.size(); ++i) {
      const double dev = std::abs(emb[i] - theory[i]);
      within += dev <= kDesignBand;
      viol += dev > kDesignHoeffdingEps;
      run.max_abs_dev = std::max(run.max_abs_dev, dev);
      if (ps.distances[i] == 0.0) run.zero_pair_distance = std::max(run.zero_pair_distance, emb[i]);
    }
    run.frac_within = static_cast<double>(within) / emb.size();
    run.violation_rate = static_cast<double>(viol) / emb.size();
    run.hoeffding = hoeffding_pair_bound(static_cast<double>(cfg.M), kDesignHoeffdingEps, hbar);
    run.saturation_radius = model.saturation_radius();
    res.runs.push_back(run);

    res.tables.emplace_back(cell_name("design", {{"sigma", sigma}}),
                            scatter_table("emb_sq_l2_mean", ps.distances, emb, theory));
    summary.add_row({num(sigma), num(run.pairs), num(run.frac_within), num(run.violation_rate),
                     num(run.hoeffding), num(run.saturation_radius), num(run.max_abs_dev),
                     num(run.zero_pair_distance)});
  }
  res.tables.emplace_back("design_summary.csv", std::move(summary));
  return res;
}

// ---------------------------------------------------------------------------
// Quantization simulation

std::vector<QuantizedJlRun> run_quantized_jl_check(size_t N, size_t M, size_t pairs,
                                                   const std::vector<int>& bits, double saturation,
                                                   double fail_prob, const RandomState& rs,
                                                   double d_max) {
  if (!(saturation > 0.0)) throw InvalidArgument("saturation must be positive");
  if (!(fail_prob > 0.0 && fail_prob < 1.0)) throw InvalidArgument("fail_prob must be in (0, 1)");
  const PairSet ps = make_pairs(N, pairs, d_max, SignalMetric::kL2, rs.derive(1));
  const Matrix A =
      sample_projection(ProjectionSpec::gaussian(1.0 / std::sqrt(static_cast<double>(M))), M, N,
                        rs.derive(2).with_stream(Stream::kMatrix));
  Matrix F;
  project_batch_into(A, ps.signals, F);

  // P(|chi2_M / M - 1| >= t) <= 2 exp(-M (t^2/4 - t^3/6)), union over pairs.
  const double target = std::log(2.0 * pairs / fail_prob) / static_cast<double>(M);
  auto rate = [](double t) { return t * t / 4.0 - t * t * t / 6.0; };
  if (rate(1.0) < target) throw InvalidArgument("M too small for a certified distortion");
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (rate(mid) < target ? lo : hi) = mid;
  }
  const double delta = 1.0 - std::sqrt(1.0 - hi);

  std::vector<QuantizedJlRun> out;
  for (int b : bits) {
    QuantizedJlRun run;
    run.bits = b;
    run.saturation = saturation;
    run.E_Q = std::sqrt(static_cast<double>(M)) * std::ldexp(saturation, -b);
    run.delta = delta;
    run.max_excess = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < pairs; ++i) {
      const double* f = F.row(2 * i);
      const double* g = F.row(2 * i + 1);
      double qd = 0.0, fd = 0.0;
      for (size_t r = 0; r < M; ++r) {
        run.saturated += (std::abs(f[r]) > saturation) + (std::abs(g[r]) > saturation);
        const double qa = quantize_uniform(f[r], -saturation, saturation, b);
        const double qb = quantize_uniform(g[r], -saturation, saturation, b);
        qd += (qa - qb) * (qa - qb);
        fd += (f[r] - g[r]) * (f[r] - g[r]);
      }
      qd = std::sqrt(qd);
      fd = std::sqrt(fd);
      const double d = ps.distances[i];
      run.max_excess = std::max(run.max_excess, std::abs(qd - d) - (delta * d + 2.0 * run.E_Q));
      run.max_quant_dev = std::max(run.max_quant_dev, std::abs(qd - fd));
    }
    run.pass = run.max_excess <= 0.0 && run.saturated == 0;
    out.push_back(run);
  }
  return out;
}

QuantResult run_quantization_sim(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const RandomState rs(cfg.seed);
  const double sigma = cfg.scale_list.front();
  const ProjectionSpec spec = spec_at(cfg, sigma);
  const PairSet ps = make_pairs(cfg.N, cfg.pairs, cfg.d_max, spec.metric(), rs.derive(1));
  const double Q = 2.0 * static_cast<double>(cfg.pairs);

  QuantResult res;
  CsvTable summary;
  summary.header = {"family", "bits", "mean_abs_dev", "max_sqrt_dev", "certified_eps",
                    "quant_error", "bound", "within_bound"};

  for (size_t fi = 0; fi < cfg.quant_families.size(); ++fi) {
    const std::string& family = cfg.quant_families[fi];
    const PeriodicMap inner = family == "mixture" ? config_map(cfg, default_mixture_map())
                                                  : make_sawtooth();
    const double hbar = inner.range();
    const double eps = std::sqrt(certified_sq_eps(Q, static_cast<double>(cfg.M), hbar, cfg.fail_prob));
    std::optional<DistanceMapModel> mixture_model;
    if (family == "mixture")
      mixture_model.emplace(inner, spec.rescaled(effective_scale_factor(inner, cfg.delta)));

    for (int b : cfg.bits_list) {
      PeriodicMap qmap = family == "mixture" ? quantize_map(inner, b) : make_multibit(b);
      const double delta_b = family == "mixture" ? cfg.delta : cfg.multibit_period / std::ldexp(1.0, b);
      const EmbeddingOperator op =
          build_operator(spec, qmap, cfg.M, cfg.N, rs.derive(200 + static_cast<uint32_t>(fi)), delta_b);
      Matrix Y;
      embed_batch_into(op, ps.signals, Y);
      const std::vector<double> emb = pair_sq_distances(Y);
      std::vector<double> theory(emb.size());
      for (size_t i = 0; i < emb.size(); ++i)
        theory[i] = mixture_model ? mixture_model->g(ps.distances[i]).value
                                  : multibit_map(ps.distances[i], spec, b, delta_b);

      QuantRun run;
      run.family = family;
      run.bits = b;
      run.certified_eps = eps;
      run.quant_error = hbar / std::ldexp(1.0, b + 1);
      run.bound = quantized_bound_inflation(eps, run.quant_error);
      double sum = 0.0;
      for (size_t i = 0; i < emb.size(); ++i) {
        sum += std::abs(emb[i] - theory[i]);
        run.max_sqrt_dev =
            std::max(run.max_sqrt_dev, std::abs(std::sqrt(emb[i]) - std::sqrt(theory[i])));
      }
      run.mean_abs_dev = sum / emb.size();
      run.within_bound = run.max_sqrt_dev <= run.bound;
      res.runs.push_back(run);

      res.tables.emplace_back(
          cell_name("quant_" + family, {{"B", static_cast<double>(b)}}),
          scatter_table("emb_sq_l2_mean", ps.distances, emb, theory));
      summary.add_row({family, std::to_string(b), num(run.mean_abs_dev), num(run.max_sqrt_dev),
                       num(run.certified_eps), num(run.quant_error), num(run.bound),
                       run.within_bound ? "1" : "0"});
    }
  }
  res.tables.emplace_back("quant_summary.csv", std::move(summary));

  constexpr double kJlSaturation = 0.25;
  res.jl = run_quantized_jl_check(cfg.N, cfg.M, cfg.pairs, cfg.bits_list, kJlSaturation,
                                  cfg.fail_prob, rs.derive(300), cfg.d_max);
  CsvTable jl;
  jl.header = {"bits", "saturation", "E_Q", "delta", "max_excess", "max_quant_dev", "saturated",
               "pass"};
  for (const auto& r : res.jl)
    jl.add_row({std::to_string(r.bits), num(r.saturation), num(r.E_Q), num(r.delta),
                num(r.max_excess), num(r.max_quant_dev), num(r.saturated), r.pass ? "1" : "0"});
  res.tables.emplace_back("quant_jl.csv", std::move(jl));
  return res;
}

// ---------------------------------------------------------------------------
// Universal scatter

ScatterResult run_universal_scatter(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const RandomState rs(cfg.seed);
  const std::vector<double> deltas =
      cfg.delta_list.empty() ? std::vector<double>{0.5, 1.5} : cfg.delta_list;
  const std::vector<size_t> ms = cfg.m_list.empty() ? std::vector<size_t>{1000, 100} : cfg.m_list;
  const PeriodicMap map = make_square_wave();
  const ProjectionSpec spec = spec_at(cfg, cfg.scale);
  const PairSet ps = make_pairs(cfg.N, cfg.pairs, cfg.d_max, spec.metric(), rs.derive(1));
  const double unit_radius = UniversalBinaryCurve(spec.family, 1.0, 1.0).saturation_radius();

  ScatterResult res;
  CsvTable summary;
  summary.header = {"delta", "M", "spread_q95", "theory_radius", "fitted_radius", "min_hamming",
                    "max_hamming"};
  for (size_t di = 0; di < deltas.size(); ++di) {
    const double delta = deltas[di];
    const UniversalBinaryCurve curve(spec.family, spec.scale, delta);
    std::vector<double> theory(ps.distances.size());
    for (size_t i = 0; i < theory.size(); ++i) theory[i] = curve.value(ps.distances[i]);
    for (size_t mi = 0; mi < ms.size(); ++mi) {
      const EmbeddingOperator op = build_operator(
          spec, map, ms[mi], cfg.N, rs.derive(400 + static_cast<uint32_t>(mi)), delta);
      Matrix Y;
      embed_batch_into(op, ps.signals, Y);
      std::vector<double> ham(ps.distances.size()), dev(ps.distances.size());
      for (size_t i = 0; i < ham.size(); ++i) {
        ham[i] = embedding_distance(std::span<const double>(Y.row(2 * i), Y.cols),
                                    std::span<const double>(Y.row(2 * i + 1), Y.cols),
                                    DistanceMetric::kHammingMean);
        dev[i] = std::abs(ham[i] - theory[i]);
      }
      // Least-squares fit of c in hamming ~ G(c d), G the unit-ratio curve.
      auto loss = [&](double logc) {
        const double c = std::exp(logc);
        double s = 0.0;
        for (size_t i = 0; i < ham.size(); ++i) {
          const double r = ham[i] - universal_binary_map(c * ps.distances[i], 1.0, 1.0);
          s += r * r;
        }
        return s;
      };
      const double c0 = std::log(spec.scale / delta);
      const auto best = boost::math::tools::brent_find_minima(loss, c0 - std::log(10.0),
                                                              c0 + std::log(10.0), 40);
      ScatterCell cell;
      cell.delta = delta;
      cell.M = ms[mi];
      cell.spread_q95 = quantile(dev, 0.95);
      cell.theory_radius = curve.saturation_radius();
      cell.fitted_radius = unit_radius / std::exp(best.first);
      cell.min_hamming = *std::min_element(ham.begin(), ham.end());
      cell.max_hamming = *std::max_element(ham.begin(), ham.end());
      res.cells.push_back(cell);
      res.tables.emplace_back(
          cell_name("scatter", {{"delta", delta}, {"M", static_cast<double>(ms[mi])}}),
          scatter_table("hamming", ps.distances, ham, theory));
      summary.add_row({num(delta), num(cell.M), num(cell.spread_q95), num(cell.theory_radius),
                       num(cell.fitted_radius), num(cell.min_hamming), num(cell.max_hamming)});
    }
  }
  res.tables.emplace_back("scatter_summary.csv", std::move(summary));
  return res;
}

// ---------------------------------------------------------------------------
// Retrieval

RetrievalDataset make_retrieval_dataset(size_t N, size_t clusters, size_t per_cluster,
                                        double noise, const RandomState& rs) {
  if (N == 0 || clusters < 2 || per_cluster == 0)
    throw InvalidArgument("retrieval dataset needs N > 0, >= 2 clusters and points per cluster");
  if (!(noise > 0.0)) throw InvalidArgument("cluster noise must be positive");
  constexpr size_t kMaxAttempts = 100;
  const double s = 1.0 / std::sqrt(static_cast<double>(N));
  const size_t rows_per = per_cluster + 1;
  for (size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const RandomState r = rs.with_stream(Stream::kDataset).with_substream(static_cast<uint32_t>(attempt));
    RetrievalDataset ds;
    ds.attempts = attempt + 1;
    ds.database = {clusters * per_cluster, N, std::vector<double>(clusters * per_cluster * N)};
    ds.queries = {clusters, N, std::vector<double>(clusters * N)};
    ds.db_labels.resize(clusters * per_cluster);
    ds.query_labels.resize(clusters);
    for (size_t c = 0; c < clusters; ++c) {
      const uint64_t base = c * (rows_per + 1) * N;
      std::vector<double> center(N);
      for (size_t j = 0; j < N; ++j) center[j] = r.normal(base + j) * s;
      for (size_t p = 0; p < rows_per; ++p) {
        double* dst = p < per_cluster ? ds.database.row(c * per_cluster + p) : ds.queries.row(c);
        const uint64_t off = base + (p + 1) * N;
        for (size_t j = 0; j < N; ++j) dst[j] = center[j] + noise * s * r.normal(off + j);
      }
      for (size_t p = 0; p < per_cluster; ++p) ds.db_labels[c * per_cluster + p] = static_cast<int>(c);
      ds.query_labels[c] = static_cast<int>(c);
    }
    bool ok = true;
    for (size_t q = 0; q < clusters && ok; ++q) {
      double far_same = 0.0, near_other = std::numeric_limits<double>::infinity();
      const std::span<const double> qv(ds.queries.row(q), N);
      for (size_t i = 0; i < ds.database.rows; ++i) {
        const double d = signal_distance(ProjectionSpec::gaussian(1.0), qv, {ds.database.row(i), N});
        if (ds.db_labels[i] == ds.query_labels[q])
          far_same = std::max(far_same, d);
        else
          near_other = std::min(near_other, d);
      }
      ok = far_same < near_other;
    }
    if (ok) return ds;
  }
  throw InvalidArgument("degenerate retrieval dataset: clusters overlap beyond the margin after " +
                        std::to_string(kMaxAttempts) + " draws; reduce cluster_noise");
}

int majority_vote(const std::vector<double>& dist, const std::vector<int>& labels, size_t J) {
  if (dist.size() != labels.size() || dist.empty())
    throw InvalidArgument("majority_vote: mismatched or empty inputs");
  if (J == 0) throw InvalidArgument("majority_vote: J must be positive");
  std::vector<size_t> order(dist.size());
  std::iota(order.begin(), order.end(), size_t{0});
  const size_t j = std::min(J, order.size());
  std::partial_sort(order.begin(), order.begin() + j, order.end(), [&](size_t a, size_t b) {
    return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
  });
  std::map<int, std::pair<size_t, size_t>> votes;  // label -> (count, best rank)
  for (size_t r = 0; r < j; ++r) {
    auto [it, fresh] = votes.try_emplace(labels[order[r]], 0, r);
    ++it->second.first;
  }
  int best = -1;
  size_t best_count = 0, best_rank = 0;
  for (const auto& [label, cv] : votes) {
    if (best < 0 || cv.first > best_count || (cv.first == best_count && cv.second < best_rank)) {
      best = label;
      best_count = cv.first;
      best_rank = cv.second;
    }
  }
  return best;
}

double RetrievalResult::accuracy(double delta, size_t M) const {
  for (const auto& c : cells)
    if (c.delta == delta && c.M == M) return c.accuracy;
  throw InvalidArgument("no retrieval cell for the requested (delta, M)");
}

RetrievalResult run_retrieval(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const RandomState rs(cfg.seed);
  RetrievalResult res;
  const double unit = std::sqrt(2.0 / kPi);
  if (cfg.delta_list.empty()) {
    for (double f : {1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0})
      res.deltas.push_back(f * unit);
  } else {
    res.deltas = cfg.delta_list;
  }
  std::sort(res.deltas.begin(), res.deltas.end());
  res.bitrates = cfg.m_list.empty() ? std::vector<size_t>{32, 64, 128} : cfg.m_list;
  std::sort(res.bitrates.begin(), res.bitrates.end());
  const size_t M_max = res.bitrates.back();
  res.chance = 1.0 / static_cast<double>(cfg.clusters);

  std::vector<double> all_deltas = res.deltas;
  all_deltas.push_back(cfg.extreme_delta);
  // hits[di][mi], the last mi slot is unused for exact l2.
  std::vector<std::vector<size_t>> hits(all_deltas.size(), std::vector<size_t>(res.bitrates.size()));
  size_t exact_hits = 0;
  const PeriodicMap map = make_square_wave();
  const ProjectionSpec spec = ProjectionSpec::gaussian(cfg.scale);

  for (size_t t = 0; t < cfg.trials; ++t) {
    const RandomState rt = rs.derive(static_cast<uint32_t>(1000 + t));
    const RetrievalDataset ds = make_retrieval_dataset(cfg.N, cfg.clusters, cfg.points_per_cluster,
                                                       cfg.cluster_noise, rt);
    const size_t nq = ds.queries.rows, nd = ds.database.rows;
    for (size_t q = 0; q < nq; ++q) {
      std::vector<double> dist(nd);
      for (size_t i = 0; i < nd; ++i)
        dist[i] = signal_distance(spec, {ds.queries.row(q), cfg.N}, {ds.database.row(i), cfg.N});
      exact_hits += majority_vote(dist, ds.db_labels, cfg.neighbors) == ds.query_labels[q];
    }
    for (size_t di = 0; di < all_deltas.size(); ++di) {
      // Same base draws for every delta; the first M rows give rate M.
      const EmbeddingOperator op = build_operator(spec, map, M_max, cfg.N, rt, all_deltas[di]);
      Matrix YD, YQ;
      embed_batch_into(op, ds.database, YD);
      embed_batch_into(op, ds.queries, YQ);
      for (size_t mi = 0; mi < res.bitrates.size(); ++mi) {
        const size_t M = res.bitrates[mi];
        for (size_t q = 0; q < nq; ++q) {
          std::vector<double> dist(nd);
          for (size_t i = 0; i < nd; ++i)
            dist[i] = embedding_distance(std::span<const double>(YQ.row(q), M),
                                         std::span<const double>(YD.row(i), M),
                                         DistanceMetric::kHammingMean);
          hits[di][mi] += majority_vote(dist, ds.db_labels, cfg.neighbors) == ds.query_labels[q];
        }
      }
    }
  }

  const double total = static_cast<double>(cfg.trials * cfg.clusters);
  CsvTable table;
  table.header = {"kind", "delta", "delta_over_sqrt_2_over_pi", "M", "accuracy"};
  for (size_t di = 0; di < all_deltas.size(); ++di) {
    const bool extreme = di + 1 == all_deltas.size();
    for (size_t mi = 0; mi < res.bitrates.size(); ++mi) {
      RetrievalCell c{all_deltas[di], res.bitrates[mi], hits[di][mi] / total,
                      extreme ? "extreme" : "sweep"};
      res.cells.push_back(c);
      table.add_row({c.kind, num(c.delta), num(c.delta / unit), num(c.M), num(c.accuracy)});
    }
  }
  RetrievalCell exact{0.0, 0, exact_hits / total, "exact_l2"};
  res.cells.push_back(exact);
  table.add_row({exact.kind, "", "", "", num(exact.accuracy)});
  res.tables.emplace_back("retrieval.csv", std::move(table));
  return res;
}

// ---------------------------------------------------------------------------
// Bounds sweep

BoundsResult run_bounds_sweep(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const RandomState rs(cfg.seed);
  BoundsResult res;
  const std::vector<size_t> ms =
      cfg.m_list.empty() ? std::vector<size_t>{100, 1000, 10000} : cfg.m_list;

  CsvTable pc;
  pc.header = {"flavor", "Q", "M", "eps", "hbar", "probability", "exponent", "vacuous"};
  for (auto f : {PointCloudFlavor::kSqL2, PointCloudFlavor::kSqrtLoose, PointCloudFlavor::kSqrtTight,
                 PointCloudFlavor::kKernel, PointCloudFlavor::kNorm})
    for (double Q : cfg.q_list)
      for (size_t M : ms)
        for (double eps : cfg.eps_list) {
          if (f == PointCloudFlavor::kSqrtTight && eps > 1.0) continue;
          const BoundReport r = pointcloud_bound(Q, static_cast<double>(M), eps, cfg.hbar, f);
          pc.add_row({point_cloud_flavor_name(f), num(Q), num(M), num(eps), num(cfg.hbar),
                      num(r.probability), num(r.exponent), r.vacuous ? "1" : "0"});
        }
  res.tables.emplace_back("bounds_pointcloud.csv", std::move(pc));

  // Extension theorems with w = 2 eps^2 and a single two-part partition.
  CsvTable ext;
  ext.header = {"calculator", "M", "eps", "w", "c1", "probability", "exponent", "vacuous", "decays"};
  const std::vector<double> p2 = {1.0};
  for (size_t M : ms)
    for (double eps : cfg.eps_list) {
      const double w = 2.0 * eps * eps;
      const BoundReport c = continuous_extension_bound(10.0, static_cast<double>(M), w, 1.0, 0.0,
                                                       1.0, 1.0, 0.4);
      ext.add_row({"continuous", num(M), num(eps), num(w), "", num(c.probability),
                   num(c.exponent), c.vacuous ? "1" : "0", c.decays ? "1" : "0"});
      const BoundReport d = discontinuous_extension_bound(10.0, static_cast<double>(M), w, 1.0, p2,
                                                          2, 0.0, cfg.c0);
      ext.add_row({"discontinuous", num(M), num(eps), num(w), num(d.param("c1")),
                   num(d.probability), num(d.exponent), d.vacuous ? "1" : "0",
                   d.decays ? "1" : "0"});
    }
  res.tables.emplace_back("bounds_extension.csv", std::move(ext));

  // Decay onset: the exponent of the leading term falls with M iff eps is past
  // the threshold. Scanned on a 1e-5 grid.
  res.threshold_exact = decay_threshold_eps(p2, cfg.c0);
  res.threshold_eps = std::numeric_limits<double>::quiet_NaN();
  for (long i = 0; i <= 100000; ++i) {
    const double eps = 0.1 + i * 1e-5;
    const double w = 2.0 * eps * eps;
    const double e1 = discontinuous_extension_bound(0.0, 1000.0, w, 1.0, p2, 2, 0.0, cfg.c0).exponent;
    const double e2 = discontinuous_extension_bound(0.0, 2000.0, w, 1.0, p2, 2, 0.0, cfg.c0).exponent;
    if (e2 < e1) {
      res.threshold_eps = eps;
      break;
    }
  }
  CsvTable th;
  th.header = {"c0", "threshold_scan", "threshold_exact", "sqrt_half_ln2"};
  th.add_row({num(cfg.c0), num(res.threshold_eps), num(res.threshold_exact),
              num(std::sqrt(0.5 * std::log(2.0)))});
  res.tables.emplace_back("bounds_threshold.csv", std::move(th));

  // Appendix-style crossing probability: bound, Monte Carlo, region.
  CsvTable p2t;
  p2t.header = {"N", "r_ratio", "r", "sigma", "Delta", "bound", "mc_mean", "mc_std_error",
                "mc_within_3se", "bound_below_one", "meaningful_region"};
  const double sigma = cfg.scale, Delta = cfg.delta;
  uint32_t cell = 0;
  for (double N : cfg.n_list)
    for (double ratio : cfg.r_ratio_list) {
      const double r = ratio * Delta / (sigma * std::sqrt(N + 1.0));
      const BoundReport b = p2_bound(N, sigma, r, Delta);
      const MonteCarloEstimate mc = p2_monte_carlo(static_cast<int>(N), sigma, r, Delta,
                                                   cfg.mc_trials, rs.derive(500 + cell++));
      const bool ok = mc.mean <= b.raw + 3.0 * mc.std_error;
      const bool below_one = b.raw < 1.0;
      const bool region = p2_meaningful(N, sigma, r, Delta);
      ++res.p2_cells;
      res.p2_mc_ok += ok;
      res.p2_region_match += below_one == region;
      p2t.add_row({num(N), num(ratio), num(r), num(sigma), num(Delta), num(b.raw), num(mc.mean),
                   num(mc.std_error), ok ? "1" : "0", below_one ? "1" : "0", region ? "1" : "0"});
    }
  res.tables.emplace_back("bounds_p2.csv", std::move(p2t));
  return res;
}

// ---------------------------------------------------------------------------
// Map evaluation

MapEvalResult run_map_eval(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const PeriodicMap map = config_map(cfg, make_square_wave());
  const ProjectionSpec spec = spec_at(cfg, cfg.scale);
  const DistanceMapModel model(map, spec.rescaled(effective_scale_factor(map, cfg.delta)));
  const bool binary = map.kind() == MapKind::kSquare && spec.family == Family::kGaussian;
  CsvTable t;
  t.header = {"d", "g", "g_sqrt", "K"};
  if (binary) t.header.insert(t.header.end(), {"lower5", "upper6", "upper7"});
  for (size_t i = 0; i < cfg.points; ++i) {
    const double d = cfg.d_max * static_cast<double>(i) / (cfg.points - 1);
    std::vector<std::string> row = {num(d), num(model.g(d).value), num(model.g_sqrt(d).value),
                                    num(model.kernel(d).value)};
    if (binary) {
      const BinaryMapBounds b = universal_binary_bounds(d, spec.scale, cfg.delta);
      row.insert(row.end(), {num(b.lower), num(b.upper_exp), num(b.upper_lin)});
    }
    t.add_row(std::move(row));
  }
  MapEvalResult res;
  res.tables.emplace_back("map_eval.csv", std::move(t));
  return res;
}

NamedTables run_experiment(const ExperimentConfig& cfg) {
  if (!cfg.kind) throw ConfigError("config does not name an experiment");
  switch (*cfg.kind) {
    case ExperimentKind::kDesignSim: return run_design_sim(cfg).tables;
    case ExperimentKind::kQuantizationSim: return run_quantization_sim(cfg).tables;
    case ExperimentKind::kUniversalScatter: return run_universal_scatter(cfg).tables;
    case ExperimentKind::kRetrieval: return run_retrieval(cfg).tables;
    case ExperimentKind::kBoundsSweep: return run_bounds_sweep(cfg).tables;
    case ExperimentKind::kMapEval: return run_map_eval(cfg).tables;
  }
  throw ConfigError("unknown experiment kind");
}

}  // namespace uembed
