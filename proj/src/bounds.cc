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

#include "uembed/bounds.h"

#include <algorithm>
#include <cmath>

#include "uembed/error.h"
#include "uembed/parallel.h"

namespace uembed {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw InvalidArgument(std::string(what) + " must be positive and finite");
}

void finish(BoundReport& r, double raw) {
  r.raw = raw;
  r.vacuous = !(raw < 1.0);
  r.probability = std::clamp(raw, 0.0, 1.0);
  if (std::isnan(raw)) r.probability = 1.0;
}

}  // namespace

double BoundReport::param(const std::string& name) const {
  for (const auto& [k, v] : params)
    if (k == name) return v;
  throw InvalidArgument("bound report has no parameter '" + name + "'");
}

PointCloudFlavor parse_point_cloud_flavor(const std::string& name) {
  if (name == "sq_l2") return PointCloudFlavor::kSqL2;
  if (name == "sqrt_loose") return PointCloudFlavor::kSqrtLoose;
  if (name == "sqrt_tight") return PointCloudFlavor::kSqrtTight;
  if (name == "kernel") return PointCloudFlavor::kKernel;
  if (name == "norm") return PointCloudFlavor::kNorm;
  throw InvalidArgument("unknown point-cloud flavor '" + name + "'");
}

std::string point_cloud_flavor_name(PointCloudFlavor f) {
  switch (f) {
    case PointCloudFlavor::kSqL2: return "sq_l2";
    case PointCloudFlavor::kSqrtLoose: return "sqrt_loose";
    case PointCloudFlavor::kSqrtTight: return "sqrt_tight";
    case PointCloudFlavor::kKernel: return "kernel";
    case PointCloudFlavor::kNorm: return "norm";
  }
  return "?";
}

BoundReport pointcloud_bound(double Q, double M, double eps, double hbar, PointCloudFlavor f) {
  if (!(Q >= 2.0) || !std::isfinite(Q)) throw InvalidArgument("Q must be at least 2");
  if (!(M >= 1.0) || !std::isfinite(M)) throw InvalidArgument("M must be at least 1");
  require_positive(eps, "eps");
  require_positive(hbar, "hbar");
  if (f == PointCloudFlavor::kSqrtTight && eps > 1.0)
    throw InvalidArgument("sqrt_tight requires eps <= 1");
  const double h4 = std::pow(hbar, 4);
  const double lq = std::log(Q);
  double rate = 0.0;
  double prefactor = 1.0;
  double log_count = 2.0 * lq;
  switch (f) {
    case PointCloudFlavor::kSqL2:
    case PointCloudFlavor::kSqrtTight:
      rate = 2.0 * eps * eps / h4;
      break;
    case PointCloudFlavor::kSqrtLoose:
      rate = 2.0 * std::pow(eps / hbar, 4);
      break;
    case PointCloudFlavor::kKernel:
      rate = (8.0 / 9.0) * eps * eps / h4;
      break;
    case PointCloudFlavor::kNorm:
      rate = 2.0 * eps * eps / h4;
      log_count = lq;
      prefactor = 2.0;
      break;
  }
  BoundReport r;
  r.exponent = log_count - M * rate;
  r.decays = rate > 0.0;
  r.params = {{"Q", Q}, {"M", M}, {"eps", eps}, {"hbar", hbar}, {"w", rate}};
  finish(r, prefactor * std::exp(r.exponent));
  return r;
}

double hoeffding_pair_bound(double M, double eps, double hbar) {
  require_positive(M, "M");
  require_positive(eps, "eps");
  require_positive(hbar, "hbar");
  return std::min(1.0, 2.0 * std::exp(-2.0 * M * eps * eps / std::pow(hbar, 4)));
}

BoundReport continuous_extension_bound(double E_r, double M, double w, double c, double delta,
                                       double K_f, double K_g, double alpha) {
  if (!(E_r >= 0.0)) throw InvalidArgument("covering entropy must be nonnegative");
  require_positive(M, "M");
  require_positive(w, "w");
  require_positive(c, "c");
  if (!(delta >= 0.0)) throw InvalidArgument("delta must be nonnegative");
  require_positive(alpha, "alpha");
  if (!(K_f >= 0.0) || !(K_g >= 0.0)) throw InvalidArgument("Lipschitz constants must be nonnegative");
  const double denom = (1.0 + delta) * 2.0 * K_g + 2.0 * K_f;
  if (!(denom > 0.0)) throw InvalidArgument("zero Lipschitz denominator");
  BoundReport rep;
  const double r = alpha / denom;
  rep.exponent = 2.0 * E_r - M * w;
  rep.decays = true;
  rep.params = {{"r", r}, {"E_r", E_r}, {"M", M}, {"w", w}, {"c", c}, {"alpha", alpha}};
  finish(rep, c * std::exp(rep.exponent));
  return rep;
}

BoundReport discontinuous_extension_bound(double E_r_half, double M, double w, double c,
                                          const std::vector<double>& p_t, int T_max, double P_F,
                                          double c0) {
  if (T_max < 2) throw InvalidArgument("T_max must be at least 2");
  if (p_t.size() != static_cast<size_t>(T_max - 1))
    throw InvalidArgument("P_T list must have T_max - 1 entries (T = 2..T_max)");
  for (double p : p_t)
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("P_T entries must lie in [0, 1]");
  if (!(P_F >= 0.0 && P_F <= 1.0)) throw InvalidArgument("P_F must lie in [0, 1]");
  if (!(E_r_half >= 0.0)) throw InvalidArgument("covering entropy must be nonnegative");
  require_positive(M, "M");
  require_positive(w, "w");
  require_positive(c, "c");
  require_positive(c0, "c0");
  double c1 = 0.0;
  for (size_t i = 0; i < p_t.size(); ++i) c1 += p_t[i] * (1.0 + c0) * std::log(i + 2.0);
  BoundReport rep;
  rep.exponent = 2.0 * E_r_half + c1 * M - M * w;
  rep.decays = c1 < w;
  const double t2 = T_max * std::exp(-2.0 * c0 * c0 * M);
  rep.params = {{"c1", c1}, {"E_r_half", E_r_half}, {"M", M}, {"w", w},
                {"c", c}, {"c0", c0}, {"T_max", static_cast<double>(T_max)},
                {"P_F", P_F}, {"partition_term", t2}};
  finish(rep, c * std::exp(rep.exponent) + t2 + P_F);
  return rep;
}

double decay_threshold_eps(const std::vector<double>& p_t, double c0) {
  double c1 = 0.0;
  for (size_t i = 0; i < p_t.size(); ++i) c1 += p_t[i] * (1.0 + c0) * std::log(i + 2.0);
  return std::sqrt(0.5 * c1);
}

double quantized_bound_inflation(double eps, double E_Q) {
  if (!(E_Q >= 0.0)) throw InvalidArgument("E_Q must be nonnegative");
  return eps + 2.0 * E_Q;
}

double rate_form(double eps, double R, double M, double S) {
  require_positive(M, "M");
  require_positive(S, "S");
  if (!(R >= M)) throw InvalidArgument("rate R must be at least M");
  return eps + std::exp2(1.0 - R / M) * std::sqrt(M) * S;
}

BoundReport p2_bound(double N, double sigma, double r, double Delta) {
  require_positive(N, "N");
  require_positive(sigma, "sigma");
  require_positive(r, "r");
  require_positive(Delta, "Delta");
  const double first = sigma * r * std::sqrt(N + 1.0) / Delta;
  const double beta = Delta / (sigma * r * std::sqrt(N)) - 1.0;
  const double second = beta > 0.0 ? std::exp(-beta * beta * N / 6.0) : 1.0;
  BoundReport rep;
  rep.exponent = beta > 0.0 ? -beta * beta * N / 6.0 : 0.0;
  rep.decays = beta > 0.0;
  rep.params = {{"N", N}, {"sigma", sigma}, {"r", r}, {"Delta", Delta},
                {"linear_term", first}, {"tail_term", second}, {"beta", beta}};
  finish(rep, first + second);
  return rep;
}

bool p2_meaningful(double N, double sigma, double r, double Delta) {
  return r < Delta / (sigma * std::sqrt(N + 1.0));
}

MonteCarloEstimate p2_monte_carlo(int N, double sigma, double r, double Delta, size_t trials,
                                  const RandomState& rs) {
  if (N < 1) throw InvalidArgument("N must be positive");
  require_positive(sigma, "sigma");
  require_positive(r, "r");
  require_positive(Delta, "Delta");
  if (trials == 0) throw InvalidArgument("trials must be positive");
  const RandomState normals = rs.with_stream(Stream::kMonteCarlo).with_substream(1);
  const RandomState offsets = rs.with_stream(Stream::kMonteCarlo).with_substream(2);
  std::vector<unsigned char> hit(trials, 0);
  parallel_ranges(trials, 1024, [&](size_t b, size_t e) {
    for (size_t t = b; t < e; ++t) {
      double ss = 0.0;
      for (int j = 0; j < N; ++j) {
        double z = sigma * normals.normal(static_cast<uint64_t>(t) * N + j);
        ss += z * z;
      }
      const double len = std::sqrt(ss) * r;
      const double u = Delta * offsets.uniform(t);
      hit[t] = u + len >= Delta;
    }
  });
  size_t hits = 0;
  for (auto h : hit) hits += h;
  MonteCarloEstimate est;
  est.trials = trials;
  est.mean = static_cast<double>(hits) / trials;
  est.std_error = std::sqrt(est.mean * (1.0 - est.mean) / trials);
  return est;
}

}  // namespace uembed
