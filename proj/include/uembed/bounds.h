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

// Failure-probability calculators for randomized embeddings. Probabilities
// are clamped to [0, 1]; a bound that would exceed 1 is returned as 1 with
// the vacuous flag set.

#ifndef UEMBED_BOUNDS_H_
#define UEMBED_BOUNDS_H_

#include <string>
#include <utility>
#include <vector>

#include "uembed/random.h"

namespace uembed {

struct BoundReport {
  double probability = 1.0;   // clamped failure bound
  double raw = 1.0;           // unclamped value
  double exponent = 0.0;      // log of the leading exponential term
  bool vacuous = true;        // raw >= 1
  bool decays = false;        // leading term decreases with M
  std::vector<std::pair<std::string, double>> params;  // echoed inputs and derived constants

  double param(const std::string& name) const;
};

enum class PointCloudFlavor { kSqL2, kSqrtLoose, kSqrtTight, kKernel, kNorm };

PointCloudFlavor parse_point_cloud_flavor(const std::string& name);
std::string point_cloud_flavor_name(PointCloudFlavor f);

// Finite point clouds of Q signals with M measurements and map range hbar.
//   sq_l2, sqrt_tight: exp(2 ln Q - 2 M eps^2 / hbar^4)   (sqrt_tight needs eps <= 1)
//   sqrt_loose:        exp(2 ln Q - 2 M (eps / hbar)^4)
//   kernel:            exp(2 ln Q - (8/9) M eps^2 / hbar^4)
//   norm:              2 exp(ln Q - 2 M eps^2 / hbar^4)
BoundReport pointcloud_bound(double Q, double M, double eps, double hbar, PointCloudFlavor f);

// Per-pair two-sided Hoeffding bound 2 exp(-2 M eps^2 / hbar^4) on the mean of
// M i.i.d. terms with range hbar^2.
double hoeffding_pair_bound(double M, double eps, double hbar);

// Infinite sets with r-covering entropy E_r and Lipschitz constants K_f, K_g:
//   r = alpha / ((1 + delta) 2 K_g + 2 K_f), failure c exp(2 E_r - M w).
// The guarantee's additive constant becomes eps + alpha.
BoundReport continuous_extension_bound(double E_r, double M, double w, double c, double delta,
                                       double K_f, double K_g, double alpha);

// T-part Lipschitz embeddings. p_t[i] is P_T for T = i + 2, so the list has
// T_max - 1 entries.
//   c1 = sum_T P_T (1 + c0) ln T
//   failure c exp(2 E_{r/2} + c1 M - M w) + T_max exp(-2 c0^2 M) + P_F
BoundReport discontinuous_extension_bound(double E_r_half, double M, double w, double c,
                                          const std::vector<double>& p_t, int T_max, double P_F,
                                          double c0);

// Smallest eps with 2 eps^2 > c1 for the given P_T list, i.e. the onset of
// decay in M for w(eps) = 2 eps^2.
double decay_threshold_eps(const std::vector<double>& p_t, double c0);

// eps + 2 E_Q.
double quantized_bound_inflation(double eps, double E_Q);
// eps + 2^(1 - R/M) sqrt(M) S. Requires R >= M.
double rate_form(double eps, double R, double M, double S);

// P2 <= sigma r sqrt(N+1) / Delta + exp(-beta^2 N / 6), beta = Delta / (sigma r sqrt N) - 1.
// The second term is taken as 1 when beta <= 0.
BoundReport p2_bound(double N, double sigma, double r, double Delta);

// True when r < Delta / (sigma sqrt(N + 1)).
bool p2_meaningful(double N, double sigma, double r, double Delta);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  size_t trials = 0;
};

// Probability that a ball of radius r/2 projected on a ~ N(0, sigma^2 I_N)
// straddles a point of the grid Delta Z, with a uniform grid offset.
MonteCarloEstimate p2_monte_carlo(int N, double sigma, double r, double Delta, size_t trials,
                                  const RandomState& rs);

}  // namespace uembed

#endif  // UEMBED_BOUNDS_H_
