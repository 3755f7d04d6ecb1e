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

// Distance and kernel maps of y = h(A x + w).
//
// With one-sided powers P_k of h and xi_k = 2 pi k,
//   g(d) = 2 sum_{k>=1} P_k (1 - phi(xi_k | d))     mean squared distance
//   K(d) = P_0 + sum_{k>=1} P_k phi(xi_k | d)       mean inner product
// so K(d) + g(d)/2 equals the total power of h.

#ifndef UEMBED_THEORY_H_
#define UEMBED_THEORY_H_

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "uembed/maps.h"
#include "uembed/projection.h"

namespace uembed {

inline constexpr double kSaturationFraction = 0.95;
inline constexpr double kDefaultSeriesTol = 1e-10;
inline constexpr double kDefaultSpectrumTol = 1e-5;

// A nondecreasing distance curve d -> g(d) on d >= 0.
class DistanceCurve {
 public:
  virtual ~DistanceCurve() = default;
  virtual double value(double d) const = 0;
  // Derivative in d. The default is a central difference.
  virtual double slope(double d) const;
  // lim g(d) as d grows; +inf for unbounded curves.
  virtual double asymptote() const = 0;
  // Smallest d with g(d) >= 0.95 g_inf; +inf for unbounded curves.
  virtual double saturation_radius() const;
  // Value treated as saturated by inversion, g(D0).
  virtual double saturation_level() const;
};

// g(d) = c d.
class LinearCurve final : public DistanceCurve {
 public:
  explicit LinearCurve(double c = 1.0) : c_(c) {}
  double value(double d) const override { return c_ * d; }
  double slope(double) const override { return c_; }
  double asymptote() const override { return std::numeric_limits<double>::infinity(); }
  double saturation_radius() const override { return std::numeric_limits<double>::infinity(); }
  double saturation_level() const override { return std::numeric_limits<double>::infinity(); }

 private:
  double c_;
};

enum class MapFlavor { kSqL2, kSqrt, kKernel };

struct SeriesValue {
  double value = 0.0;
  double error_bound = 0.0;  // certified truncation error
};

// Series evaluator for a (map, spec) pair. The spec is the distribution of
// A itself, i.e. after any quantizer-step scaling.
class DistanceMapModel final : public DistanceCurve {
 public:
  // Closed-form spectra are summed lazily to series_tol. Other maps use
  // power_coeffs(spectrum_tol), which may throw ToleranceUnreachable.
  DistanceMapModel(PeriodicMap map, ProjectionSpec spec, MapFlavor flavor = MapFlavor::kSqL2,
                   double series_tol = kDefaultSeriesTol,
                   double spectrum_tol = kDefaultSpectrumTol);

  const PeriodicMap& map() const { return map_; }
  const ProjectionSpec& spec() const { return spec_; }
  MapFlavor flavor() const { return flavor_; }
  DistanceMapModel with_flavor(MapFlavor f) const;

  // Flavored value: g, sqrt(g) or K.
  double value(double d) const override;
  double slope(double d) const override;
  double asymptote() const override;
  double saturation_radius() const override;
  double saturation_level() const override;

  SeriesValue g(double d) const;
  SeriesValue g_sqrt(double d) const;
  SeriesValue kernel(double d) const;
  // g'(d) for d > 0.
  double g_slope(double d) const;

  // 2 sum_{k>=1} P_k.
  double g_inf() const { return 2.0 * ac_power_; }
  double total_power() const { return dc_power_ + ac_power_; }
  double dc_power() const { return dc_power_; }
  // Largest certified error of the spectrum itself (zero for closed forms).
  double spectrum_tail() const { return spectrum_ ? spectrum_->tail_bound : 0.0; }

 private:
  // S(d) = sum_{k>=1} P_k phi(2 pi k | d).
  SeriesValue phi_sum(double d) const;

  PeriodicMap map_;
  ProjectionSpec spec_;
  MapFlavor flavor_;
  double series_tol_;
  std::optional<PowerSpectrum> spectrum_;
  double listed_ac_ = 0.0;
  double ac_power_ = 0.0;
  double dc_power_ = 0.0;
  double d0_ = 0.0;
};

double distance_map(const PeriodicMap& map, const ProjectionSpec& spec, double d);
double kernel_map(const PeriodicMap& map, const ProjectionSpec& spec, double d);

// Binary universal quantizer with step Delta and gaussian sigma:
//   g(d) = 1/2 - sum_{i>=0} exp(-((2i+1) pi sigma d / (sqrt2 Delta))^2) / (pi (i+1/2))^2.
double universal_binary_map(double d, double sigma, double delta);

struct BinaryMapBounds {
  double lower = 0.0;      // 1/2 - 1/2 exp(-(pi sigma d / sqrt2 Delta)^2)
  double upper_exp = 0.0;  // 1/2 - 4/pi^2 exp(-(pi sigma d / sqrt2 Delta)^2)
  double upper_lin = 0.0;  // sqrt(2/pi) sigma d / Delta
};
BinaryMapBounds universal_binary_bounds(double d, double sigma, double delta);

// Cauchy projections, d the l1 distance:
//   g(d) = 1/2 - sum_{i>=0} exp(-(2i+1) pi gamma d / Delta) / (pi (i+1/2))^2.
double universal_binary_map_l1(double d, double gamma, double delta);

// Unquantized sawtooth curve at scale 2^B Delta:
//   g(d) = 1/3 - 2 sum_{k>0} phi(2 pi k | d) / (pi k)^2, A scaled by 1/(2^B Delta).
double multibit_map(double d, const ProjectionSpec& spec, int bits, double delta);

// Closed forms as curves, for inversion and saturation radii.
class UniversalBinaryCurve final : public DistanceCurve {
 public:
  UniversalBinaryCurve(Family family, double scale, double delta);
  double value(double d) const override;
  double asymptote() const override { return 0.5; }

 private:
  Family family_;
  double scale_, delta_;
};

class MultibitCurve final : public DistanceCurve {
 public:
  MultibitCurve(ProjectionSpec spec, int bits, double delta);
  double value(double d) const override { return multibit_map(d, spec_, bits_, delta_); }
  double asymptote() const override { return 1.0 / 3.0; }

 private:
  ProjectionSpec spec_;
  int bits_;
  double delta_;
};

enum class InversionStatus { kUnique, kSaturated, kBelowRange };

struct Inversion {
  double d = 0.0;
  InversionStatus status = InversionStatus::kUnique;
};

// Bisection for g(d) = gval on [0, D0]. Saturated values return D0 as a
// lower bound; negative values return 0. Throws NonMonotoneModel when the
// curve decreases on a check grid over [0, D0].
Inversion invert_map(const DistanceCurve& g, double gval);

// (eps + delta d_W) / g'(g^{-1}(d_W)); +inf when d_W is saturated.
double ambiguity(const DistanceCurve& g, double d_w, double eps, double delta);

struct SubadditivityReport {
  double worst = -std::numeric_limits<double>::infinity();
  double a = 0.0;
  double b = 0.0;
  bool pass = true;
};

inline constexpr double kSubadditivitySlack = 1e-9;

// max over pairs of (1 - 2 eps) g(a + b) - 3 delta - g(a) - g(b).
SubadditivityReport check_subadditivity(const std::function<double(double)>& g, double eps,
                                        double delta, const std::vector<double>& grid);

}  // namespace uembed

#endif  // UEMBED_THEORY_H_
