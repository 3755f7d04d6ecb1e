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

#include "uembed/theory.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "uembed/error.h"

namespace uembed {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
// Closed-form series stop once the remaining terms are below this.
constexpr double kClosedFormTol = 1e-18;
constexpr int kClosedFormMaxTerms = 1 << 26;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw InvalidArgument(std::string(what) + " must be positive and finite");
}

void require_distance(double d) {
  if (!(d >= 0.0) || !std::isfinite(d))
    throw InvalidArgument("distance must be finite and nonnegative");
}

// Smallest d with f(d) >= target for nondecreasing f, starting from unit.
double first_crossing(const std::function<double(double)>& f, double target, double unit) {
  double hi = unit;
  int guard = 0;
  while (f(hi) < target) {
    hi *= 2.0;
    if (++guard > 2000) throw NonMonotoneModel("curve never reaches its saturation level");
  }
  double lo = 0.0;
  while (true) {
    double m = 0.5 * (lo + hi);
    if (m <= lo || m >= hi) break;
    if (f(m) >= target) hi = m; else lo = m;
  }
  return hi;
}

}  // namespace

double DistanceCurve::slope(double d) const {
  double h = 1e-6 * std::max(1e-3, std::abs(d));
  if (d - h < 0.0) return (value(d + h) - value(d)) / h;
  return (value(d + h) - value(d - h)) / (2.0 * h);
}

double DistanceCurve::saturation_radius() const {
  const double a = asymptote();
  if (!std::isfinite(a)) return kInf;
  return first_crossing([this](double d) { return value(d); }, kSaturationFraction * a, 1.0);
}

double DistanceCurve::saturation_level() const {
  const double a = asymptote();
  return std::isfinite(a) ? kSaturationFraction * a : kInf;
}

DistanceMapModel::DistanceMapModel(PeriodicMap map, ProjectionSpec spec, MapFlavor flavor,
                                   double series_tol, double spectrum_tol)
    : map_(std::move(map)), spec_(spec), flavor_(flavor), series_tol_(series_tol) {
  require_positive(series_tol, "series tolerance");
  require_positive(spec.scale, "projection scale");
  dc_power_ = map_.dc_power();
  ac_power_ = map_.mean_square() - dc_power_;
  if (!map_.has_analytic_spectrum()) {
    spectrum_ = map_.power_coeffs(spectrum_tol);
    for (const auto& line : spectrum_->coeffs)
      if (line.k > 0) listed_ac_ += line.power;
  }
  if (ac_power_ > 0.0)
    d0_ = first_crossing([this](double d) { return g(d).value; }, kSaturationFraction * g_inf(),
                         1.0 / spec_.scale);
}

DistanceMapModel DistanceMapModel::with_flavor(MapFlavor f) const {
  DistanceMapModel m = *this;
  m.flavor_ = f;
  return m;
}

SeriesValue DistanceMapModel::phi_sum(double d) const {
  require_distance(d);
  if (d == 0.0) return {ac_power_, 0.0};
  const double c = spec_.scale * d * 2.0 * kPi;
  const bool gauss = spec_.family == Family::kGaussian;
  auto phi = [&](double k) {
    double z = c * k;
    return gauss ? std::exp(-0.5 * z * z) : std::exp(-z);
  };
  // g = 2 (P - S), so S is summed to half the tolerance.
  const double tol = 0.5 * series_tol_;
  SeriesValue out;
  if (spectrum_) {
    // phi decreases in k, so the unsummed lines and the tail weigh at most
    // phi(k) times their power.
    double s = 0.0, remaining = listed_ac_;
    for (const auto& line : spectrum_->coeffs) {
      if (line.k == 0) continue;
      const double f = phi(line.k);
      const double rest = f * (std::max(0.0, remaining) + spectrum_->tail_bound);
      if (rest <= tol) {
        out.value = s;
        out.error_bound = rest;
        return out;
      }
      s += line.power * f;
      remaining -= line.power;
    }
    out.value = s;
    out.error_bound = phi(spectrum_->kmax() + 1.0) * spectrum_->tail_bound;
    return out;
  }
  double s = 0.0;
  int k = 1;
  for (;; ++k) {
    s += map_.coefficient_power(k) * phi(k);
    const double next = phi(k + 1.0);
    if (next * ac_power_ <= tol) {
      out.error_bound = next * map_.tail_power(k);
      break;
    }
    if (next < 1e-3 || k % 64 == 0) {
      const double tail = map_.tail_power(k);
      if (next * tail <= tol) {
        out.error_bound = next * tail;
        break;
      }
    }
    if (k >= kAnalyticCoefficientCap) {
      out.error_bound = next * map_.tail_power(k);
      break;
    }
  }
  out.value = s;
  return out;
}

SeriesValue DistanceMapModel::g(double d) const {
  SeriesValue s = phi_sum(d);
  if (d == 0.0) return {0.0, 0.0};
  double v = 2.0 * (ac_power_ - s.value);
  return {std::clamp(v, 0.0, g_inf()), 2.0 * s.error_bound};
}

SeriesValue DistanceMapModel::g_sqrt(double d) const {
  SeriesValue v = g(d);
  double r = std::sqrt(v.value);
  // sqrt is 1/2-Holder: |sqrt(a) - sqrt(b)| <= sqrt(|a - b|).
  return {r, std::sqrt(v.error_bound)};
}

SeriesValue DistanceMapModel::kernel(double d) const {
  SeriesValue s = phi_sum(d);
  return {dc_power_ + s.value, s.error_bound};
}

double DistanceMapModel::g_slope(double d) const {
  require_distance(d);
  if (d == 0.0) {
    // One-sided difference quotient; the term-wise series degenerates at 0.
    const double h = 1e-7 / spec_.scale;
    return g(h).value / h;
  }
  const double s = spec_.scale;
  const bool gauss = spec_.family == Family::kGaussian;
  // Weight of P_k in g'(d) / 2.
  auto weight = [&](double k) {
    double xi = 2.0 * kPi * k;
    double z = s * d * xi;
    return gauss ? s * s * xi * xi * d * std::exp(-0.5 * z * z) : s * xi * std::exp(-z);
  };
  double sum = 0.0;
  if (spectrum_) {
    for (const auto& line : spectrum_->coeffs)
      if (line.k > 0) sum += line.power * weight(line.k);
    return 2.0 * sum;
  }
  // The weight peaks near k* and decreases afterwards.
  const double kpeak = gauss ? std::sqrt(2.0) / (2.0 * kPi * s * d) : 1.0 / (2.0 * kPi * s * d);
  for (int k = 1; k <= kAnalyticCoefficientCap; ++k) {
    sum += map_.coefficient_power(k) * weight(k);
    if (k > kpeak) {
      const double next = weight(k + 1.0);
      if (next * ac_power_ <= series_tol_) break;
      if (next * map_.tail_power(k) <= series_tol_) break;
    }
  }
  return 2.0 * sum;
}

double DistanceMapModel::value(double d) const {
  switch (flavor_) {
    case MapFlavor::kSqL2: return g(d).value;
    case MapFlavor::kSqrt: return g_sqrt(d).value;
    case MapFlavor::kKernel: return kernel(d).value;
  }
  return 0.0;
}

double DistanceMapModel::slope(double d) const {
  double gs = g_slope(d);
  switch (flavor_) {
    case MapFlavor::kSqL2: return gs;
    case MapFlavor::kSqrt: {
      double gv = g(d).value;
      if (gv <= 0.0) return kInf;
      return gs / (2.0 * std::sqrt(gv));
    }
    case MapFlavor::kKernel: return -0.5 * gs;
  }
  return 0.0;
}

double DistanceMapModel::asymptote() const {
  switch (flavor_) {
    case MapFlavor::kSqL2: return g_inf();
    case MapFlavor::kSqrt: return std::sqrt(g_inf());
    case MapFlavor::kKernel: return dc_power_;
  }
  return 0.0;
}

double DistanceMapModel::saturation_radius() const {
  if (!(ac_power_ > 0.0)) throw NonMonotoneModel("constant map has no saturation radius");
  return d0_;
}

double DistanceMapModel::saturation_level() const {
  const double level = kSaturationFraction * g_inf();
  switch (flavor_) {
    case MapFlavor::kSqL2: return level;
    case MapFlavor::kSqrt: return std::sqrt(level);
    case MapFlavor::kKernel: return dc_power_ + 0.5 * (g_inf() - level);
  }
  return level;
}

double distance_map(const PeriodicMap& map, const ProjectionSpec& spec, double d) {
  return DistanceMapModel(map, spec).g(d).value;
}

double kernel_map(const PeriodicMap& map, const ProjectionSpec& spec, double d) {
  return DistanceMapModel(map, spec, MapFlavor::kKernel).kernel(d).value;
}

double universal_binary_map(double d, double sigma, double delta) {
  require_positive(sigma, "sigma");
  require_positive(delta, "Delta");
  require_distance(d);
  if (d == 0.0) return 0.0;
  const double x = kPi * sigma * d / (std::sqrt(2.0) * delta);
  double s = 0.0;
  for (int i = 0; i < kClosedFormMaxTerms; ++i) {
    const double m = 2.0 * i + 1.0;
    const double h = i + 0.5;
    s += std::exp(-(m * x) * (m * x)) / (kPi * kPi * h * h);
    const double next = std::exp(-((m + 2.0) * x) * ((m + 2.0) * x));
    // The remaining weights sum to at most 1/(pi^2 (i + 1)).
    if (next / (kPi * kPi * (i + 1.0)) <= kClosedFormTol) break;
  }
  return std::max(0.0, 0.5 - s);
}

BinaryMapBounds universal_binary_bounds(double d, double sigma, double delta) {
  require_positive(sigma, "sigma");
  require_positive(delta, "Delta");
  require_distance(d);
  const double x = kPi * sigma * d / (std::sqrt(2.0) * delta);
  const double e = std::exp(-x * x);
  BinaryMapBounds b;
  b.lower = 0.5 - 0.5 * e;
  b.upper_exp = 0.5 - 4.0 / (kPi * kPi) * e;
  b.upper_lin = std::sqrt(2.0 / kPi) * sigma * d / delta;
  return b;
}

double universal_binary_map_l1(double d, double gamma, double delta) {
  require_positive(gamma, "gamma");
  require_positive(delta, "Delta");
  require_distance(d);
  if (d == 0.0) return 0.0;
  const double y = kPi * gamma * d / delta;
  double s = 0.0;
  for (int i = 0; i < kClosedFormMaxTerms; ++i) {
    const double m = 2.0 * i + 1.0;
    const double h = i + 0.5;
    s += std::exp(-m * y) / (kPi * kPi * h * h);
    const double next = std::exp(-(m + 2.0) * y);
    if (next / (kPi * kPi * (i + 1.0)) <= kClosedFormTol) break;
  }
  return std::max(0.0, 0.5 - s);
}

double multibit_map(double d, const ProjectionSpec& spec, int bits, double delta) {
  if (bits < 1 || bits > 16) throw InvalidArgument("multibit B must be in [1, 16]");
  require_positive(delta, "Delta");
  require_distance(d);
  if (d == 0.0) return 0.0;
  const double s = spec.scale / (std::ldexp(1.0, bits) * delta);
  const bool gauss = spec.family == Family::kGaussian;
  auto phi = [&](double k) {
    double z = 2.0 * kPi * s * d * k;
    return gauss ? std::exp(-0.5 * z * z) : std::exp(-z);
  };
  double sum = 0.0;
  for (int k = 1; k < kClosedFormMaxTerms; ++k) {
    sum += phi(k) / (kPi * kPi * static_cast<double>(k) * k);
    // Remaining weights 1/(pi j)^2 for j > k sum to at most 1/(pi^2 k).
    if (2.0 * phi(k + 1.0) / (kPi * kPi * k) <= kClosedFormTol) break;
  }
  return std::max(0.0, 1.0 / 3.0 - 2.0 * sum);
}

UniversalBinaryCurve::UniversalBinaryCurve(Family family, double scale, double delta)
    : family_(family), scale_(scale), delta_(delta) {
  require_positive(scale, "scale");
  require_positive(delta, "Delta");
}

double UniversalBinaryCurve::value(double d) const {
  return family_ == Family::kGaussian ? universal_binary_map(d, scale_, delta_)
                                      : universal_binary_map_l1(d, scale_, delta_);
}

MultibitCurve::MultibitCurve(ProjectionSpec spec, int bits, double delta)
    : spec_(spec), bits_(bits), delta_(delta) {
  if (bits < 1 || bits > 16) throw InvalidArgument("multibit B must be in [1, 16]");
  require_positive(delta, "Delta");
}

Inversion invert_map(const DistanceCurve& g, double gval) {
  if (std::isnan(gval)) throw InvalidArgument("cannot invert NaN");
  if (gval < 0.0) return {0.0, InversionStatus::kBelowRange};
  if (gval == 0.0) return {0.0, InversionStatus::kUnique};
  const double level = g.saturation_level();
  double hi = g.saturation_radius();
  if (gval >= level) return {hi, InversionStatus::kSaturated};
  if (!std::isfinite(hi)) {
    hi = 1.0;
    int guard = 0;
    while (g.value(hi) < gval) {
      hi *= 2.0;
      if (++guard > 2000) throw NonMonotoneModel("cannot bracket the inverse");
    }
  }
  constexpr int kGrid = 256;
  double prev = g.value(0.0);
  for (int i = 1; i <= kGrid; ++i) {
    double v = g.value(hi * i / kGrid);
    if (v < prev - 1e-12 * std::max(1.0, std::abs(prev)))
      throw NonMonotoneModel("distance curve decreases before its saturation radius");
    prev = v;
  }
  double lo = 0.0;
  while (true) {
    double m = 0.5 * (lo + hi);
    if (m <= lo || m >= hi) break;
    if (g.value(m) >= gval) hi = m; else lo = m;
  }
  return {0.5 * (lo + hi), InversionStatus::kUnique};
}

double ambiguity(const DistanceCurve& g, double d_w, double eps, double delta) {
  if (!(eps >= 0.0) || !(delta >= 0.0)) throw InvalidArgument("eps and delta must be nonnegative");
  Inversion inv = invert_map(g, d_w);
  if (inv.status == InversionStatus::kSaturated) return kInf;
  const double num = eps + delta * std::max(0.0, d_w);
  if (num == 0.0) return 0.0;
  const double s = g.slope(inv.d);
  if (!(s > 0.0)) return kInf;
  return num / s;
}

SubadditivityReport check_subadditivity(const std::function<double(double)>& g, double eps,
                                        double delta, const std::vector<double>& grid) {
  SubadditivityReport r;
  for (double a : grid) {
    if (!(a >= 0.0)) throw InvalidArgument("subadditivity grid must be nonnegative");
    for (double b : grid) {
      double v = (1.0 - 2.0 * eps) * g(a + b) - 3.0 * delta - g(a) - g(b);
      if (v > r.worst) {
        r.worst = v;
        r.a = a;
        r.b = b;
      }
    }
  }
  r.pass = r.worst <= kSubadditivitySlack;
  return r;
}

}  // namespace uembed
