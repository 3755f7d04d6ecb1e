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

#include "uembed/maps.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/math/special_functions/trigamma.hpp>
#include <boost/math/tools/minima.hpp>

#include "uembed/error.h"

namespace uembed {

namespace {

constexpr double kPi = std::numbers::pi;

double reduce_unit(double t) {
  double r = t - std::floor(t);
  // t slightly below an integer can round up to exactly 1.
  return r >= 1.0 ? 0.0 : r;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

double PowerSpectrum::listed_power() const {
  double s = 0.0;
  for (const auto& c : coeffs) s += c.power;
  return s;
}

double PowerSpectrum::at(int k) const {
  auto it = std::lower_bound(coeffs.begin(), coeffs.end(), k,
                             [](const SpectrumLine& c, int v) { return c.k < v; });
  return (it != coeffs.end() && it->k == k) ? it->power : 0.0;
}

double quantize_uniform(double v, double lo, double hi, int bits) {
  const double levels = std::ldexp(1.0, bits);
  double idx = std::floor((v - lo) / (hi - lo) * levels);
  idx = std::clamp(idx, 0.0, levels - 1.0);
  return lo + (idx + 0.5) * ((hi - lo) / levels);
}

class PeriodicMap::Impl {
 public:
  virtual ~Impl() = default;
  // t already reduced to [0, 1).
  virtual double value(double t) const = 0;
  virtual MapKind kind() const = 0;
  virtual std::string id() const = 0;
  virtual double min_value() const = 0;
  virtual double max_value() const = 0;
  virtual double mean_square() const = 0;
  virtual double dc_power() const = 0;
  virtual bool analytic() const { return false; }
  virtual double coefficient(int) const { return 0.0; }
  // Power strictly above harmonic k. Analytic kinds only.
  virtual double tail_after(int) const { return 0.0; }
  virtual std::optional<StepRepresentation> steps() const { return std::nullopt; }
  virtual std::optional<int> bits() const { return std::nullopt; }
  // Breakpoints splitting [0, 1] into pieces on which the map is continuous
  // and monotone. Empty for piecewise-constant maps.
  virtual std::vector<double> monotone_pieces() const { return {}; }
};

namespace {

using Impl = PeriodicMap::Impl;

// Computes the jump-based Fourier sums for a step representation.
class StepSpectrum {
 public:
  explicit StepSpectrum(const StepRepresentation& s) {
    const size_t n = s.values.size();
    for (size_t j = 0; j < n; ++j) {
      double prev = s.values[(j + n - 1) % n];
      double jump = s.values[j] - prev;
      if (jump != 0.0) {
        breaks_.push_back(s.breaks[j]);
        jumps_.push_back(jump);
      }
    }
    double mean = 0.0;
    for (size_t j = 0; j < n; ++j) {
      double len = s.breaks[j + 1] - s.breaks[j];
      mean += s.values[j] * len;
      mean_square_ += s.values[j] * s.values[j] * len;
    }
    dc_ = mean * mean;
  }

  double mean_square() const { return mean_square_; }
  double dc() const { return dc_; }
  size_t jump_count() const { return breaks_.size(); }

  // Appends one-sided powers for k in [k0, k1) to out.
  void powers(int k0, int k1, std::vector<double>& out) const {
    const int len = k1 - k0;
    std::vector<std::complex<double>> acc(len);
    for (size_t j = 0; j < breaks_.size(); ++j) {
      const double b = breaks_[j];
      const std::complex<double> step = std::polar(1.0, -2.0 * kPi * b);
      constexpr int kReseed = 256;
      for (int s = 0; s < len; s += kReseed) {
        const double phase = std::fmod(static_cast<double>(k0 + s) * b, 1.0);
        std::complex<double> z = std::polar(jumps_[j], -2.0 * kPi * phase);
        const int e = std::min(len, s + kReseed);
        for (int i = s; i < e; ++i) {
          acc[i] += z;
          z *= step;
        }
      }
    }
    for (int i = 0; i < len; ++i) {
      const double k = k0 + i;
      out.push_back(std::norm(acc[i]) / (2.0 * kPi * kPi * k * k));
    }
  }

 private:
  std::vector<double> breaks_;
  std::vector<double> jumps_;
  double mean_square_ = 0.0;
  double dc_ = 0.0;
};

class SquareImpl final : public Impl {
 public:
  double value(double t) const override { return t < 0.5 ? 1.0 : 0.0; }
  MapKind kind() const override { return MapKind::kSquare; }
  std::string id() const override { return "square"; }
  double min_value() const override { return 0.0; }
  double max_value() const override { return 1.0; }
  double mean_square() const override { return 0.5; }
  double dc_power() const override { return 0.25; }
  bool analytic() const override { return true; }
  double coefficient(int k) const override {
    if (k == 0) return 0.25;
    if (k % 2 == 0) return 0.0;
    const double kk = k;
    return 2.0 / (kPi * kPi * kk * kk);
  }
  double tail_after(int k) const override {
    // Odd j = 2m + 1 > k.
    const double m0 = std::floor((static_cast<double>(k) + 1.0) / 2.0);
    return boost::math::trigamma(m0 + 0.5) / (2.0 * kPi * kPi);
  }
  std::optional<StepRepresentation> steps() const override {
    return StepRepresentation{{0.0, 0.5, 1.0}, {1.0, 0.0}};
  }
};

class SawtoothImpl final : public Impl {
 public:
  double value(double t) const override { return kSawtoothAmplitude * (t - 0.5); }
  MapKind kind() const override { return MapKind::kSawtooth; }
  std::string id() const override { return "sawtooth"; }
  double min_value() const override { return -0.5 * kSawtoothAmplitude; }
  double max_value() const override { return 0.5 * kSawtoothAmplitude; }
  double mean_square() const override {
    return kSawtoothAmplitude * kSawtoothAmplitude / 12.0;
  }
  double dc_power() const override { return 0.0; }
  bool analytic() const override { return true; }
  double coefficient(int k) const override {
    if (k == 0) return 0.0;
    const double kk = k;
    return 1.0 / (kPi * kPi * kk * kk);
  }
  double tail_after(int k) const override {
    return boost::math::trigamma(static_cast<double>(k) + 1.0) / (kPi * kPi);
  }
  std::vector<double> monotone_pieces() const override { return {0.0, 1.0}; }
};

class MixtureImpl final : public Impl {
 public:
  explicit MixtureImpl(std::vector<SineTerm> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw InvalidArgument("mixture map needs at least one term");
    std::set<int> seen;
    for (const auto& t : terms_) {
      if (t.frequency <= 0) throw InvalidArgument("mixture frequencies must be positive");
      if (t.frequency > kAnalyticCoefficientCap)
        throw InvalidArgument("mixture frequency exceeds the coefficient cap");
      if (!std::isfinite(t.amplitude))
        throw InvalidArgument("mixture amplitudes must be finite");
      if (!seen.insert(t.frequency).second)
        throw InvalidArgument("duplicate mixture frequency " + std::to_string(t.frequency));
    }
    std::sort(terms_.begin(), terms_.end(),
              [](const SineTerm& a, const SineTerm& b) { return a.frequency < b.frequency; });
    find_extrema();
    find_critical_points();
  }

  double value(double t) const override {
    double s = 0.0;
    for (const auto& term : terms_) {
      // Reduce k*t before the sine so large frequencies keep full precision.
      double ph = reduce_unit(static_cast<double>(term.frequency) * t);
      s += term.amplitude * std::sin(2.0 * kPi * ph);
    }
    return s;
  }
  double derivative(double t) const {
    double s = 0.0;
    for (const auto& term : terms_) {
      double ph = reduce_unit(static_cast<double>(term.frequency) * t);
      s += 2.0 * kPi * term.frequency * term.amplitude * std::cos(2.0 * kPi * ph);
    }
    return s;
  }
  MapKind kind() const override { return MapKind::kFourierMixture; }
  std::string id() const override {
    std::string s = "mixture:";
    for (size_t i = 0; i < terms_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(terms_[i].frequency) + ":" + format_double(terms_[i].amplitude);
    }
    return s;
  }
  double min_value() const override { return min_; }
  double max_value() const override { return max_; }
  double mean_square() const override {
    double s = 0.0;
    for (const auto& t : terms_) s += 0.5 * t.amplitude * t.amplitude;
    return s;
  }
  double dc_power() const override { return 0.0; }
  bool analytic() const override { return true; }
  double coefficient(int k) const override {
    for (const auto& t : terms_)
      if (t.frequency == k) return 0.5 * t.amplitude * t.amplitude;
    return 0.0;
  }
  double tail_after(int k) const override {
    double s = 0.0;
    for (const auto& t : terms_)
      if (t.frequency > k) s += 0.5 * t.amplitude * t.amplitude;
    return s;
  }
  std::vector<double> monotone_pieces() const override { return pieces_; }

 private:
  int grid_size() const { return 128 * terms_.back().frequency; }

  void find_extrema() {
    const int n = grid_size();
    int imin = 0, imax = 0;
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) {
      v[i] = value(static_cast<double>(i) / n);
      if (v[i] < v[imin]) imin = i;
      if (v[i] > v[imax]) imax = i;
    }
    auto refine = [&](int i, double sign) {
      double a = static_cast<double>(i - 1) / n;
      double b = static_cast<double>(i + 1) / n;
      auto f = [&](double t) { return sign * value(reduce_unit(t)); };
      auto r = boost::math::tools::brent_find_minima(f, a, b, 52);
      return sign * std::min(r.second, f(static_cast<double>(i) / n));
    };
    min_ = refine(imin, 1.0);
    max_ = refine(imax, -1.0);
  }

  void find_critical_points() {
    const int n = grid_size();
    pieces_.push_back(0.0);
    double prev = derivative(0.0);
    for (int i = 1; i <= n; ++i) {
      double t = static_cast<double>(i) / n;
      double cur = derivative(i == n ? 0.0 : t);
      if (cur == 0.0 && i < n) {
        pieces_.push_back(t);
      } else if ((prev < 0.0 && cur > 0.0) || (prev > 0.0 && cur < 0.0)) {
        double a = static_cast<double>(i - 1) / n, b = t;
        double fa = prev;
        for (int it = 0; it < 200 && b - a > 0.0; ++it) {
          double m = 0.5 * (a + b);
          if (m <= a || m >= b) break;
          double fm = derivative(m);
          if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
          } else {
            b = m;
          }
        }
        if (b < 1.0 && b > pieces_.back()) pieces_.push_back(b);
      }
      prev = cur;
    }
    pieces_.push_back(1.0);
  }

  std::vector<SineTerm> terms_;
  double min_ = 0.0;
  double max_ = 0.0;
  std::vector<double> pieces_;
};

// Piecewise-constant maps whose spectrum is computed from their steps.
class StepMapImpl : public Impl {
 public:
  double mean_square() const override { return spectrum().mean_square(); }
  double dc_power() const override { return spectrum().dc(); }
  std::optional<StepRepresentation> steps() const override { return steps_; }
  const StepSpectrum& spectrum() const { return *spectrum_; }

 protected:
  void set_steps(StepRepresentation s) {
    steps_ = std::move(s);
    spectrum_ = std::make_unique<StepSpectrum>(steps_);
  }

 private:
  StepRepresentation steps_;
  std::unique_ptr<StepSpectrum> spectrum_;
};

class QuantizedImpl : public StepMapImpl {
 public:
  QuantizedImpl(PeriodicMap inner, int bits, std::optional<double> saturation)
      : inner_(std::move(inner)), bits_(bits), saturation_(saturation) {
    if (bits < 1 || bits > 16) throw InvalidArgument("quantizer bits must be in [1, 16]");
    if (saturation_) {
      if (!(*saturation_ > 0.0) || !std::isfinite(*saturation_))
        throw InvalidArgument("saturation level must be positive and finite");
      lo_ = -*saturation_;
      hi_ = *saturation_;
    } else {
      lo_ = inner_.min_value();
      hi_ = inner_.max_value();
      if (!std::isfinite(lo_) || !std::isfinite(hi_))
        throw InvalidArgument("cannot quantize an unbounded map");
    }
    if (!(hi_ > lo_)) throw InvalidArgument("cannot quantize a constant map");
    set_steps(build_steps());
  }

  double value(double t) const override {
    return quantize_uniform(inner_.impl().value(t), lo_, hi_, bits_);
  }
  MapKind kind() const override { return MapKind::kQuantized; }
  std::string id() const override {
    std::string s = "quantized:" + inner_.id() + ":B=" + std::to_string(bits_);
    if (saturation_) s += ":S=" + format_double(*saturation_);
    return s;
  }
  double min_value() const override { return level_min_; }
  double max_value() const override { return level_max_; }
  std::optional<int> bits() const override { return bits_; }

 protected:
  int cell(double t) const {
    const double levels = std::ldexp(1.0, bits_);
    double idx = std::floor((inner_.impl().value(t) - lo_) / (hi_ - lo_) * levels);
    return static_cast<int>(std::clamp(idx, 0.0, levels - 1.0));
  }

 private:
  StepRepresentation build_steps() {
    std::vector<double> breaks;
    if (auto inner_steps = inner_.steps()) {
      breaks = inner_steps->breaks;
    } else {
      auto pieces = inner_.impl().monotone_pieces();
      if (pieces.size() < 2) throw InvalidArgument("inner map has no monotone decomposition");
      for (size_t p = 0; p + 1 < pieces.size(); ++p) {
        breaks.push_back(pieces[p]);
        add_crossings(pieces[p], pieces[p + 1], breaks);
      }
      breaks.push_back(1.0);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    StepRepresentation out;
    out.breaks.push_back(0.0);
    level_min_ = hi_;
    level_max_ = lo_;
    for (size_t j = 0; j + 1 < breaks.size(); ++j) {
      // Right-continuity: a segment takes the value at its left end.
      double v = value(breaks[j]);
      level_min_ = std::min(level_min_, v);
      level_max_ = std::max(level_max_, v);
      if (!out.values.empty() && out.values.back() == v) {
        out.breaks.back() = breaks[j + 1];
      } else {
        out.values.push_back(v);
        out.breaks.push_back(breaks[j + 1]);
      }
    }
    return out;
  }

  // Adds every point in (a, b) where the quantizer cell changes, assuming the
  // inner map is monotone on [a, b).
  void add_crossings(double a, double b, std::vector<double>& breaks) const {
    int ca = cell(a);
    // Left limit at b: step back one ulp.
    double bl = std::nextafter(b, a);
    int cb = cell(bl);
    if (ca == cb) return;
    const int dir = cb > ca ? 1 : -1;
    for (int c = ca + dir; c != cb + dir; c += dir) {
      // First t in (a, b) whose cell has reached c.
      double lo = a, hi = bl;
      auto reached = [&](double t) { return dir > 0 ? cell(t) >= c : cell(t) <= c; };
      if (!reached(hi)) continue;
      while (true) {
        double m = 0.5 * (lo + hi);
        if (m <= lo || m >= hi) break;
        if (reached(m)) hi = m; else lo = m;
      }
      breaks.push_back(hi);
    }
  }

  PeriodicMap inner_;
  int bits_;
  std::optional<double> saturation_;
  double lo_ = 0.0, hi_ = 0.0;
  double level_min_ = 0.0, level_max_ = 0.0;
};

class MultibitImpl final : public QuantizedImpl {
 public:
  explicit MultibitImpl(int bits) : QuantizedImpl(make_sawtooth(), bits, std::nullopt), b_(bits) {}
  MapKind kind() const override { return MapKind::kMultibit; }
  std::string id() const override { return "multibit:B=" + std::to_string(b_); }

 private:
  int b_;
};

PowerSpectrum analytic_spectrum(const Impl& m, double tol) {
  auto tail = [&](int k) { return m.tail_after(k); };
  if (tail(kAnalyticCoefficientCap) > tol)
    throw ToleranceUnreachable("tolerance " + format_double(tol) +
                               " needs more than the analytic coefficient cap");
  int lo = 0, hi = 1;
  while (tail(hi) > tol) {
    lo = hi;
    hi = std::min(2 * hi, kAnalyticCoefficientCap);
  }
  // Smallest k in (lo, hi] with tail(k) <= tol.
  while (hi - lo > 1) {
    int mid = lo + (hi - lo) / 2;
    if (tail(mid) <= tol) hi = mid; else lo = mid;
  }
  const int kmax = tail(0) <= tol ? 0 : hi;
  PowerSpectrum ps;
  double p0 = m.dc_power();
  if (p0 > 0.0) ps.coeffs.push_back({0, p0});
  for (int k = 1; k <= kmax; ++k) {
    double p = m.coefficient(k);
    if (p > 0.0) ps.coeffs.push_back({k, p});
  }
  ps.tail_bound = tail(kmax);
  return ps;
}

PowerSpectrum numeric_spectrum(const StepMapImpl& m, double tol) {
  const StepSpectrum& s = m.spectrum();
  const double total_ac = s.mean_square() - s.dc();
  // Rounding in the running sums and in the located breakpoints.
  const double slack_per_term = 4e-16 * std::max(1.0, s.mean_square());
  std::vector<double> p;  // p[k-1] = P_k
  int computed = 0;
  int target = 64;
  int kmax = -1;
  double tail_at_kmax = 0.0;
  while (kmax < 0) {
    target = std::min(target, kNumericCoefficientCap);
    s.powers(computed + 1, target + 1, p);
    computed = target;
    double cum = 0.0;
    for (int k = 0; k <= computed; ++k) {
      if (k > 0) cum += p[k - 1];
      double slack = slack_per_term * (k + static_cast<double>(s.jump_count()) + 1.0);
      double tail = std::max(0.0, total_ac - cum) + slack;
      if (tail <= tol) {
        kmax = k;
        tail_at_kmax = tail;
        break;
      }
    }
    if (kmax < 0) {
      if (computed >= kNumericCoefficientCap)
        throw ToleranceUnreachable("tolerance " + format_double(tol) +
                                   " needs more than the numeric coefficient cap");
      target *= 2;
    }
  }
  PowerSpectrum ps;
  if (s.dc() > 0.0) ps.coeffs.push_back({0, s.dc()});
  for (int k = 1; k <= kmax; ++k)
    if (p[k - 1] > 0.0) ps.coeffs.push_back({k, p[k - 1]});
  ps.tail_bound = tail_at_kmax;
  return ps;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_real(std::string_view s, std::string_view what) {
  s = trim(s);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw InvalidArgument("bad " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

int parse_int(std::string_view s, std::string_view what) {
  s = trim(s);
  int v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InvalidArgument("bad " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

int parse_bits_field(std::string_view f) {
  f = trim(f);
  if (f.substr(0, 2) != "B=") throw InvalidArgument("expected B=<bits>, got '" + std::string(f) + "'");
  return parse_int(f.substr(2), "bit depth");
}

}  // namespace

double PeriodicMap::operator()(double t) const {
  if (!std::isfinite(t)) throw InvalidArgument("map argument must be finite");
  return impl_->value(reduce_unit(t));
}

void PeriodicMap::eval(std::span<const double> t, std::span<double> out) const {
  if (t.size() != out.size()) throw InvalidArgument("eval: size mismatch");
  for (size_t i = 0; i < t.size(); ++i) out[i] = (*this)(t[i]);
}

MapKind PeriodicMap::kind() const { return impl_->kind(); }
std::string PeriodicMap::id() const { return impl_->id(); }
double PeriodicMap::min_value() const { return impl_->min_value(); }
double PeriodicMap::max_value() const { return impl_->max_value(); }
double PeriodicMap::mean_square() const { return impl_->mean_square(); }
double PeriodicMap::dc_power() const { return impl_->dc_power(); }
bool PeriodicMap::has_analytic_spectrum() const { return impl_->analytic(); }
std::optional<StepRepresentation> PeriodicMap::steps() const { return impl_->steps(); }
std::optional<int> PeriodicMap::bits() const { return impl_->bits(); }

double PeriodicMap::coefficient_power(int k) const {
  if (!impl_->analytic()) throw InvalidArgument("map '" + id() + "' has no closed-form spectrum");
  if (k < 0) throw InvalidArgument("harmonic index must be nonnegative");
  return impl_->coefficient(k);
}

double PeriodicMap::tail_power(int k) const {
  if (!impl_->analytic()) throw InvalidArgument("map '" + id() + "' has no closed-form spectrum");
  if (k < 0) throw InvalidArgument("harmonic index must be nonnegative");
  return impl_->tail_after(k);
}

PowerSpectrum PeriodicMap::power_coeffs(double tol) const {
  if (!(tol > 0.0) || !std::isfinite(tol)) throw InvalidArgument("tolerance must be positive");
  if (impl_->analytic()) return analytic_spectrum(*impl_, tol);
  auto* step = dynamic_cast<const StepMapImpl*>(impl_.get());
  if (!step) throw InvalidArgument("map '" + id() + "' has no spectrum method");
  return numeric_spectrum(*step, tol);
}

PeriodicMap make_square_wave() { return PeriodicMap(std::make_shared<SquareImpl>()); }

PeriodicMap make_sawtooth() { return PeriodicMap(std::make_shared<SawtoothImpl>()); }

PeriodicMap make_multibit(int bits) {
  if (bits < 1 || bits > 16) throw InvalidArgument("multibit B must be in [1, 16]");
  return PeriodicMap(std::make_shared<MultibitImpl>(bits));
}

PeriodicMap make_fourier_mixture(std::vector<SineTerm> terms) {
  return PeriodicMap(std::make_shared<MixtureImpl>(std::move(terms)));
}

PeriodicMap quantize_map(const PeriodicMap& inner, int bits, std::optional<double> saturation) {
  return PeriodicMap(std::make_shared<QuantizedImpl>(inner, bits, saturation));
}

PeriodicMap parse_map(std::string_view spec) {
  spec = trim(spec);
  if (spec == "square") return make_square_wave();
  if (spec == "sawtooth") return make_sawtooth();
  if (spec.starts_with("multibit:")) return make_multibit(parse_bits_field(spec.substr(9)));
  if (spec.starts_with("mixture:")) {
    std::vector<SineTerm> terms;
    std::string_view rest = spec.substr(8);
    while (!rest.empty()) {
      size_t comma = rest.find(',');
      std::string_view item = rest.substr(0, comma);
      size_t colon = item.find(':');
      if (colon == std::string_view::npos)
        throw InvalidArgument("mixture term must be <frequency>:<amplitude>");
      terms.push_back({parse_int(item.substr(0, colon), "frequency"),
                       parse_real(item.substr(colon + 1), "amplitude")});
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return make_fourier_mixture(std::move(terms));
  }
  if (spec.starts_with("quantized:")) {
    std::string_view rest = spec.substr(10);
    std::optional<double> sat;
    size_t last = rest.rfind(':');
    if (last == std::string_view::npos) throw InvalidArgument("quantized map needs :B=<bits>");
    std::string_view field = trim(rest.substr(last + 1));
    if (field.starts_with("S=")) {
      sat = parse_real(field.substr(2), "saturation");
      rest = rest.substr(0, last);
      last = rest.rfind(':');
      if (last == std::string_view::npos) throw InvalidArgument("quantized map needs :B=<bits>");
    }
    int bits = parse_bits_field(rest.substr(last + 1));
    return quantize_map(parse_map(rest.substr(0, last)), bits, sat);
  }
  throw InvalidArgument("unknown map '" + std::string(spec) + "'");
}

}  // namespace uembed
