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

// Period-1 embedding nonlinearities h(t) and their Fourier power spectra.
//
// Power convention: coefficient k >= 1 carries the one-sided power
// |H_k|^2 + |H_{-k}|^2, coefficient 0 carries the DC power |H_0|^2, so that
// sum_k P_k = integral_0^1 h(t)^2 dt.
//
// Maps are right-continuous: a bin edge takes the value of the bin that
// starts there.

#ifndef UEMBED_MAPS_H_
#define UEMBED_MAPS_H_

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uembed {

enum class MapKind { kSquare, kMultibit, kSawtooth, kFourierMixture, kQuantized };

struct SineTerm {
  int frequency;
  double amplitude;
};

struct SpectrumLine {
  int k;
  double power;
};

struct PowerSpectrum {
  std::vector<SpectrumLine> coeffs;  // strictly increasing k, zero lines omitted
  double tail_bound = 0.0;           // certified bound on the omitted power

  int kmax() const { return coeffs.empty() ? 0 : coeffs.back().k; }
  double listed_power() const;
  // Power at k, zero when k is not listed.
  double at(int k) const;
};

// Maximum harmonic index for spectra obtained by numerical integration.
inline constexpr int kNumericCoefficientCap = 1 << 20;
// Maximum harmonic index for closed-form spectra.
inline constexpr int kAnalyticCoefficientCap = 1 << 20;

// Piecewise-constant description of one period: value[j] holds on
// [breaks[j], breaks[j+1]), breaks.front() == 0, breaks.back() == 1.
struct StepRepresentation {
  std::vector<double> breaks;
  std::vector<double> values;
};

class PeriodicMap {
 public:
  class Impl;

  // h(t mod 1). Throws InvalidArgument on non-finite t.
  double operator()(double t) const;
  void eval(std::span<const double> t, std::span<double> out) const;

  MapKind kind() const;
  // Canonical config name; parse_map(id()) rebuilds an identical map.
  std::string id() const;

  double min_value() const;
  double max_value() const;
  // Range h_bar = sup h - inf h.
  double range() const { return max_value() - min_value(); }

  // integral_0^1 h^2, the total power.
  double mean_square() const;
  double dc_power() const;
  // Total power in k >= 1.
  double ac_power() const { return mean_square() - dc_power(); }

  // Analytic kinds (square, sawtooth, mixture) expose each coefficient in
  // closed form; the others go through numerical integration.
  bool has_analytic_spectrum() const;
  // One-sided power at harmonic k. Analytic kinds only.
  double coefficient_power(int k) const;
  // Power strictly above harmonic k. Analytic kinds only.
  double tail_power(int k) const;

  // Coefficients up to the smallest kmax with tail_bound <= tol.
  // Throws InvalidArgument for tol <= 0 and ToleranceUnreachable beyond the
  // coefficient cap.
  PowerSpectrum power_coeffs(double tol) const;

  // Present for piecewise-constant kinds (square, multibit, quantized).
  std::optional<StepRepresentation> steps() const;

  // Multibit / quantized bit depth, if any.
  std::optional<int> bits() const;

  const Impl& impl() const { return *impl_; }

  explicit PeriodicMap(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

 private:
  std::shared_ptr<const Impl> impl_;
};

// Binary universal quantizer: 1 on [0, 1/2), 0 on [1/2, 1).
PeriodicMap make_square_wave();

// Amplitude of the catalog sawtooth; its one-sided power is 1/(pi k)^2.
inline constexpr double kSawtoothAmplitude = 1.4142135623730951;

// kSawtoothAmplitude * (t mod 1 - 1/2).
PeriodicMap make_sawtooth();

// The sawtooth passed through a uniform 2^B-level midpoint quantizer.
// 1 <= B <= 16.
PeriodicMap make_multibit(int bits);

// sum_i a_i sin(2 pi k_i t). Frequencies positive and distinct.
PeriodicMap make_fourier_mixture(std::vector<SineTerm> terms);

// `inner` through a B-bit midpoint quantizer spanning the inner range, or
// [-saturation, saturation] (clamping) when a saturation level is given.
PeriodicMap quantize_map(const PeriodicMap& inner, int bits,
                         std::optional<double> saturation = std::nullopt);

// Parses `square`, `sawtooth`, `multibit:B=2`, `mixture:1:0.7071,10:0.7071`,
// `quantized:<inner>:B=4[:S=1.5]`. Throws InvalidArgument.
PeriodicMap parse_map(std::string_view spec);

// Uniform midpoint quantizer shared by maps and post-quantization:
// 2^bits cells on [lo, hi], out-of-range values clamp to the end cells.
double quantize_uniform(double v, double lo, double hi, int bits);

}  // namespace uembed

#endif  // UEMBED_MAPS_H_
