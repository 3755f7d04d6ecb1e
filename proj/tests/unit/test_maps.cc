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
#include <set>
#include <vector>

#include "doctest.h"
#include "support/oracles.h"
#include "uembed/error.h"
#include "uembed/maps.h"

using namespace uembed;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<PeriodicMap> catalog() {
  const double a = std::sqrt(2.0) / 2.0;
  PeriodicMap mix = make_fourier_mixture({{1, a}, {10, a}});
  return {make_square_wave(), make_sawtooth(),  make_multibit(1), make_multibit(2),
          make_multibit(4),   mix,              quantize_map(mix, 1), quantize_map(mix, 3)};
}

}  // namespace

TEST_CASE("square wave values and spectrum") {
  PeriodicMap h = make_square_wave();
  CHECK(h(0.25) == 1.0);
  CHECK(h(0.75) == 0.0);
  CHECK(h(0.0) == 1.0);
  CHECK(h(0.5) == 0.0);
  CHECK(h(-0.25) == 0.0);
  CHECK(h.range() == 1.0);
  CHECK(h.mean_square() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(h.dc_power() == doctest::Approx(0.25).epsilon(1e-15));
  // One-sided power |H_1|^2 + |H_-1|^2 = 2 / pi^2.
  CHECK(h.coefficient_power(1) == doctest::Approx(2.0 / (kPi * kPi)).epsilon(1e-14));
  CHECK(h.coefficient_power(2) == 0.0);
  CHECK(h.coefficient_power(3) == doctest::Approx(2.0 / (9.0 * kPi * kPi)).epsilon(1e-14));
}

TEST_CASE("square wave spectrum truncation meets its tolerance") {
  PeriodicMap h = make_square_wave();
  for (double tol : {1e-3, 1e-6}) {
    PowerSpectrum ps = h.power_coeffs(tol);
    CHECK(ps.tail_bound <= tol);
    CHECK(ps.tail_bound >= 0.0);
    // Omitted power is at least the next odd line and at most the bound.
    const int next = ps.kmax() + (ps.kmax() % 2 == 1 ? 2 : 1);
    CHECK(ps.tail_bound >= 2.0 / (kPi * kPi * next * next));
    CHECK(ps.listed_power() + ps.tail_bound == doctest::Approx(0.5).epsilon(1e-12));
    // Tail of sum over odd k > K of 2/(pi k)^2 is about 1/(pi^2 K).
    CHECK(ps.kmax() >= static_cast<int>(0.9 / (kPi * kPi * tol)));
    CHECK(ps.kmax() <= static_cast<int>(1.1 / (kPi * kPi * tol)) + 2);
  }
}

TEST_CASE("sawtooth catalog amplitude") {
  PeriodicMap h = make_sawtooth();
  CHECK(h(0.0) == doctest::Approx(-kSawtoothAmplitude / 2.0));
  CHECK(h(0.5) == doctest::Approx(0.0));
  CHECK(h(1.25) == doctest::Approx(h(0.25)));
  CHECK(h.range() == doctest::Approx(kSawtoothAmplitude));
  CHECK(h.coefficient_power(1) == doctest::Approx(1.0 / (kPi * kPi)).epsilon(1e-14));
  CHECK(h.coefficient_power(7) == doctest::Approx(1.0 / (49.0 * kPi * kPi)).epsilon(1e-14));
  CHECK(2.0 * h.ac_power() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  PowerSpectrum ps = h.power_coeffs(1e-6);
  CHECK(ps.listed_power() + ps.tail_bound == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(ps.tail_bound <= 1e-6);
}

TEST_CASE("multibit levels and quantization error") {
  for (int b : {1, 2, 3, 4, 8}) {
    PeriodicMap q = make_multibit(b);
    PeriodicMap saw = make_sawtooth();
    std::set<double> levels;
    double worst = 0.0;
    for (int i = 0; i < 20011; ++i) {
      const double t = (i + 0.5) / 20011.0;
      levels.insert(q(t));
      worst = std::max(worst, std::abs(q(t) - saw(t)));
    }
    CHECK(levels.size() == (size_t{1} << b));
    CHECK(worst <= saw.range() / std::ldexp(1.0, b + 1) + 1e-12);
    CHECK(q.bits() == b);
  }
  // B = 4: worst error 2^-5 in units of the range.
  PeriodicMap q4 = make_multibit(4);
  CHECK(q4.range() / make_sawtooth().range() == doctest::Approx(15.0 / 16.0));
}

TEST_CASE("one-bit multibit is an affine copy of the square wave") {
  PeriodicMap q = make_multibit(1);
  PeriodicMap sq = make_square_wave();
  const double hi = q.max_value(), lo = q.min_value();
  for (int i = 0; i < 997; ++i) {
    const double t = (i + 0.25) / 997.0;
    // Sawtooth increases through the period, so the high level sits on [1/2, 1).
    CHECK(q(t) == doctest::Approx(lo + (hi - lo) * (1.0 - sq(t))));
  }
}

TEST_CASE("quantized sawtooth matches multibit pointwise") {
  for (int b : {1, 2, 5}) {
    PeriodicMap a = quantize_map(make_sawtooth(), b);
    PeriodicMap m = make_multibit(b);
    for (int i = 0; i < 1009; ++i) {
      const double t = (i + 0.37) / 1009.0;
      CHECK(a(t) == doctest::Approx(m(t)).epsilon(1e-15));
    }
    CHECK(a.mean_square() == doctest::Approx(m.mean_square()).epsilon(1e-12));
  }
}

TEST_CASE("multibit spectrum equals the sawtooth off multiples of 2^B") {
  // The quantization error is a sawtooth of period 2^-B whose lines cancel the
  // sawtooth exactly at k = m 2^B and vanish elsewhere.
  for (int b : {1, 2, 3, 4}) {
    PowerSpectrum ps = make_multibit(b).power_coeffs(1e-4);
    const int period = 1 << b;
    for (int k = 1; k <= std::min(ps.kmax(), 400); ++k) {
      const double expect = k % period == 0 ? 0.0 : 1.0 / (kPi * kPi * k * k);
      CHECK(std::abs(ps.at(k) - expect) <= 1e-10 * expect + 1e-15);
    }
    CHECK(make_multibit(b).mean_square() ==
          doctest::Approx((1.0 / 6.0) * (1.0 - std::pow(4.0, -b))).epsilon(1e-13));
  }
}

TEST_CASE("fourier mixture construction") {
  const double a = std::sqrt(2.0) / 2.0;
  PeriodicMap mix = make_fourier_mixture({{10, a}, {1, a}});
  CHECK(mix.mean_square() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(mix.dc_power() == 0.0);
  CHECK(mix.coefficient_power(1) == doctest::Approx(0.25));
  CHECK(mix.coefficient_power(10) == doctest::Approx(0.25));
  CHECK(mix.coefficient_power(2) == 0.0);
  PowerSpectrum ps = mix.power_coeffs(1e-12);
  REQUIRE(ps.coeffs.size() == 2);
  CHECK(ps.coeffs[0].k == 1);
  CHECK(ps.coeffs[1].k == 10);
  CHECK(ps.tail_bound == 0.0);
  // Trapezoid on a periodic integrand is exact for trigonometric polynomials.
  const double ms = testing::trapezoid([&](double t) { return mix(t) * mix(t); }, 0.0, 1.0, 4000);
  CHECK(ms == doctest::Approx(0.5).epsilon(1e-12));

  PeriodicMap tone = make_fourier_mixture({{1, 1.0}});
  CHECK(tone.coefficient_power(1) == doctest::Approx(0.5));
  CHECK(tone.power_coeffs(1e-9).coeffs.size() == 1);

  CHECK_THROWS_AS(make_fourier_mixture({}), InvalidArgument);
  CHECK_THROWS_AS(make_fourier_mixture({{1, 1.0}, {1, 0.5}}), InvalidArgument);
  CHECK_THROWS_AS(make_fourier_mixture({{0, 1.0}}), InvalidArgument);
}

TEST_CASE("quantized mixture is two-level at one bit") {
  const double a = std::sqrt(2.0) / 2.0;
  PeriodicMap mix = make_fourier_mixture({{1, a}, {10, a}});
  PeriodicMap q = quantize_map(mix, 1);
  std::set<double> levels;
  double worst = 0.0;
  for (int i = 0; i < 50021; ++i) {
    const double t = (i + 0.5) / 50021.0;
    levels.insert(q(t));
    worst = std::max(worst, std::abs(q(t) - mix(t)));
  }
  CHECK(levels.size() == 2);
  CHECK(worst <= mix.range() / 4.0 + 1e-9);
  CHECK_FALSE(q.has_analytic_spectrum());
  // Numeric spectrum against midpoint-rule Fourier integration.
  PowerSpectrum ps = q.power_coeffs(1e-4);
  for (int k : {1, 3, 10}) {
    double re = 0.0, im = 0.0;
    const int n = 200003;
    for (int i = 0; i < n; ++i) {
      const double t = (i + 0.5) / n;
      re += q(t) * std::cos(2.0 * kPi * k * t);
      im -= q(t) * std::sin(2.0 * kPi * k * t);
    }
    re /= n;
    im /= n;
    CHECK(ps.at(k) == doctest::Approx(2.0 * (re * re + im * im)).epsilon(1e-4));
  }
  CHECK(ps.listed_power() + ps.tail_bound >= q.ac_power() - 1e-12);
}

TEST_CASE("quantization error bound for any inner map") {
  for (int b : {1, 2, 4, 6}) {
    PeriodicMap inner = make_fourier_mixture({{2, 0.3}, {3, 1.1}});
    PeriodicMap q = quantize_map(inner, b);
    double worst = 0.0;
    for (int i = 0; i < 20011; ++i) {
      const double t = (i + 0.5) / 20011.0;
      worst = std::max(worst, std::abs(q(t) - inner(t)));
    }
    CHECK(worst <= inner.range() / std::ldexp(1.0, b + 1) + 1e-9);
  }
}

TEST_CASE("periodicity and parseval across the catalog") {
  for (const PeriodicMap& h : catalog()) {
    CAPTURE(h.id());
    for (double t : {0.013, 0.25, 0.5, 0.77, 0.999})
      CHECK(h(t) == doctest::Approx(h(t + 1.0)).epsilon(1e-12));
    PowerSpectrum ps = h.power_coeffs(1e-4);
    CHECK(ps.tail_bound <= 1e-4);
    for (size_t i = 1; i < ps.coeffs.size(); ++i) CHECK(ps.coeffs[i].k > ps.coeffs[i - 1].k);
    for (const auto& line : ps.coeffs) CHECK(line.power >= 0.0);
    // The listed lines include k = 0 when the map has a mean.
    CHECK(ps.at(0) == doctest::Approx(h.dc_power()).epsilon(1e-12));
    const double total = ps.listed_power() + ps.tail_bound;
    CHECK(total >= h.mean_square() - 1e-12);
    CHECK(total <= h.mean_square() + 1e-4 + 1e-12);
    // Mean square against direct midpoint integration.
    double ms = 0.0;
    const int n = 100003;
    for (int i = 0; i < n; ++i) {
      const double v = h((i + 0.5) / n);
      ms += v * v;
    }
    CHECK(ms / n == doctest::Approx(h.mean_square()).epsilon(1e-4));
  }
}

TEST_CASE("map ids round-trip through parse_map") {
  for (const PeriodicMap& h : catalog()) {
    PeriodicMap back = parse_map(h.id());
    CHECK(back.id() == h.id());
    for (double t : {0.1, 0.45, 0.9}) CHECK(back(t) == h(t));
  }
  PeriodicMap s = parse_map("quantized:sawtooth:B=3:S=0.5");
  CHECK(s.max_value() <= 0.5);
  CHECK_THROWS_AS(parse_map("triangle"), InvalidArgument);
  CHECK_THROWS_AS(parse_map("multibit:B=0"), InvalidArgument);
  CHECK_THROWS_AS(parse_map("mixture:1"), InvalidArgument);
}

TEST_CASE("argument and tolerance validation") {
  PeriodicMap h = make_square_wave();
  CHECK_THROWS_AS(h(std::nan("")), InvalidArgument);
  CHECK_THROWS_AS(h(INFINITY), InvalidArgument);
  CHECK_THROWS_AS(h.power_coeffs(0.0), InvalidArgument);
  CHECK_THROWS_AS(make_multibit(0), InvalidArgument);
  CHECK_THROWS_AS(make_multibit(17), InvalidArgument);
  CHECK_THROWS_AS(make_multibit(2).coefficient_power(1), InvalidArgument);
  CHECK_THROWS_AS(make_multibit(2).power_coeffs(1e-12), ToleranceUnreachable);
  CHECK_THROWS_AS(make_sawtooth().power_coeffs(1e-12), ToleranceUnreachable);
}

TEST_CASE("uniform quantizer") {
  CHECK(quantize_uniform(0.1, -1.0, 1.0, 1) == 0.5);
  CHECK(quantize_uniform(-0.1, -1.0, 1.0, 1) == -0.5);
  CHECK(quantize_uniform(5.0, -1.0, 1.0, 2) == 0.75);
  CHECK(quantize_uniform(-5.0, -1.0, 1.0, 2) == -0.75);
  CHECK(quantize_uniform(1.0, -1.0, 1.0, 3) == 0.875);
}
