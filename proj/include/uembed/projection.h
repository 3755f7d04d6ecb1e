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

#ifndef UEMBED_PROJECTION_H_
#define UEMBED_PROJECTION_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uembed/random.h"

namespace uembed {

enum class Family { kGaussian, kCauchy };
enum class SignalMetric { kL2, kL1 };

struct ProjectionSpec {
  Family family = Family::kGaussian;
  double scale = 1.0;  // sigma (gaussian) or gamma (cauchy)

  ProjectionSpec() = default;
  // Throws InvalidArgument unless scale is positive and finite.
  ProjectionSpec(Family f, double s);

  static ProjectionSpec gaussian(double sigma) { return {Family::kGaussian, sigma}; }
  static ProjectionSpec cauchy(double gamma) { return {Family::kCauchy, gamma}; }

  SignalMetric metric() const {
    return family == Family::kGaussian ? SignalMetric::kL2 : SignalMetric::kL1;
  }
  ProjectionSpec rescaled(double factor) const { return {family, scale * factor}; }
  std::string describe() const;
};

Family parse_family(std::string_view name);
std::string_view family_name(Family f);

// Distance between two signals under the family's metric.
double signal_distance(const ProjectionSpec& spec, std::span<const double> x,
                       std::span<const double> y);

// Dense row-major matrix.
struct Matrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;

  double* row(size_t i) { return data.data() + i * cols; }
  const double* row(size_t i) const { return data.data() + i * cols; }
  double operator()(size_t i, size_t j) const { return data[i * cols + j]; }
};

inline constexpr size_t kDefaultMaxMatrixEntries = size_t{1} << 27;

// i.i.d. entries of the given family. Entry (i, j) is draw i*N + j of the
// state's stream, so any row range can be generated independently.
Matrix sample_projection(const ProjectionSpec& spec, size_t M, size_t N, const RandomState& rs,
                         size_t max_entries = kDefaultMaxMatrixEntries);

// i.i.d. uniform [0, 1).
std::vector<double> sample_dither(size_t M, const RandomState& rs,
                                  size_t max_entries = kDefaultMaxMatrixEntries);

// phi_l(xi | d): exp(-(sigma d xi)^2 / 2) or exp(-gamma d |xi|).
double char_fn(const ProjectionSpec& spec, double xi, double d);

// n draws of the signed projected distance l = <a, x - x'> at distance d.
std::vector<double> projected_diff_samples(const ProjectionSpec& spec, double d, size_t n,
                                           const RandomState& rs);

}  // namespace uembed

#endif  // UEMBED_PROJECTION_H_
