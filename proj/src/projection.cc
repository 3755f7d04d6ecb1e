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

#include "uembed/projection.h"

#include <cmath>
#include <sstream>

#include "uembed/error.h"
#include "uembed/parallel.h"

namespace uembed {

ProjectionSpec::ProjectionSpec(Family f, double s) : family(f), scale(s) {
  if (!(s > 0.0) || !std::isfinite(s))
    throw InvalidArgument("projection scale must be positive and finite");
}

std::string ProjectionSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << family_name(family) << "(" << scale << ")";
  return os.str();
}

Family parse_family(std::string_view name) {
  if (name == "gaussian") return Family::kGaussian;
  if (name == "cauchy") return Family::kCauchy;
  throw InvalidArgument("unknown projection family '" + std::string(name) + "'");
}

std::string_view family_name(Family f) {
  return f == Family::kGaussian ? "gaussian" : "cauchy";
}

double signal_distance(const ProjectionSpec& spec, std::span<const double> x,
                       std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("signal_distance: length mismatch");
  double s = 0.0;
  if (spec.metric() == SignalMetric::kL2) {
    for (size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(s);
  }
  for (size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
  return s;
}

Matrix sample_projection(const ProjectionSpec& spec, size_t M, size_t N, const RandomState& rs,
                         size_t max_entries) {
  if (M == 0 || N == 0) throw InvalidArgument("projection dimensions must be positive");
  if (M > max_entries / N)
    throw InvalidArgument("projection of " + std::to_string(M) + "x" + std::to_string(N) +
                          " exceeds the memory cap");
  Matrix A;
  A.rows = M;
  A.cols = N;
  A.data.resize(M * N);
  const double s = spec.scale;
  const bool gauss = spec.family == Family::kGaussian;
  parallel_for(M, [&](size_t i) {
    double* r = A.row(i);
    for (size_t j = 0; j < N; ++j) {
      uint64_t idx = static_cast<uint64_t>(i) * N + j;
      r[j] = s * (gauss ? rs.normal(idx) : rs.cauchy(idx));
    }
  });
  return A;
}

std::vector<double> sample_dither(size_t M, const RandomState& rs, size_t max_entries) {
  if (M == 0) throw InvalidArgument("dither length must be positive");
  if (M > max_entries) throw InvalidArgument("dither exceeds the memory cap");
  std::vector<double> w(M);
  for (size_t i = 0; i < M; ++i) w[i] = rs.uniform(i);
  return w;
}

double char_fn(const ProjectionSpec& spec, double xi, double d) {
  if (!(d >= 0.0)) throw InvalidArgument("char_fn: distance must be nonnegative");
  if (d == 0.0) return 1.0;
  if (spec.family == Family::kGaussian) {
    double z = spec.scale * d * xi;
    return std::exp(-0.5 * z * z);
  }
  return std::exp(-spec.scale * d * std::abs(xi));
}

std::vector<double> projected_diff_samples(const ProjectionSpec& spec, double d, size_t n,
                                           const RandomState& rs) {
  if (!(d >= 0.0)) throw InvalidArgument("distance must be nonnegative");
  if (n == 0) throw InvalidArgument("sample count must be positive");
  std::vector<double> out(n);
  const double s = spec.scale * d;
  for (size_t i = 0; i < n; ++i) {
    if (s == 0.0) {
      out[i] = 0.0;
    } else {
      out[i] = s * (spec.family == Family::kGaussian ? rs.normal(i) : rs.cauchy(i));
    }
  }
  return out;
}

}  // namespace uembed
