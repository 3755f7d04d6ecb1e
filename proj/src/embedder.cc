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

#include "uembed/embedder.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "uembed/error.h"
#include "uembed/parallel.h"

namespace uembed {

namespace {

// Every dot product accumulates eight interleaved partial sums (lane j takes
// elements j, j+8, ...) and reduces them in one fixed tree. All kernels below
// follow this order exactly, so a coordinate does not depend on the kernel,
// the batch size or the thread that computed it.
typedef double v8d __attribute__((vector_size(64)));

inline v8d load8(const double* p) {
  v8d v;
  std::memcpy(&v, p, sizeof(v));
  return v;
}

inline v8d load_tail(const double* p, size_t rem) {
  v8d v = {0, 0, 0, 0, 0, 0, 0, 0};
  for (size_t j = 0; j < rem; ++j) v[j] = p[j];
  return v;
}

inline double reduce8(v8d a) {
  return ((a[0] + a[1]) + (a[2] + a[3])) + ((a[4] + a[5]) + (a[6] + a[7]));
}

double dot(const double* a, const double* x, size_t n) {
  v8d acc = {0, 0, 0, 0, 0, 0, 0, 0};
  size_t i = 0;
  for (; i + 8 <= n; i += 8) acc += load8(a + i) * load8(x + i);
  if (i < n) acc += load_tail(a + i, n - i) * load_tail(x + i, n - i);
  return reduce8(acc);
}

#if defined(__AVX512F__)
constexpr size_t kRowBlock = 2;
#else
constexpr size_t kRowBlock = 1;
#endif
constexpr size_t kSigBlock = 4;

// out[r * ldo + s] = <a_r, x_s> for kRowBlock rows and kSigBlock signals.
inline void dot_block(const double* const* a, const double* const* x, size_t n, double* out,
                      size_t ldo) {
  v8d acc[kRowBlock][kSigBlock];
  for (size_t r = 0; r < kRowBlock; ++r)
    for (size_t s = 0; s < kSigBlock; ++s) acc[r][s] = v8d{0, 0, 0, 0, 0, 0, 0, 0};
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    v8d xv[kSigBlock];
    for (size_t s = 0; s < kSigBlock; ++s) xv[s] = load8(x[s] + i);
    for (size_t r = 0; r < kRowBlock; ++r) {
      v8d av = load8(a[r] + i);
      for (size_t s = 0; s < kSigBlock; ++s) acc[r][s] += av * xv[s];
    }
  }
  if (i < n) {
    const size_t rem = n - i;
    for (size_t r = 0; r < kRowBlock; ++r) {
      v8d av = load_tail(a[r] + i, rem);
      for (size_t s = 0; s < kSigBlock; ++s) acc[r][s] += av * load_tail(x[s] + i, rem);
    }
  }
  for (size_t r = 0; r < kRowBlock; ++r)
    for (size_t s = 0; s < kSigBlock; ++s) out[r * ldo + s] = reduce8(acc[r][s]);
}

void check_signal(std::span<const double> x, size_t N) {
  if (x.size() != N)
    throw InvalidArgument("signal length " + std::to_string(x.size()) + " does not match N = " +
                          std::to_string(N));
  for (double v : x)
    if (!std::isfinite(v)) throw InvalidArgument("signal has a non-finite entry");
}

// Projections for signals [s0, s1) into out rows (signal-major, M columns).
void project_range(const Matrix& A, const Matrix& X, size_t s0, size_t s1, Matrix& out) {
  const size_t M = A.rows, N = A.cols;
  constexpr size_t kRowTile = 32;
  double tile[kRowBlock * kSigBlock];
  for (size_t r0 = 0; r0 < M; r0 += kRowTile) {
    const size_t r1 = std::min(M, r0 + kRowTile);
    size_t s = s0;
    for (; s + kSigBlock <= s1; s += kSigBlock) {
      const double* xs[kSigBlock];
      for (size_t k = 0; k < kSigBlock; ++k) xs[k] = X.row(s + k);
      size_t r = r0;
      for (; r + kRowBlock <= r1; r += kRowBlock) {
        const double* as[kRowBlock];
        for (size_t k = 0; k < kRowBlock; ++k) as[k] = A.row(r + k);
        dot_block(as, xs, N, tile, kSigBlock);
        for (size_t rr = 0; rr < kRowBlock; ++rr)
          for (size_t k = 0; k < kSigBlock; ++k) out.row(s + k)[r + rr] = tile[rr * kSigBlock + k];
      }
      for (; r < r1; ++r)
        for (size_t k = 0; k < kSigBlock; ++k) out.row(s + k)[r] = dot(A.row(r), xs[k], N);
    }
    for (; s < s1; ++s)
      for (size_t r = r0; r < r1; ++r) out.row(s)[r] = dot(A.row(r), X.row(s), N);
  }
}

}  // namespace

double effective_scale_factor(const PeriodicMap& map, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw InvalidArgument("quantization step must be positive and finite");
  switch (map.kind()) {
    case MapKind::kSquare:
      return 1.0 / (2.0 * delta);
    case MapKind::kMultibit:
      return 1.0 / (std::ldexp(1.0, *map.bits()) * delta);
    default:
      return 1.0 / delta;
  }
}

EmbeddingOperator::EmbeddingOperator(Matrix A, std::vector<double> w, PeriodicMap map,
                                     ProjectionSpec spec, std::string provenance)
    : A_(std::move(A)), w_(std::move(w)), map_(std::move(map)), spec_(spec),
      provenance_(std::move(provenance)) {
  if (A_.rows == 0 || A_.cols == 0) throw InvalidArgument("operator dimensions must be positive");
  if (A_.data.size() != A_.rows * A_.cols) throw InvalidArgument("matrix storage mismatch");
  if (w_.size() != A_.rows) throw InvalidArgument("dither length must equal M");
  for (double v : w_)
    if (!(v >= 0.0 && v < 1.0)) throw InvalidArgument("dither entries must lie in [0, 1)");
}

EmbeddingOperator build_operator(const ProjectionSpec& spec, const PeriodicMap& map, size_t M,
                                 size_t N, const RandomState& rs, double delta) {
  if (M == 0 || N == 0) throw InvalidArgument("operator dimensions must be positive");
  ProjectionSpec eff = spec.rescaled(effective_scale_factor(map, delta));
  Matrix A = sample_projection(eff, M, N, rs.with_stream(Stream::kMatrix));
  std::vector<double> w = sample_dither(M, rs.with_stream(Stream::kDither));
  std::ostringstream prov;
  prov.precision(17);
  prov << map.id() << ";" << eff.describe() << ";seed=" << rs.seed() << ";sub="
       << rs.substream();
  return EmbeddingOperator(std::move(A), std::move(w), map, eff, prov.str());
}

EmbeddingVector embed(const EmbeddingOperator& op, std::span<const double> x) {
  check_signal(x, op.N());
  EmbeddingVector y;
  y.map_id = op.provenance();
  y.values.resize(op.M());
  const Matrix& A = op.A();
  for (size_t i = 0; i < op.M(); ++i)
    y.values[i] = op.map()(dot(A.row(i), x.data(), op.N()) + op.dither()[i]);
  return y;
}

void project_batch_into(const Matrix& A, const Matrix& X, Matrix& out) {
  if (X.cols != A.cols) throw InvalidArgument("signal length does not match N");
  out.rows = X.rows;
  out.cols = A.rows;
  out.data.assign(X.rows * A.rows, 0.0);
  constexpr size_t kSignalsPerTask = 64;
  parallel_ranges(X.rows, kSignalsPerTask,
                  [&](size_t b, size_t e) { project_range(A, X, b, e, out); });
}

void embed_batch_into(const EmbeddingOperator& op, const Matrix& X, Matrix& out) {
  if (X.cols != op.N()) throw InvalidArgument("signal length does not match N");
  for (size_t s = 0; s < X.rows; ++s) check_signal({X.row(s), X.cols}, op.N());
  project_batch_into(op.A(), X, out);
  const auto& w = op.dither();
  const PeriodicMap& h = op.map();
  parallel_ranges(X.rows, 256, [&](size_t b, size_t e) {
    for (size_t s = b; s < e; ++s) {
      double* r = out.row(s);
      for (size_t i = 0; i < op.M(); ++i) r[i] = h(r[i] + w[i]);
    }
  });
}

std::vector<EmbeddingVector> embed_batch(const EmbeddingOperator& op, const Matrix& X) {
  Matrix out;
  embed_batch_into(op, X, out);
  std::vector<EmbeddingVector> ys(X.rows);
  for (size_t s = 0; s < X.rows; ++s) {
    ys[s].map_id = op.provenance();
    ys[s].values.assign(out.row(s), out.row(s) + out.cols);
  }
  return ys;
}

std::vector<EmbeddingVector> embed_batch(const EmbeddingOperator& op,
                                         const std::vector<std::vector<double>>& X) {
  Matrix m;
  m.rows = X.size();
  m.cols = op.N();
  m.data.reserve(m.rows * m.cols);
  for (const auto& x : X) {
    if (x.size() != op.N()) throw InvalidArgument("signal length does not match N");
    m.data.insert(m.data.end(), x.begin(), x.end());
  }
  return embed_batch(op, m);
}

DistanceMetric parse_metric(std::string_view name) {
  if (name == "sq_l2_mean") return DistanceMetric::kSqL2Mean;
  if (name == "l2_mean") return DistanceMetric::kL2Mean;
  if (name == "hamming_mean") return DistanceMetric::kHammingMean;
  if (name == "inner_mean") return DistanceMetric::kInnerMean;
  throw InvalidArgument("unknown embedding metric '" + std::string(name) + "'");
}

double embedding_distance(std::span<const double> y, std::span<const double> z,
                          DistanceMetric m) {
  if (y.size() != z.size()) throw InvalidArgument("embedding length mismatch");
  if (y.empty()) throw InvalidArgument("empty embeddings");
  const double M = static_cast<double>(y.size());
  double s = 0.0;
  switch (m) {
    case DistanceMetric::kSqL2Mean:
    case DistanceMetric::kL2Mean:
      for (size_t i = 0; i < y.size(); ++i) s += (y[i] - z[i]) * (y[i] - z[i]);
      return m == DistanceMetric::kSqL2Mean ? s / M : std::sqrt(s / M);
    case DistanceMetric::kHammingMean: {
      size_t diff = 0;
      for (size_t i = 0; i < y.size(); ++i) {
        if ((y[i] != 0.0 && y[i] != 1.0) || (z[i] != 0.0 && z[i] != 1.0))
          throw InvalidArgument("hamming distance needs {0,1}-valued embeddings");
        diff += y[i] != z[i];
      }
      return static_cast<double>(diff) / M;
    }
    case DistanceMetric::kInnerMean:
      for (size_t i = 0; i < y.size(); ++i) s += y[i] * z[i];
      return s / M;
  }
  return 0.0;
}

double embedding_distance(const EmbeddingVector& y, const EmbeddingVector& z, DistanceMetric m) {
  if (y.map_id != z.map_id || y.quantized_bits != z.quantized_bits)
    throw InvalidArgument("embeddings come from different operators or quantizers");
  return embedding_distance(std::span<const double>(y.values), std::span<const double>(z.values),
                            m);
}

QuantizedEmbedding post_quantize(const EmbeddingVector& y, int bits, double saturation) {
  if (bits < 1 || bits > 52) throw InvalidArgument("post-quantization bits must be in [1, 52]");
  if (!(saturation > 0.0) || !std::isfinite(saturation))
    throw InvalidArgument("saturation level must be positive");
  QuantizedEmbedding q;
  q.y.map_id = y.map_id;
  q.y.quantized_bits = bits;
  q.y.values.resize(y.values.size());
  for (size_t i = 0; i < y.values.size(); ++i) {
    double v = y.values[i];
    if (v < -saturation || v > saturation) ++q.saturated;
    q.y.values[i] = quantize_uniform(v, -saturation, saturation, bits);
  }
  return q;
}

}  // namespace uembed
