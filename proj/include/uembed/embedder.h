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

// Embedding operators y = h(A x + w).

#ifndef UEMBED_EMBEDDER_H_
#define UEMBED_EMBEDDER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uembed/maps.h"
#include "uembed/projection.h"
#include "uembed/random.h"

namespace uembed {

// Multiplier turning a user-level projection scale into the scale of A for
// a period-1 map with quantization step `delta`: 1/(2^B delta) for the square
// wave (B = 1) and multibit(B) maps, 1/delta for every other map.
double effective_scale_factor(const PeriodicMap& map, double delta);

class EmbeddingOperator {
 public:
  EmbeddingOperator(Matrix A, std::vector<double> w, PeriodicMap map, ProjectionSpec spec,
                    std::string provenance);

  size_t M() const { return A_.rows; }
  size_t N() const { return A_.cols; }
  const Matrix& A() const { return A_; }
  const std::vector<double>& dither() const { return w_; }
  const PeriodicMap& map() const { return map_; }
  // Distribution actually used for A (after scale folding).
  const ProjectionSpec& spec() const { return spec_; }
  const std::string& provenance() const { return provenance_; }

 private:
  Matrix A_;
  std::vector<double> w_;
  PeriodicMap map_;
  ProjectionSpec spec_;
  std::string provenance_;
};

// Samples A from `spec` rescaled by effective_scale_factor(map, delta) and w
// from the dither stream of `rs`.
EmbeddingOperator build_operator(const ProjectionSpec& spec, const PeriodicMap& map, size_t M,
                                 size_t N, const RandomState& rs, double delta = 1.0);

struct EmbeddingVector {
  std::vector<double> values;
  std::string map_id;  // provenance of the operator that produced it
  std::optional<int> quantized_bits;

  bool operator==(const EmbeddingVector&) const = default;
};

EmbeddingVector embed(const EmbeddingOperator& op, std::span<const double> x);

// Rows of X are signals. Elementwise identical to embed() on each row.
std::vector<EmbeddingVector> embed_batch(const EmbeddingOperator& op, const Matrix& X);
std::vector<EmbeddingVector> embed_batch(const EmbeddingOperator& op,
                                         const std::vector<std::vector<double>>& X);

// Raw form: out is resized to X.rows x M.
void embed_batch_into(const EmbeddingOperator& op, const Matrix& X, Matrix& out);

// Projections A x alone (no dither, no map), same kernels as embed().
void project_batch_into(const Matrix& A, const Matrix& X, Matrix& out);

enum class DistanceMetric { kSqL2Mean, kL2Mean, kHammingMean, kInnerMean };

DistanceMetric parse_metric(std::string_view name);

double embedding_distance(const EmbeddingVector& y, const EmbeddingVector& z, DistanceMetric m);
// Unchecked raw-value form.
double embedding_distance(std::span<const double> y, std::span<const double> z, DistanceMetric m);

struct QuantizedEmbedding {
  EmbeddingVector y;
  size_t saturated = 0;  // coordinates clamped to [-S, S]
};

// Uniform scalar quantizer with 2^B cells of width 2^(1-B) S on [-S, S],
// midpoint reconstruction.
QuantizedEmbedding post_quantize(const EmbeddingVector& y, int bits, double saturation);

}  // namespace uembed

#endif  // UEMBED_EMBEDDER_H_
