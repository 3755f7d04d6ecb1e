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

// Counter-based random numbers. Every draw is a pure function of
// (seed, stream, substream, index), so results do not depend on evaluation
// order or on how work is split across threads.

#ifndef UEMBED_RANDOM_H_
#define UEMBED_RANDOM_H_

#include <array>
#include <cstdint>
#include <string_view>

namespace uembed {

enum class Stream : uint32_t {
  kMatrix = 1,
  kDither = 2,
  kMonteCarlo = 3,
  kSignals = 4,
  kDataset = 5,
};

std::string_view stream_name(Stream s);

// Philox4x32 with 10 rounds.
std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key);

class RandomState {
 public:
  explicit RandomState(uint64_t seed, Stream stream = Stream::kMatrix, uint32_t substream = 0)
      : seed_(seed), stream_(stream), substream_(substream) {}

  uint64_t seed() const { return seed_; }
  Stream stream() const { return stream_; }
  uint32_t substream() const { return substream_; }

  RandomState with_stream(Stream s) const { return RandomState(seed_, s, substream_); }
  RandomState with_substream(uint32_t sub) const { return RandomState(seed_, stream_, sub); }
  // Derives an independent state for a nested task (e.g. one sweep cell).
  RandomState derive(uint32_t tag) const;

  // Raw 128-bit block at a given index.
  std::array<uint32_t, 4> block(uint64_t index) const;

  // Uniform on [0, 1) with 53 random bits.
  double uniform(uint64_t index) const;
  // Uniform on (0, 1).
  double uniform_open(uint64_t index) const;
  // Standard normal (Box-Muller on one block).
  double normal(uint64_t index) const;
  // Standard Cauchy via tan(pi (u - 1/2)).
  double cauchy(uint64_t index) const;
  // Uniform integer in [0, n).
  uint64_t below(uint64_t index, uint64_t n) const;

 private:
  uint64_t seed_;
  Stream stream_;
  uint32_t substream_;
};

}  // namespace uembed

#endif  // UEMBED_RANDOM_H_
