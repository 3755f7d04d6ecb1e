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

#include "uembed/random.h"

#include <cmath>
#include <numbers>

namespace uembed {

namespace {

constexpr uint32_t kMul0 = 0xD2511F53u;
constexpr uint32_t kMul1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;
constexpr uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  uint64_t p = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(p >> 32);
  lo = static_cast<uint32_t>(p);
}

double to_unit(uint32_t hi, uint32_t lo) {
  uint64_t bits = (static_cast<uint64_t>(hi) << 21) ^ (lo >> 11);
  return static_cast<double>(bits & ((uint64_t{1} << 53) - 1)) * 0x1.0p-53;
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::string_view stream_name(Stream s) {
  switch (s) {
    case Stream::kMatrix: return "matrix";
    case Stream::kDither: return "dither";
    case Stream::kMonteCarlo: return "montecarlo";
    case Stream::kSignals: return "signals";
    case Stream::kDataset: return "dataset";
  }
  return "unknown";
}

std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> c, std::array<uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

RandomState RandomState::derive(uint32_t tag) const {
  uint64_t mixed = splitmix64(seed_ ^ splitmix64((static_cast<uint64_t>(substream_) << 32) | tag));
  return RandomState(mixed, stream_, substream_);
}

std::array<uint32_t, 4> RandomState::block(uint64_t index) const {
  std::array<uint32_t, 4> ctr = {static_cast<uint32_t>(index), static_cast<uint32_t>(index >> 32),
                                 static_cast<uint32_t>(stream_), substream_};
  std::array<uint32_t, 2> key = {static_cast<uint32_t>(seed_), static_cast<uint32_t>(seed_ >> 32)};
  return philox4x32(ctr, key);
}

double RandomState::uniform(uint64_t index) const {
  auto b = block(index);
  return to_unit(b[0], b[1]);
}

double RandomState::uniform_open(uint64_t index) const {
  auto b = block(index);
  uint64_t bits = ((static_cast<uint64_t>(b[0]) << 20) ^ (b[1] >> 12)) & ((uint64_t{1} << 52) - 1);
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
}

double RandomState::normal(uint64_t index) const {
  auto b = block(index);
  double u1 = (static_cast<double>(((static_cast<uint64_t>(b[0]) << 20) ^ (b[1] >> 12)) &
                                   ((uint64_t{1} << 52) - 1)) + 0.5) * 0x1.0p-52;
  double u2 = to_unit(b[2], b[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RandomState::cauchy(uint64_t index) const {
  return std::tan(std::numbers::pi * (uniform_open(index) - 0.5));
}

uint64_t RandomState::below(uint64_t index, uint64_t n) const {
  auto b = block(index);
  uint64_t x = (static_cast<uint64_t>(b[0]) << 32) | b[1];
  // Multiply-shift on 64 bits; the bias is below 2^-64 * n.
  return static_cast<uint64_t>((static_cast<unsigned __int128>(x) * n) >> 64);
}

}  // namespace uembed
