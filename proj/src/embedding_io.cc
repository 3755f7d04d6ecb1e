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

#include "uembed/embedding_io.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "uembed/csv.h"
#include "uembed/error.h"

namespace uembed {

namespace {

constexpr char kMagic[4] = {'U', 'E', 'M', 'B'};
constexpr uint16_t kFlagBinary = 1;

template <typename T>
void put(std::ostream& os, T v) {
  unsigned char b[sizeof(T)];
  for (size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get(std::istream& is, const char* what) {
  unsigned char b[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(T)))
    throw FormatError(std::string("truncated embedding file while reading ") + what);
  T v = 0;
  for (size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(b[i]) << (8 * i));
  return v;
}

bool is_binary(const std::vector<EmbeddingVector>& ys) {
  if (ys.empty()) return false;
  for (const auto& y : ys)
    for (double v : y.values)
      if (!(v == 0.0 && !std::signbit(v)) && v != 1.0) return false;
  return true;
}

}  // namespace

void write_embeddings(std::ostream& os, const std::vector<EmbeddingVector>& ys) {
  const size_t M = ys.empty() ? 0 : ys.front().values.size();
  const std::string id = ys.empty() ? std::string() : ys.front().map_id;
  const auto qbits = ys.empty() ? std::optional<int>() : ys.front().quantized_bits;
  for (const auto& y : ys) {
    if (y.values.size() != M) throw InvalidArgument("embeddings in one file must share M");
    if (y.map_id != id || y.quantized_bits != qbits)
      throw InvalidArgument("embeddings in one file must share provenance");
  }
  if (M > 0xFFFFFFFFu || id.size() > 0xFFFFFFFFu) throw InvalidArgument("embedding too large");
  if (qbits && (*qbits < 1 || *qbits > 255)) throw InvalidArgument("bit depth out of range");
  const bool binary = is_binary(ys);
  uint16_t flags = binary ? kFlagBinary : 0;
  if (qbits) flags |= static_cast<uint16_t>(*qbits << 8);

  os.write(kMagic, 4);
  put<uint16_t>(os, kEmbeddingFileVersion);
  put<uint16_t>(os, flags);
  put<uint32_t>(os, static_cast<uint32_t>(M));
  put<uint64_t>(os, ys.size());
  put<uint32_t>(os, static_cast<uint32_t>(id.size()));
  os.write(id.data(), static_cast<std::streamsize>(id.size()));
  for (const auto& y : ys) {
    if (binary) {
      std::vector<unsigned char> bytes((M + 7) / 8, 0);
      for (size_t i = 0; i < M; ++i)
        if (y.values[i] == 1.0) bytes[i / 8] |= static_cast<unsigned char>(1u << (i % 8));
      os.write(reinterpret_cast<const char*>(bytes.data()),
               static_cast<std::streamsize>(bytes.size()));
    } else {
      for (double v : y.values) put<uint64_t>(os, std::bit_cast<uint64_t>(v));
    }
  }
  if (!os) throw std::runtime_error("failed writing embeddings");
}

std::vector<EmbeddingVector> read_embeddings(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4)) throw FormatError("truncated embedding file while reading magic");
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("bad embedding file magic");
  const auto version = get<uint16_t>(is, "version");
  if (version != kEmbeddingFileVersion)
    throw FormatError("unsupported embedding file version " + std::to_string(version));
  const auto flags = get<uint16_t>(is, "flags");
  if (flags & 0x00FE) throw FormatError("unknown embedding file flags");
  const auto M = get<uint32_t>(is, "M");
  const auto count = get<uint64_t>(is, "count");
  const auto idlen = get<uint32_t>(is, "id length");
  std::string id(idlen, '\0');
  if (idlen && !is.read(id.data(), idlen))
    throw FormatError("truncated embedding file while reading id");
  const bool binary = flags & kFlagBinary;
  const int qbits = flags >> 8;
  const size_t row_bytes = binary ? (static_cast<size_t>(M) + 7) / 8 : static_cast<size_t>(M) * 8;

  std::vector<EmbeddingVector> ys;
  std::vector<unsigned char> buf(row_bytes);
  for (uint64_t c = 0; c < count; ++c) {
    if (row_bytes && !is.read(reinterpret_cast<char*>(buf.data()),
                              static_cast<std::streamsize>(row_bytes)))
      throw FormatError("truncated embedding file at vector " + std::to_string(c));
    EmbeddingVector y;
    y.map_id = id;
    if (qbits) y.quantized_bits = qbits;
    y.values.resize(M);
    for (size_t i = 0; i < M; ++i) {
      if (binary) {
        y.values[i] = (buf[i / 8] >> (i % 8)) & 1u ? 1.0 : 0.0;
      } else {
        uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<uint64_t>(buf[i * 8 + b]) << (8 * b);
        y.values[i] = std::bit_cast<double>(bits);
      }
    }
    ys.push_back(std::move(y));
  }
  return ys;
}

void save_embeddings(const std::string& path, const std::vector<EmbeddingVector>& ys) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_embeddings(os, ys);
  os.close();
  if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

std::vector<EmbeddingVector> load_embeddings(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return read_embeddings(is);
}

void export_embeddings_csv(const std::string& path, const std::vector<EmbeddingVector>& ys) {
  CsvTable t;
  t.header.push_back("id");
  const size_t M = ys.empty() ? 0 : ys.front().values.size();
  for (size_t i = 0; i < M; ++i) t.header.push_back("v" + std::to_string(i));
  for (size_t r = 0; r < ys.size(); ++r) {
    if (ys[r].values.size() != M) throw InvalidArgument("embeddings must share M");
    std::vector<std::string> row{std::to_string(r)};
    for (double v : ys[r].values) row.push_back(format_number(v));
    t.rows.push_back(std::move(row));
  }
  write_csv(path, t);
}

}  // namespace uembed
