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

// Embedding file layout, all little-endian:
//
//   "UEMB"            4 bytes
//   version           u16 (= 1)
//   flags             u16: bit 0 set when values are packed bits,
//                          bits 8..15 post-quantization depth (0 = none)
//   M                 u32
//   count             u64
//   id length         u32, followed by that many bytes of provenance text
//   payload           count * M f64, or count * ceil(M / 8) bytes of bits
//                     (coordinate i of a vector in bit i % 8 of byte i / 8)
//
// Every vector in a file shares M, provenance and quantization depth.

#ifndef UEMBED_EMBEDDING_IO_H_
#define UEMBED_EMBEDDING_IO_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "uembed/embedder.h"

namespace uembed {

inline constexpr uint16_t kEmbeddingFileVersion = 1;

void write_embeddings(std::ostream& os, const std::vector<EmbeddingVector>& ys);
std::vector<EmbeddingVector> read_embeddings(std::istream& is);

void save_embeddings(const std::string& path, const std::vector<EmbeddingVector>& ys);
std::vector<EmbeddingVector> load_embeddings(const std::string& path);

// CSV with header id,v0,...,v{M-1}.
void export_embeddings_csv(const std::string& path, const std::vector<EmbeddingVector>& ys);

}  // namespace uembed

#endif  // UEMBED_EMBEDDING_IO_H_
