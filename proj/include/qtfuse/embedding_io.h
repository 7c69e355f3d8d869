/*
 * Copyright 2026 The qtfuse Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef QTFUSE_EMBEDDING_IO_H_
#define QTFUSE_EMBEDDING_IO_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qtfuse/texture.h"

namespace qtfuse {

// Embedding exchange file, little-endian:
//   "JQFE" u16 version=1 | u16 id length, ASCII embedder id |
//   u32 count | u32 dim | count*dim f32 row-major |
//   optional: "LBLS" u32 count, count u16 labels.
// A labels-only file (per-patch texture labels for one image) has count 0.
struct EmbeddingFile {
  std::string embedder_id;
  uint32_t dim = 0;
  std::vector<std::vector<float>> vectors;
  std::optional<std::vector<uint16_t>> labels;
};

constexpr uint16_t kEmbeddingFormatVersion = 1;

std::vector<uint8_t> SerializeEmbeddings(const EmbeddingFile& file);
EmbeddingFile ParseEmbeddings(std::span<const uint8_t> bytes);
EmbeddingFile ReadEmbeddingFile(const std::string& path);
void WriteEmbeddingFile(const std::string& path, const EmbeddingFile& file);

// (patch index, embedding) pairs, with the embedder id from the header.
std::vector<std::pair<size_t, Embedding>> ImportEmbeddings(const std::string& path);

}  // namespace qtfuse

#endif  // QTFUSE_EMBEDDING_IO_H_
