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

#include "qtfuse/embedding_io.h"

#include <cmath>

#include "byte_io.h"
#include "qtfuse/error.h"
#include "qtfuse/file_util.h"

namespace qtfuse {

using internal::ByteReader;
using internal::ByteWriter;

std::vector<uint8_t> SerializeEmbeddings(const EmbeddingFile& file) {
  for (const auto& v : file.vectors) {
    if (v.size() != file.dim) Fail(ErrorCode::kFormat, "embedding length differs from dim");
  }
  if (file.labels && !file.vectors.empty() &&
      file.labels->size() != file.vectors.size()) {
    Fail(ErrorCode::kFormat, "label count differs from embedding count");
  }
  ByteWriter w;
  w.Tag("JQFE");
  w.U16(kEmbeddingFormatVersion);
  w.String16(file.embedder_id);
  w.U32(static_cast<uint32_t>(file.vectors.size()));
  w.U32(file.dim);
  for (const auto& v : file.vectors) {
    for (float x : v) w.F32(x);
  }
  if (file.labels) {
    w.Tag("LBLS");
    w.U32(static_cast<uint32_t>(file.labels->size()));
    for (uint16_t l : *file.labels) w.U16(l);
  }
  return w.Take();
}

EmbeddingFile ParseEmbeddings(std::span<const uint8_t> bytes) {
  ByteReader r(bytes, "embedding file");
  r.ExpectTag("JQFE");
  const uint16_t version = r.U16();
  if (version != kEmbeddingFormatVersion) {
    r.Error("unsupported version " + std::to_string(version));
  }
  EmbeddingFile file;
  file.embedder_id = r.String16();
  const uint32_t count = r.U32();
  file.dim = r.U32();
  if (count > 0 && file.dim == 0) r.Error("zero dimension");
  if (static_cast<uint64_t>(count) * file.dim * 4 > r.remaining()) {
    r.Error("payload shorter than " + std::to_string(count) + "x" +
            std::to_string(file.dim) + " floats");
  }
  file.vectors.resize(count);
  for (auto& v : file.vectors) {
    v.resize(file.dim);
    for (float& x : v) {
      x = r.F32();
      if (!std::isfinite(x)) r.Error("non-finite embedding value");
    }
  }
  if (!r.AtEnd()) {
    r.ExpectTag("LBLS");
    const uint32_t n = r.U32();
    if (count > 0 && n != count) r.Error("label count differs from embedding count");
    r.Need(static_cast<size_t>(n) * 2);
    std::vector<uint16_t> labels(n);
    for (auto& l : labels) l = r.U16();
    file.labels = std::move(labels);
    if (!r.AtEnd()) r.Error("trailing bytes");
  }
  return file;
}

EmbeddingFile ReadEmbeddingFile(const std::string& path) {
  const auto bytes = ReadFileBytes(path);
  try {
    return ParseEmbeddings(bytes);
  } catch (const Error& e) {
    Fail(e.code(), path + ": " + e.what());
  }
}

void WriteEmbeddingFile(const std::string& path, const EmbeddingFile& file) {
  WriteFileBytes(path, SerializeEmbeddings(file));
}

std::vector<std::pair<size_t, Embedding>> ImportEmbeddings(const std::string& path) {
  EmbeddingFile file = ReadEmbeddingFile(path);
  std::vector<std::pair<size_t, Embedding>> out;
  out.reserve(file.vectors.size());
  for (size_t i = 0; i < file.vectors.size(); ++i) {
    out.emplace_back(i, Embedding{std::move(file.vectors[i]), file.embedder_id});
  }
  return out;
}

}  // namespace qtfuse
