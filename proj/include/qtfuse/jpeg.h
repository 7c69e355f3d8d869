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

#ifndef QTFUSE_JPEG_H_
#define QTFUSE_JPEG_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "qtfuse/image.h"
#include "qtfuse/quant_table.h"

namespace qtfuse {

enum class Subsampling { k420, k444 };

std::string_view SubsamplingName(Subsampling s);
Subsampling ParseSubsampling(std::string_view name);

struct EncodeOptions {
  Subsampling subsampling = Subsampling::k420;
  // Two-pass per-image Huffman tables. Off by default so that size
  // differences come from the quantization tables alone.
  bool optimize_huffman = false;
};

// An encoded JFIF stream. Always starts with SOI (FF D8) and ends with
// EOI (FF D9).
class JpegBlob {
 public:
  explicit JpegBlob(std::vector<uint8_t> bytes);

  const std::vector<uint8_t>& bytes() const { return bytes_; }
  size_t size() const { return bytes_.size(); }

  bool operator==(const JpegBlob& other) const = default;

 private:
  std::vector<uint8_t> bytes_;
};

// Baseline sequential, Huffman-coded, three-component YCbCr JFIF. Gray
// input is coded with neutral chroma so the stream always carries a
// luminance and a chrominance table. Deterministic.
JpegBlob Encode(const RasterImage& image, const QuantTable& luma,
                const QuantTable& chroma, const EncodeOptions& options = {});

// Decodes baseline sequential streams with 1 or 3 components. Three
// components come back as full-resolution kYCbCr, one as kGray.
// Malformed input raises ParseError carrying the byte offset.
RasterImage Decode(std::span<const uint8_t> bytes);
inline RasterImage Decode(const JpegBlob& blob) { return Decode(blob.bytes()); }

inline size_t CompressedSize(const JpegBlob& blob) { return blob.size(); }

// One table from a DQT segment, in natural order. `slot` is Tq (0..3).
struct DqtTable {
  int slot;
  int precision_bits;
  std::array<int, 64> values;
};

// Every DQT table in stream order, without decoding the image.
std::vector<DqtTable> ReadDqtTables(std::span<const uint8_t> bytes);

}  // namespace qtfuse

#endif  // QTFUSE_JPEG_H_
