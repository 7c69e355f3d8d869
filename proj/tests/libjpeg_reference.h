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

#ifndef QTFUSE_TESTS_LIBJPEG_REFERENCE_H_
#define QTFUSE_TESTS_LIBJPEG_REFERENCE_H_

// Thin wrappers around the system libjpeg, used as an independent encoder
// and decoder in tests.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qtfuse/image.h"
#include "qtfuse/jpeg.h"

namespace qtfuse::testing {

// Encodes with libjpeg's own quality scaling of the Annex K tables,
// baseline, default (non-optimized) Huffman tables. Gray input is expanded
// to RGB so the stream has three components, as ours does.
std::vector<uint8_t> LibjpegEncode(const RasterImage& image, int quality,
                                   Subsampling subsampling);

struct LibjpegImage {
  bool ok = false;
  std::string error;
  int warnings = 0;
  int width = 0;
  int height = 0;
  int components = 0;
  // Quantization tables as libjpeg parsed them, natural order.
  std::vector<std::array<int, 64>> quant_tables;
  RasterImage image{8, 8, ColorSpace::kGray};  // kRgb or kGray
};

LibjpegImage LibjpegDecode(std::span<const uint8_t> bytes);

}  // namespace qtfuse::testing

#endif  // QTFUSE_TESTS_LIBJPEG_REFERENCE_H_
