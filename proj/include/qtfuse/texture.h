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

#ifndef QTFUSE_TEXTURE_H_
#define QTFUSE_TEXTURE_H_

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qtfuse/image.h"
#include "qtfuse/quant_table.h"

namespace qtfuse {

constexpr int kPatchSize = 64;
constexpr int kPredictionMaxDimension = 2048;

// A 64x64 luminance crop and where it came from.
struct TexturePatch {
  std::vector<uint8_t> pixels;  // kPatchSize * kPatchSize, row-major
  int source_image = 0;
  int x = 0;
  int y = 0;
};

// Number of patches ExtractPatches returns for a width x height image.
size_t PatchCount(int width, int height, int stride);

// Patches at origins (j * stride, k * stride) that fit inside the image,
// row-major by origin. Samples are 8-bit BT.601 luminance.
std::vector<TexturePatch> ExtractPatches(const RasterImage& image, int stride,
                                         int source_image = 0);

RasterImage PatchImage(const TexturePatch& patch);

struct Embedding {
  std::vector<float> values;
  std::string embedder_id;
};

constexpr std::string_view kClassicalEmbedderId = "dct-energy-66";
constexpr size_t kClassicalEmbeddingDim = 66;

// 64 features log(1 + mean |DCT coefficient|) per zigzag position, averaged
// over the patch's 64 blocks (no level shift, so position 0 carries
// brightness), then the patch mean and standard deviation divided by 255.
Embedding EmbedPatch(const TexturePatch& patch);

// Probability distribution over texture ids; zero-weight textures are
// omitted. Weights are non-negative and sum to 1.
class TextureDistribution {
 public:
  static constexpr double kSumTolerance = 1e-9;

  explicit TextureDistribution(std::map<TextureId, double> weights);

  // Histogram of labels, normalized.
  static TextureDistribution FromLabels(std::span<const int> labels);

  const std::map<TextureId, double>& weights() const { return weights_; }
  FusionWeights AsFusionWeights() const { return FusionWeights(weights_); }

 private:
  std::map<TextureId, double> weights_;
};

// Fills a (g*64) x (g*64) gray image from min(n, max_patches) patches drawn
// without replacement, g the smallest integer with g*g >= that count.
// Cells are filled row-major, cycling through the selection.
RasterImage StitchMosaic(std::span<const TexturePatch> patches, int max_patches,
                         uint64_t seed);

}  // namespace qtfuse

#endif  // QTFUSE_TEXTURE_H_
