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

#include "qtfuse/texture.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qtfuse/dct.h"
#include "qtfuse/error.h"
#include "qtfuse/rng.h"

namespace qtfuse {

size_t PatchCount(int width, int height, int stride) {
  if (width < kPatchSize || height < kPatchSize || stride < 1) return 0;
  return static_cast<size_t>((width - kPatchSize) / stride + 1) *
         static_cast<size_t>((height - kPatchSize) / stride + 1);
}

std::vector<TexturePatch> ExtractPatches(const RasterImage& image, int stride,
                                         int source_image) {
  Require(stride >= 1, "patch stride must be >= 1");
  if (image.width() < kPatchSize || image.height() < kPatchSize) {
    Fail(ErrorCode::kInvalidArgument,
         "image " + std::to_string(image.width()) + "x" +
             std::to_string(image.height()) + " is smaller than one 64x64 patch");
  }
  const RasterImage luma = LumaImage(image);
  std::vector<TexturePatch> patches;
  patches.reserve(PatchCount(image.width(), image.height(), stride));
  for (int y = 0; y + kPatchSize <= image.height(); y += stride) {
    for (int x = 0; x + kPatchSize <= image.width(); x += stride) {
      TexturePatch p;
      p.source_image = source_image;
      p.x = x;
      p.y = y;
      p.pixels.resize(kPatchSize * kPatchSize);
      for (int r = 0; r < kPatchSize; ++r) {
        for (int c = 0; c < kPatchSize; ++c) {
          p.pixels[r * kPatchSize + c] = luma.at(0, x + c, y + r);
        }
      }
      patches.push_back(std::move(p));
    }
  }
  return patches;
}

RasterImage PatchImage(const TexturePatch& patch) {
  RasterImage out(kPatchSize, kPatchSize, ColorSpace::kGray);
  std::ranges::copy(patch.pixels, out.plane(0).begin());
  return out;
}

Embedding EmbedPatch(const TexturePatch& patch) {
  Require(patch.pixels.size() == kPatchSize * kPatchSize, "patch must be 64x64");
  std::array<double, 64> energy{};
  float block[64], coef[64];
  constexpr int kBlocks = kPatchSize / 8;
  for (int by = 0; by < kBlocks; ++by) {
    for (int bx = 0; bx < kBlocks; ++bx) {
      for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
          block[y * 8 + x] = patch.pixels[(by * 8 + y) * kPatchSize + bx * 8 + x];
        }
      }
      ForwardDct8x8(block, coef);
      for (int k = 0; k < 64; ++k) energy[k] += std::abs(coef[kZigzag[k]]);
    }
  }
  Embedding e;
  e.embedder_id = std::string(kClassicalEmbedderId);
  e.values.resize(kClassicalEmbeddingDim);
  for (int k = 0; k < 64; ++k) {
    e.values[k] = static_cast<float>(std::log1p(energy[k] / (kBlocks * kBlocks)));
  }
  double sum = 0.0, sum_sq = 0.0;
  for (uint8_t v : patch.pixels) {
    sum += v;
    sum_sq += static_cast<double>(v) * v;
  }
  const double n = static_cast<double>(patch.pixels.size());
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean);
  e.values[64] = static_cast<float>(mean / 255.0);
  e.values[65] = static_cast<float>(std::sqrt(var) / 255.0);
  return e;
}

TextureDistribution::TextureDistribution(std::map<TextureId, double> weights) {
  double sum = 0.0;
  for (const auto& [id, w] : weights) {
    if (!(w >= 0.0)) Fail(ErrorCode::kInvalidArgument, "negative texture weight");
    sum += w;
    if (w > 0.0) weights_.emplace(id, w);
  }
  if (weights_.empty() || std::abs(sum - 1.0) > kSumTolerance) {
    Fail(ErrorCode::kInvalidArgument, "texture weights must sum to 1");
  }
}

TextureDistribution TextureDistribution::FromLabels(std::span<const int> labels) {
  Require(!labels.empty(), "no patch labels");
  std::map<TextureId, size_t> counts;
  for (int l : labels) {
    Require(l >= 0, "negative texture label");
    ++counts[l];
  }
  std::map<TextureId, double> weights;
  for (const auto& [id, c] : counts) {
    weights[id] = static_cast<double>(c) / static_cast<double>(labels.size());
  }
  return TextureDistribution(std::move(weights));
}

RasterImage StitchMosaic(std::span<const TexturePatch> patches, int max_patches,
                         uint64_t seed) {
  if (patches.empty()) Fail(ErrorCode::kInvalidArgument, "no patches to stitch");
  Require(max_patches >= 1, "max_patches must be >= 1");
  const size_t count = std::min(patches.size(), static_cast<size_t>(max_patches));
  std::vector<size_t> order(patches.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (size_t i = 0; i < count; ++i) {
    const size_t j = i + rng.Below(order.size() - i);
    std::swap(order[i], order[j]);
  }
  int grid = 1;
  while (static_cast<size_t>(grid) * grid < count) ++grid;
  RasterImage out(grid * kPatchSize, grid * kPatchSize, ColorSpace::kGray);
  for (int cell = 0; cell < grid * grid; ++cell) {
    const TexturePatch& p = patches[order[cell % count]];
    Require(p.pixels.size() == kPatchSize * kPatchSize, "patch must be 64x64");
    const int ox = (cell % grid) * kPatchSize, oy = (cell / grid) * kPatchSize;
    for (int r = 0; r < kPatchSize; ++r) {
      std::copy_n(&p.pixels[r * kPatchSize], kPatchSize, &out.at(0, ox, oy + r));
    }
  }
  return out;
}

}  // namespace qtfuse
