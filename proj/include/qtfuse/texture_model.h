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

#ifndef QTFUSE_TEXTURE_MODEL_H_
#define QTFUSE_TEXTURE_MODEL_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qtfuse/image.h"
#include "qtfuse/quant_table.h"
#include "qtfuse/texture.h"

namespace qtfuse {

// K centroids in embedding space plus, once annealed, one luminance table
// per texture id (0..K-1) expressed at anneal_quality.
struct TextureModel {
  std::string embedder_id;
  uint32_t dim = 0;
  std::vector<std::vector<float>> centroids;
  std::map<TextureId, QuantTable> tables;
  int anneal_quality = 0;  // 0 until tables are filled
  std::string config;      // free-form provenance, echoed into outputs

  int k() const { return static_cast<int>(centroids.size()); }
  bool has_tables() const { return !centroids.empty() && tables.size() == centroids.size(); }
};

// Checks K >= 1, consistent dimensions, pairwise distinct centroids and
// table ids/kinds. Throws kFormat.
void ValidateModel(const TextureModel& model);

// Binary model file, little-endian:
//   "JQFM" u16 version | u16 id length, embedder id | u32 K | u32 dim |
//   u32 anneal quality | K*dim f32 centroids |
//   K times: u32 length + table text (length 0 = no table) |
//   u32 length + config text.
std::vector<uint8_t> SerializeModel(const TextureModel& model);
TextureModel ParseModel(std::span<const uint8_t> bytes);
TextureModel ReadModelFile(const std::string& path);
void WriteModelFile(const std::string& path, const TextureModel& model);

// The image prediction runs on: luminance, bilinearly shrunk so that the
// larger side is at most kPredictionMaxDimension.
RasterImage PredictionImage(const RasterImage& image);

// Nearest-centroid label of every non-overlapping 64x64 patch of
// PredictionImage(image), row-major. Needs a model built with the built-in
// embedder.
std::vector<int> PredictLabels(const RasterImage& image, const TextureModel& model,
                               int workers = 1);

TextureDistribution PredictDistribution(const RasterImage& image,
                                        const TextureModel& model, int workers = 1);

// Distribution from externally supplied per-patch labels (the label block
// of an exchange file). Labels must be < K.
TextureDistribution DistributionFromLabels(std::span<const uint16_t> labels,
                                           const TextureModel& model);

// Fuses the model's tables with the distribution's weights at the
// annealing quality, then re-expresses the result at target_quality.
QuantTable FusedTable(const TextureModel& model, const TextureDistribution& dist,
                      int target_quality);

}  // namespace qtfuse

#endif  // QTFUSE_TEXTURE_MODEL_H_
