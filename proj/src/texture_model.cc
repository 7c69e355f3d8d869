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

#include "qtfuse/texture_model.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "byte_io.h"
#include "qtfuse/error.h"
#include "qtfuse/file_util.h"
#include "qtfuse/kmeans.h"
#include "qtfuse/parallel.h"

namespace qtfuse {

namespace {

constexpr uint16_t kModelVersion = 1;

}  // namespace

void ValidateModel(const TextureModel& model) {
  if (model.centroids.empty()) Fail(ErrorCode::kFormat, "model has no centroids");
  std::set<std::vector<float>> seen;
  for (const auto& c : model.centroids) {
    if (c.size() != model.dim) Fail(ErrorCode::kFormat, "centroid length differs from dim");
    for (float v : c) {
      if (!std::isfinite(v)) Fail(ErrorCode::kFormat, "non-finite centroid value");
    }
    if (!seen.insert(c).second) Fail(ErrorCode::kFormat, "duplicate centroids");
  }
  for (const auto& [id, table] : model.tables) {
    if (id < 0 || id >= model.k()) {
      Fail(ErrorCode::kFormat, "table for unknown texture " + std::to_string(id));
    }
    if (table.kind() != ComponentKind::kLuminance) {
      Fail(ErrorCode::kFormat, "texture tables must be luminance tables");
    }
  }
  if (!model.tables.empty() && (model.anneal_quality < 1 || model.anneal_quality > 100)) {
    Fail(ErrorCode::kFormat, "model with tables needs an annealing quality in [1, 100]");
  }
}

std::vector<uint8_t> SerializeModel(const TextureModel& model) {
  ValidateModel(model);
  internal::ByteWriter w;
  w.Tag("JQFM");
  w.U16(kModelVersion);
  w.String16(model.embedder_id);
  w.U32(static_cast<uint32_t>(model.centroids.size()));
  w.U32(model.dim);
  w.U32(static_cast<uint32_t>(model.anneal_quality));
  for (const auto& c : model.centroids) {
    for (float v : c) w.F32(v);
  }
  for (int t = 0; t < model.k(); ++t) {
    auto it = model.tables.find(t);
    w.String32(it == model.tables.end()
                   ? std::string()
                   : FormatTable({it->second, model.anneal_quality}));
  }
  w.String32(model.config);
  return w.Take();
}

TextureModel ParseModel(std::span<const uint8_t> bytes) {
  internal::ByteReader r(bytes, "model file");
  r.ExpectTag("JQFM");
  const uint16_t version = r.U16();
  if (version != kModelVersion) r.Error("unsupported version " + std::to_string(version));
  TextureModel model;
  model.embedder_id = r.String16();
  const uint32_t k = r.U32();
  model.dim = r.U32();
  model.anneal_quality = static_cast<int>(r.U32());
  if (k == 0 || model.dim == 0) r.Error("empty model");
  if (static_cast<uint64_t>(k) * model.dim * 4 > r.remaining()) r.Error("truncated centroids");
  model.centroids.assign(k, std::vector<float>(model.dim));
  for (auto& c : model.centroids) {
    for (float& v : c) v = r.F32();
  }
  for (uint32_t t = 0; t < k; ++t) {
    const std::string text = r.String32();
    if (text.empty()) continue;
    TableFile file = ParseTable(text);
    if (file.quality != model.anneal_quality) {
      r.Error("table quality differs from the model's annealing quality");
    }
    model.tables.emplace(static_cast<TextureId>(t), file.table);
  }
  model.config = r.String32();
  if (!r.AtEnd()) r.Error("trailing bytes");
  ValidateModel(model);
  return model;
}

TextureModel ReadModelFile(const std::string& path) {
  const auto bytes = ReadFileBytes(path);
  try {
    return ParseModel(bytes);
  } catch (const Error& e) {
    Fail(e.code(), path + ": " + e.what());
  }
}

void WriteModelFile(const std::string& path, const TextureModel& model) {
  WriteFileBytes(path, SerializeModel(model));
}

RasterImage PredictionImage(const RasterImage& image) {
  RasterImage luma = LumaImage(image);
  const int longest = std::max(image.width(), image.height());
  if (longest <= kPredictionMaxDimension) return luma;
  const double s = static_cast<double>(kPredictionMaxDimension) / longest;
  const int w = image.width() >= image.height()
                    ? kPredictionMaxDimension
                    : std::max(1, static_cast<int>(std::lround(image.width() * s)));
  const int h = image.height() > image.width()
                    ? kPredictionMaxDimension
                    : std::max(1, static_cast<int>(std::lround(image.height() * s)));
  return ResizeBilinear(luma, w, h);
}

std::vector<int> PredictLabels(const RasterImage& image, const TextureModel& model,
                               int workers) {
  if (model.embedder_id != kClassicalEmbedderId) {
    Fail(ErrorCode::kInvalidArgument,
         "model uses embedder '" + model.embedder_id +
             "'; supply per-patch labels from that embedder instead");
  }
  const RasterImage small = PredictionImage(image);
  const auto patches = ExtractPatches(small, kPatchSize);
  std::vector<int> labels(patches.size());
  ParallelFor(patches.size(), workers, [&](size_t i) {
    labels[i] = NearestCentroid(EmbedPatch(patches[i]).values, model.centroids);
  });
  return labels;
}

TextureDistribution PredictDistribution(const RasterImage& image,
                                        const TextureModel& model, int workers) {
  const auto labels = PredictLabels(image, model, workers);
  return TextureDistribution::FromLabels(labels);
}

TextureDistribution DistributionFromLabels(std::span<const uint16_t> labels,
                                           const TextureModel& model) {
  std::vector<int> ids(labels.begin(), labels.end());
  for (int id : ids) {
    if (id >= model.k()) {
      Fail(ErrorCode::kInvalidArgument, "label " + std::to_string(id) +
                                            " out of range for K=" +
                                            std::to_string(model.k()));
    }
  }
  return TextureDistribution::FromLabels(ids);
}

QuantTable FusedTable(const TextureModel& model, const TextureDistribution& dist,
                      int target_quality) {
  if (!model.has_tables()) Fail(ErrorCode::kInvalidArgument, "model has no annealed tables");
  std::map<TextureId, QuantTable> used;
  for (const auto& [id, w] : dist.weights()) {
    auto it = model.tables.find(id);
    if (it == model.tables.end()) {
      Fail(ErrorCode::kInvalidArgument, "no table for texture " + std::to_string(id));
    }
    used.emplace(id, it->second);
  }
  const QuantTable fused = Fuse(used, dist.AsFusionWeights());
  return RescaleTable(fused, model.anneal_quality, target_quality);
}

}  // namespace qtfuse
