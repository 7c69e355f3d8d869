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

#ifndef QTFUSE_QUANT_TABLE_H_
#define QTFUSE_QUANT_TABLE_H_

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>

namespace qtfuse {

constexpr size_t kDctBlockSize = 64;

enum class ComponentKind { kLuminance, kChrominance };

std::string_view ComponentKindName(ComponentKind kind);

// 64 quantization step sizes in natural (row-major) order, index 0 = DC.
// Every value lies in [1, 255] so the table fits an 8-bit DQT entry.
class QuantTable {
 public:
  using Values = std::array<int, kDctBlockSize>;

  QuantTable(const Values& values, ComponentKind kind);

  static QuantTable Uniform(int value, ComponentKind kind);

  int operator[](size_t i) const { return values_[i]; }
  const Values& values() const { return values_; }
  ComponentKind kind() const { return kind_; }

  bool operator==(const QuantTable& other) const = default;

 private:
  Values values_;
  ComponentKind kind_;
};

// libjpeg quality knob. The scale is kept as an integer percent, so the
// scaling factor is scale_percent / 100.
struct QualityScale {
  int quality;
  int scale_percent;

  double factor() const { return scale_percent / 100.0; }
};

QualityScale ScaleFactor(int quality);

// Scales every entry (DC included) with libjpeg's integer rounding
// (v * percent + 50) / 100, clamped to [1, 255].
QuantTable ScaleTable(const QuantTable& base, int quality);

// Inverse of ScaleTable up to rounding: recovers a base table from a table
// expressed at `quality`. Fails with kDegenerateScale at quality 100.
QuantTable UnscaleTable(const QuantTable& scaled, int quality);

// Re-expresses a table stored at `from_quality` at `to_quality`.
QuantTable RescaleTable(const QuantTable& table, int from_quality,
                        int to_quality);

using TextureId = int;

// Per-texture weights; every weight is in [0, 1] and they sum to 1.
class FusionWeights {
 public:
  static constexpr double kSumTolerance = 1e-9;

  explicit FusionWeights(std::map<TextureId, double> weights);

  const std::map<TextureId, double>& weights() const { return weights_; }
  size_t size() const { return weights_.size(); }

 private:
  std::map<TextureId, double> weights_;
};

// Weighted elementwise average of per-texture tables, rounded half-up and
// clamped to [1, 255]. `tables` and `weights` must cover the same ids.
QuantTable Fuse(const std::map<TextureId, QuantTable>& tables,
                const FusionWeights& weights);

// JPEG Annex K example tables, natural order.
const QuantTable& StandardLuminanceTable();
const QuantTable& StandardChrominanceTable();

// A table together with the quality it is expressed at. This is what the
// text format stores.
struct TableFile {
  QuantTable table;
  int quality;
};

// Header line "qtable <luminance|chrominance> <quality>" followed by eight
// lines of eight space-separated integers.
std::string FormatTable(const TableFile& file);
TableFile ParseTable(std::string_view text);
TableFile ReadTableFile(const std::string& path);
void WriteTableFile(const std::string& path, const TableFile& file);

// "texture_id weight" per line; blank lines and '#' comments are ignored.
std::string FormatWeights(const FusionWeights& weights);
FusionWeights ParseWeights(std::string_view text);

}  // namespace qtfuse

#endif  // QTFUSE_QUANT_TABLE_H_
