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

#ifndef QTFUSE_BENCHMARK_H_
#define QTFUSE_BENCHMARK_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qtfuse/jpeg.h"
#include "qtfuse/quant_table.h"
#include "qtfuse/texture.h"
#include "qtfuse/texture_model.h"

namespace qtfuse {

enum class TableKind { kStandard, kFused, kExternal };

std::string_view TableKindName(TableKind kind);

// One encode of one image with one table at one quality.
struct BenchmarkRow {
  std::string file;
  TableKind kind;
  std::string label;  // table file name for kExternal, otherwise the kind
  int quality;
  size_t size;
  double psnr;
  double ssim;
  double fsim;
};

// Mean over images of (variant / standard - 1) * 100 for each column.
struct BenchmarkAggregate {
  TableKind kind;
  std::string label;
  int quality;
  size_t images;
  double size_delta;
  double psnr_delta;
  double ssim_delta;
  double fsim_delta;
};

struct ImageSummary {
  std::string file;
  int width = 0;
  int height = 0;
  std::optional<TextureDistribution> distribution;
  std::map<int, QuantTable> fused_tables;  // by quality
  double predict_fuse_seconds = 0.0;
  std::string error;  // non-empty if the image failed
};

struct NamedTable {
  std::string label;
  TableFile table;
};

struct BenchmarkOptions {
  std::vector<int> qualities = {35, 50, 75, 95};
  std::vector<NamedTable> external_tables;
  Subsampling subsampling = Subsampling::k420;
  int workers = 1;
};

struct BenchmarkReport {
  std::string config;
  std::vector<BenchmarkRow> rows;
  std::vector<BenchmarkAggregate> aggregates;
  std::vector<ImageSummary> images;
};

// Encodes every image at every quality with the standard table, the fused
// table (when `model` has tables) and each external table. Per-image
// failures are recorded in ImageSummary::error and the run continues.
BenchmarkReport RunBenchmark(const std::vector<std::string>& image_paths,
                             const TextureModel* model, const BenchmarkOptions& options);

// Percentage delta (variant / standard - 1) * 100; 0 when equal, which also
// covers two infinite PSNRs.
double PercentDelta(double variant, double standard);

std::vector<BenchmarkAggregate> Aggregate(const std::vector<BenchmarkRow>& rows);

std::string FormatRowsCsv(const BenchmarkReport& report);
std::string FormatAggregatesCsv(const BenchmarkReport& report);
std::string FormatImageJson(const BenchmarkReport& report, const ImageSummary& image);

}  // namespace qtfuse

#endif  // QTFUSE_BENCHMARK_H_
