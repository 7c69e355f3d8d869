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

#ifndef QTFUSE_COMMANDS_H_
#define QTFUSE_COMMANDS_H_

// The workflows behind the command-line subcommands. Each takes a plain
// options struct so it can be driven from tests as well as from the CLI.
// None of them modifies its inputs.

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qtfuse/annealer.h"
#include "qtfuse/benchmark.h"
#include "qtfuse/jpeg.h"
#include "qtfuse/metrics.h"
#include "qtfuse/quant_table.h"
#include "qtfuse/texture.h"
#include "qtfuse/texture_model.h"

namespace qtfuse {

// Image files (.png, .ppm, .pgm, .pnm) directly inside `dir`, sorted by
// name. Throws kNotFound when there are none.
std::vector<std::string> ListImages(const std::string& dir);

// Reads PNG/PNM, or decodes a JPEG (detected by its SOI marker).
RasterImage ReadAnyImage(const std::string& path);

// Default location of the patch assignment CSV written next to a model.
std::string AssignmentsPathFor(const std::string& model_path);

// ---- cluster ----------------------------------------------------------

struct ClusterOptions {
  std::string corpus_dir;
  std::string model_path;
  std::string assignments_path;  // empty: AssignmentsPathFor(model_path)
  int k = 8;
  int stride = 256;
  uint64_t seed = 1;
  int max_images = 0;            // 0: all
  std::string embeddings_path;   // exchange file replacing the built-in embedder
  std::string dump_patches_dir;  // write every patch as PNG, in patch order
  int workers = 1;
};

struct PatchRecord {
  std::string image;  // file name inside the corpus directory
  int x;
  int y;
  int texture;
};

struct ClusterResult {
  TextureModel model;
  std::vector<PatchRecord> patches;
  int iterations;
};

ClusterResult RunCluster(const ClusterOptions& options, std::ostream& log);

std::string FormatAssignments(const std::vector<PatchRecord>& patches);
std::vector<PatchRecord> ParseAssignments(std::string_view text);

// ---- anneal -----------------------------------------------------------

struct AnnealCommandOptions {
  std::string model_path;
  std::string corpus_dir;
  std::string output_path;
  std::string assignments_path;  // empty: AssignmentsPathFor(model_path)
  std::string trace_dir;         // empty: no traces, mosaics or table files
  AnnealConfig config;
  int max_patches = 225;
  int workers = 1;
};

TextureModel RunAnneal(const AnnealCommandOptions& options, std::ostream& log);

// ---- compress ---------------------------------------------------------

struct CompressOptions {
  std::string image_path;
  std::string model_path;
  std::string output_path;
  std::string report_path;  // empty: output_path + ".json"
  std::string labels_path;  // exchange file whose label block overrides prediction
  int quality = 50;
  Subsampling subsampling = Subsampling::k420;
  int workers = 1;
};

struct CompressResult {
  TextureDistribution distribution;
  QuantTable fused;
  size_t fused_size;
  size_t standard_size;
  std::array<QualityScore, 3> fused_scores;  // psnr, ssim, fsim
  std::array<QualityScore, 3> standard_scores;
  double predict_fuse_seconds;
};

CompressResult RunCompress(const CompressOptions& options, std::ostream& log);

// ---- benchmark --------------------------------------------------------

struct BenchmarkCommandOptions {
  std::string corpus_dir;
  std::string model_path;  // optional
  std::vector<std::string> table_paths;
  std::string output_dir;
  BenchmarkOptions benchmark;
  int max_images = 0;
};

BenchmarkReport RunBenchmarkCommand(const BenchmarkCommandOptions& options,
                                    std::ostream& log);

// ---- metrics ----------------------------------------------------------

// CSV "file,psnr,ssim,fsim", one row per distorted image.
std::string RunMetrics(const std::string& reference_path,
                       const std::vector<std::string>& distorted_paths);

// ---- visualize --------------------------------------------------------

// 8x8 grid of `table` values, each followed by '+' (above the baseline),
// '-' (below) or ' ' (equal).
std::string TableDiffText(const TableFile& table, const TableFile& baseline);

// Standalone HTML page: increases in red, decreases in blue.
std::string TableDiffHtml(const TableFile& table, const TableFile& baseline,
                          const std::string& title);

}  // namespace qtfuse

#endif  // QTFUSE_COMMANDS_H_
