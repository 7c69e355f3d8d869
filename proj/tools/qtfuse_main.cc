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

// Command-line front end: cluster | anneal | compress | benchmark |
// metrics | visualize.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "qtfuse/commands.h"
#include "qtfuse/error.h"
#include "qtfuse/file_util.h"

namespace {

using namespace qtfuse;

int DefaultWorkers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

void AddWorkers(CLI::App* app, int* workers) {
  app->add_option("--workers", *workers, "Worker threads")
      ->envname("JQF_WORKERS")
      ->check(CLI::PositiveNumber);
}

void AddSubsampling(CLI::App* app, std::string* value) {
  app->add_option("--subsampling", *value, "Chroma subsampling")
      ->check(CLI::IsMember({"420", "444"}));
}

int PrintError(ErrorCode code, const std::string& message) {
  std::string flat = message;
  for (char& c : flat) {
    if (c == '\n') c = ' ';
  }
  std::fprintf(stderr, "error: code=%s message=%s\n",
               std::string(ErrorCodeName(code)).c_str(), flat.c_str());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Per-image JPEG quantization tables from texture-specific annealed tables"};
  app.set_config("--config", "", "Read options from a key=value config file");
  app.require_subcommand(1);

  // cluster
  ClusterOptions cluster;
  cluster.workers = DefaultWorkers();
  auto* cl = app.add_subcommand("cluster", "Extract, embed and cluster training patches");
  cl->add_option("--corpus", cluster.corpus_dir, "Directory of training images")->required();
  cl->add_option("--model", cluster.model_path, "Output model file")->required();
  cl->add_option("--assignments", cluster.assignments_path, "Output patch assignment CSV");
  cl->add_option("--k", cluster.k, "Number of textures");
  cl->add_option("--stride", cluster.stride, "Patch stride in pixels");
  cl->add_option("--seed", cluster.seed, "Random seed");
  cl->add_option("--max-images", cluster.max_images, "Use at most this many images");
  cl->add_option("--embeddings", cluster.embeddings_path,
                 "Embedding exchange file to use instead of the built-in embedder");
  cl->add_option("--dump-patches", cluster.dump_patches_dir,
                 "Write every patch as PNG into this directory");
  AddWorkers(cl, &cluster.workers);

  // anneal
  AnnealCommandOptions anneal;
  anneal.workers = DefaultWorkers();
  std::string anneal_subsampling = "420";
  auto* an = app.add_subcommand("anneal", "Anneal one luminance table per texture");
  an->add_option("--model", anneal.model_path, "Clustered model file")->required();
  an->add_option("--corpus", anneal.corpus_dir, "Training image directory")->required();
  an->add_option("--output", anneal.output_path, "Output model file")->required();
  an->add_option("--assignments", anneal.assignments_path, "Patch assignment CSV");
  an->add_option("--trace-dir", anneal.trace_dir, "Directory for traces, tables and mosaics");
  an->add_option("--quality", anneal.config.anneal_quality, "Annealing quality Q");
  an->add_option("--iterations", anneal.config.max_iterations, "Iterations M");
  an->add_option("--p", anneal.config.p, "Temperature shape p");
  an->add_option("--gamma", anneal.config.gamma, "FSIM tolerance");
  an->add_option("--seed", anneal.config.seed, "Random seed");
  an->add_option("--max-reproposals", anneal.config.max_reproposals,
                 "Proposals per iteration before keeping the current table");
  an->add_option("--max-patches", anneal.max_patches, "Patches per mosaic");
  std::string anneal_selection = "min-size";
  an->add_option("--selection", anneal_selection,
                 "Returned state: min-size or min-energy among feasible states")
      ->check(CLI::IsMember({"min-size", "min-energy"}));
  AddSubsampling(an, &anneal_subsampling);
  AddWorkers(an, &anneal.workers);

  // compress
  CompressOptions compress;
  compress.workers = DefaultWorkers();
  std::string compress_subsampling = "420";
  auto* co = app.add_subcommand("compress", "Encode an image with its fused table");
  co->add_option("image", compress.image_path, "Input image")->required();
  co->add_option("--model", compress.model_path, "Annealed model file")->required();
  co->add_option("--output", compress.output_path, "Output JPEG")->required();
  co->add_option("--quality", compress.quality, "Target quality Q");
  co->add_option("--report", compress.report_path, "Report JSON path");
  co->add_option("--labels", compress.labels_path,
                 "Exchange file whose per-patch labels replace prediction");
  AddSubsampling(co, &compress_subsampling);
  AddWorkers(co, &compress.workers);

  // benchmark
  BenchmarkCommandOptions bench;
  bench.benchmark.workers = DefaultWorkers();
  std::string bench_subsampling = "420";
  auto* be = app.add_subcommand("benchmark", "Rate-distortion comparison against the standard table");
  be->add_option("--corpus", bench.corpus_dir, "Directory of test images")->required();
  be->add_option("--output-dir", bench.output_dir, "Report directory")->required();
  be->add_option("--model", bench.model_path, "Annealed model file");
  be->add_option("--table", bench.table_paths, "Extra luminance table files to compare");
  be->add_option("--qualities", bench.benchmark.qualities, "Qualities to sweep")
      ->delimiter(',');
  be->add_option("--max-images", bench.max_images, "Use at most this many images");
  AddSubsampling(be, &bench_subsampling);
  AddWorkers(be, &bench.benchmark.workers);

  // metrics
  std::string reference;
  std::vector<std::string> distorted;
  auto* me = app.add_subcommand("metrics", "PSNR, SSIM and FSIM against a reference");
  me->add_option("reference", reference, "Reference image")->required();
  me->add_option("distorted", distorted, "Distorted images (PNG, PNM or JPEG)")->required();

  // visualize
  std::string table_path, baseline_path, html_path;
  auto* vi = app.add_subcommand("visualize", "Show a table against a baseline table");
  vi->add_option("table", table_path, "Table file")->required();
  vi->add_option("baseline", baseline_path, "Baseline table file")->required();
  vi->add_option("--html", html_path, "Also write a standalone HTML page");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return PrintError(ErrorCode::kInvalidArgument, e.what());
  }

  try {
    if (cl->parsed()) {
      RunCluster(cluster, std::cerr);
    } else if (an->parsed()) {
      anneal.config.subsampling = ParseSubsampling(anneal_subsampling);
      anneal.config.selection = ParseAnnealSelection(anneal_selection);
      RunAnneal(anneal, std::cerr);
    } else if (co->parsed()) {
      compress.subsampling = ParseSubsampling(compress_subsampling);
      RunCompress(compress, std::cerr);
    } else if (be->parsed()) {
      bench.benchmark.subsampling = ParseSubsampling(bench_subsampling);
      const auto report = RunBenchmarkCommand(bench, std::cerr);
      std::cout << FormatAggregatesCsv(report);
    } else if (me->parsed()) {
      std::cout << RunMetrics(reference, distorted);
    } else if (vi->parsed()) {
      const TableFile table = ReadTableFile(table_path);
      const TableFile baseline = ReadTableFile(baseline_path);
      std::cout << TableDiffText(table, baseline);
      if (!html_path.empty()) {
        WriteFileText(html_path, TableDiffHtml(table, baseline, table_path));
      }
    }
  } catch (const Error& e) {
    return PrintError(e.code(), e.what());
  } catch (const std::exception& e) {
    return PrintError(ErrorCode::kIo, e.what());
  }
  return 0;
}
