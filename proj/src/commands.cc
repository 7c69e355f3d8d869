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

#include "qtfuse/commands.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <sstream>

#include "json.hpp"
#include "qtfuse/embedding_io.h"
#include "qtfuse/error.h"
#include "qtfuse/file_util.h"
#include "qtfuse/kmeans.h"
#include "qtfuse/parallel.h"

namespace qtfuse {

namespace fs = std::filesystem;

namespace {

std::string Join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create directory " + dir + ": " + ec.message());
}

std::string Fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json ScoreJson(const std::array<QualityScore, 3>& scores) {
  nlohmann::json j;
  for (const auto& s : scores) {
    const std::string key(MetricKindName(s.kind));
    if (std::isinf(s.value)) {
      j[key] = "inf";
    } else {
      j[key] = s.value;
    }
  }
  return j;
}

std::array<QualityScore, 3> ScoreAll(const RasterImage& raw, const RasterImage& decoded) {
  const PlaneF a = Luma(raw), b = Luma(decoded);
  return {QualityScore{MetricKind::kPsnr, Psnr(a, b)},
          QualityScore{MetricKind::kSsim, Ssim(a, b)},
          QualityScore{MetricKind::kFsim, Fsim(a, b)}};
}

}  // namespace

std::vector<std::string> ListImages(const std::string& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) Fail(ErrorCode::kNotFound, "not a directory: " + dir);
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pnm") {
      out.push_back(entry.path().string());
    }
  }
  if (out.empty()) Fail(ErrorCode::kNotFound, "no images in " + dir);
  std::sort(out.begin(), out.end());
  return out;
}

RasterImage ReadAnyImage(const std::string& path) {
  const auto bytes = ReadFileBytes(path);
  if (bytes.size() >= 2 && bytes[0] == 0xFF && bytes[1] == 0xD8) return Decode(bytes);
  return ReadImage(path);
}

std::string AssignmentsPathFor(const std::string& model_path) {
  fs::path p(model_path);
  p.replace_extension(".assign.csv");
  return p.string();
}

std::string FormatAssignments(const std::vector<PatchRecord>& patches) {
  std::string out = "patch,image,x,y,texture\n";
  for (size_t i = 0; i < patches.size(); ++i) {
    const auto& p = patches[i];
    out += std::to_string(i) + "," + p.image + "," + std::to_string(p.x) + "," +
           std::to_string(p.y) + "," + std::to_string(p.texture) + "\n";
  }
  return out;
}

std::vector<PatchRecord> ParseAssignments(std::string_view text) {
  std::vector<PatchRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line.rfind("patch,", 0) == 0) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (fields.size() != 5) {
      Fail(ErrorCode::kFormat, "assignments line " + std::to_string(line_no) +
                                   ": expected 5 fields");
    }
    try {
      out.push_back({fields[1], std::stoi(fields[2]), std::stoi(fields[3]),
                     std::stoi(fields[4])});
    } catch (const std::logic_error&) {
      Fail(ErrorCode::kFormat, "assignments line " + std::to_string(line_no) +
                                   ": bad number");
    }
  }
  return out;
}

ClusterResult RunCluster(const ClusterOptions& options, std::ostream& log) {
  Require(options.k >= 1, "K must be >= 1");
  Require(options.stride >= 1, "stride must be >= 1");
  std::vector<std::string> images = ListImages(options.corpus_dir);
  if (options.max_images > 0 && images.size() > static_cast<size_t>(options.max_images)) {
    images.resize(options.max_images);
  }

  std::vector<TexturePatch> patches;
  std::vector<PatchRecord> records;
  for (size_t i = 0; i < images.size(); ++i) {
    const RasterImage image = ReadImage(images[i]);
    if (image.width() < kPatchSize || image.height() < kPatchSize) {
      log << "warning: skipping " << images[i] << " (smaller than one patch)\n";
      continue;
    }
    const std::string name = fs::path(images[i]).filename().string();
    for (auto& p : ExtractPatches(image, options.stride, static_cast<int>(i))) {
      records.push_back({name, p.x, p.y, -1});
      patches.push_back(std::move(p));
    }
  }
  if (patches.empty()) Fail(ErrorCode::kInvalidArgument, "corpus yields no patches");
  log << "cluster: " << images.size() << " images, " << patches.size() << " patches\n";

  if (!options.dump_patches_dir.empty()) {
    EnsureDir(options.dump_patches_dir);
    for (size_t i = 0; i < patches.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "patch_%06zu.png", i);
      WriteImage(Join(options.dump_patches_dir, name), PatchImage(patches[i]));
    }
  }

  std::string embedder_id;
  std::vector<std::vector<float>> points;
  if (!options.embeddings_path.empty()) {
    EmbeddingFile file = ReadEmbeddingFile(options.embeddings_path);
    if (file.vectors.size() != patches.size()) {
      Fail(ErrorCode::kFormat, "embedding file has " + std::to_string(file.vectors.size()) +
                                   " vectors for " + std::to_string(patches.size()) +
                                   " patches");
    }
    embedder_id = file.embedder_id;
    points = std::move(file.vectors);
  } else {
    embedder_id = std::string(kClassicalEmbedderId);
    points.resize(patches.size());
    ParallelFor(patches.size(), options.workers,
                [&](size_t i) { points[i] = EmbedPatch(patches[i]).values; });
  }

  const KMeansResult km = KMeans(points, options.k, options.seed);
  ClusterResult result;
  result.iterations = static_cast<int>(km.objective.size());
  result.model.embedder_id = embedder_id;
  result.model.dim = static_cast<uint32_t>(points[0].size());
  for (const auto& c : km.centroids) result.model.centroids.emplace_back(c.begin(), c.end());
  for (size_t i = 0; i < records.size(); ++i) records[i].texture = km.assignments[i];
  result.patches = std::move(records);

  std::ostringstream cfg;
  cfg << "cluster corpus=" << options.corpus_dir << " k=" << options.k
      << " stride=" << options.stride << " seed=" << options.seed
      << " max_images=" << options.max_images << " embedder=" << embedder_id
      << " images=" << images.size() << " patches=" << patches.size() << "\n";
  result.model.config = cfg.str();
  ValidateModel(result.model);

  WriteModelFile(options.model_path, result.model);
  WriteFileText(options.assignments_path.empty() ? AssignmentsPathFor(options.model_path)
                                                 : options.assignments_path,
                FormatAssignments(result.patches));
  log << "cluster: K=" << options.k << " converged after " << result.iterations
      << " assignment steps\n";
  return result;
}

TextureModel RunAnneal(const AnnealCommandOptions& options, std::ostream& log) {
  options.config.Validate();
  Require(options.max_patches >= 1, "max_patches must be >= 1");
  Require(!options.output_path.empty(), "an output model path is required");
  TextureModel model = ReadModelFile(options.model_path);
  const auto records = ParseAssignments(ReadFileText(
      options.assignments_path.empty() ? AssignmentsPathFor(options.model_path)
                                       : options.assignments_path));

  std::map<int, std::vector<const PatchRecord*>> by_texture;
  for (const auto& r : records) {
    if (r.texture < 0 || r.texture >= model.k()) {
      Fail(ErrorCode::kFormat, "assignment to unknown texture " + std::to_string(r.texture));
    }
    by_texture[r.texture].push_back(&r);
  }

  std::map<std::string, RasterImage> luma_cache;
  std::map<int, RasterImage> mosaics;
  for (int t = 0; t < model.k(); ++t) {
    auto it = by_texture.find(t);
    if (it == by_texture.end()) {
      log << "warning: texture " << t
          << " has no patches; it keeps the scaled standard table\n";
      continue;
    }
    std::vector<TexturePatch> patches;
    for (const PatchRecord* r : it->second) {
      auto cached = luma_cache.find(r->image);
      if (cached == luma_cache.end()) {
        cached = luma_cache
                     .emplace(r->image,
                              LumaImage(ReadImage(Join(options.corpus_dir, r->image))))
                     .first;
      }
      const RasterImage& src = cached->second;
      if (r->x < 0 || r->y < 0 || r->x + kPatchSize > src.width() ||
          r->y + kPatchSize > src.height()) {
        Fail(ErrorCode::kFormat, "patch outside " + r->image);
      }
      TexturePatch p;
      p.x = r->x;
      p.y = r->y;
      p.pixels.resize(kPatchSize * kPatchSize);
      for (int y = 0; y < kPatchSize; ++y) {
        for (int x = 0; x < kPatchSize; ++x) {
          p.pixels[y * kPatchSize + x] = src.at(0, r->x + x, r->y + y);
        }
      }
      patches.push_back(std::move(p));
    }
    mosaics.emplace(t, StitchMosaic(patches, options.max_patches, options.config.seed + t));
  }
  luma_cache.clear();

  log << "anneal: " << mosaics.size() << " mosaics, M=" << options.config.max_iterations
      << " Q=" << options.config.anneal_quality << " workers=" << options.workers << "\n";
  std::mutex log_mu;
  const int every = std::max(1, options.config.max_iterations / 10);
  const auto results = AnnealAll(
      mosaics, options.config, options.workers, [&](int t, const AnnealRecord& r) {
        if (r.iteration % every != 0) return;
        std::lock_guard<std::mutex> lock(log_mu);
        log << "anneal: texture " << t << " iteration " << r.iteration << " size "
            << r.size << " fsim " << r.fsim << "\n";
      });

  const int q = options.config.anneal_quality;
  model.tables.clear();
  for (int t = 0; t < model.k(); ++t) {
    auto it = results.find(t);
    model.tables.emplace(t, it == results.end() ? ScaleTable(StandardLuminanceTable(), q)
                                                : it->second.table);
  }
  model.anneal_quality = q;
  std::ostringstream cfg;
  cfg << "anneal M=" << options.config.max_iterations << " p=" << Fmt(options.config.p)
      << " gamma=" << Fmt(options.config.gamma) << " quality=" << q
      << " seed=" << options.config.seed
      << " max_reproposals=" << options.config.max_reproposals
      << " subsampling=" << SubsamplingName(options.config.subsampling)
      << " max_patches=" << options.max_patches << "\n";
  model.config += cfg.str();

  if (!options.trace_dir.empty()) {
    EnsureDir(options.trace_dir);
    for (const auto& [t, result] : results) {
      char stem[32];
      std::snprintf(stem, sizeof(stem), "texture_%03d", t);
      WriteFileText(Join(options.trace_dir, std::string(stem) + ".trace.csv"),
                    FormatTrace(result.trace, options.config));
      WriteTableFile(Join(options.trace_dir, std::string(stem) + ".qtable"),
                     {result.table, q});
      WriteImage(Join(options.trace_dir, std::string(stem) + ".mosaic.png"), mosaics.at(t));
      log << "anneal: texture " << t << " size " << result.trace.baseline_size << " -> "
          << result.size << ", fsim " << result.trace.baseline_fsim << " -> "
          << result.fsim << "\n";
    }
  }
  WriteModelFile(options.output_path, model);
  return model;
}

CompressResult RunCompress(const CompressOptions& options, std::ostream& log) {
  Require(options.quality >= 1 && options.quality <= 100, "quality must be in [1, 100]");
  Require(!options.output_path.empty(), "an output path is required");
  const TextureModel model = ReadModelFile(options.model_path);
  if (!model.has_tables()) Fail(ErrorCode::kInvalidArgument, "model has no annealed tables");
  if (model.anneal_quality != 50 && model.anneal_quality != options.quality) {
    log << "warning: tables annealed at Q=" << model.anneal_quality
        << " are tuned for that quality only; target is Q=" << options.quality << "\n";
  }
  const RasterImage image = ReadAnyImage(options.image_path);

  const auto start = std::chrono::steady_clock::now();
  std::optional<TextureDistribution> dist;
  if (!options.labels_path.empty()) {
    const EmbeddingFile labels = ReadEmbeddingFile(options.labels_path);
    if (!labels.labels) Fail(ErrorCode::kFormat, options.labels_path + " has no label block");
    const RasterImage small = PredictionImage(image);
    const size_t expected = PatchCount(small.width(), small.height(), kPatchSize);
    if (labels.labels->size() != expected) {
      Fail(ErrorCode::kFormat, "label file has " + std::to_string(labels.labels->size()) +
                                   " labels, image has " + std::to_string(expected) +
                                   " patches");
    }
    dist = DistributionFromLabels(*labels.labels, model);
  } else {
    dist = PredictDistribution(image, model, options.workers);
  }
  const QuantTable fused = FusedTable(model, *dist, options.quality);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  EncodeOptions enc;
  enc.subsampling = options.subsampling;
  const QuantTable chroma = ScaleTable(StandardChrominanceTable(), options.quality);
  const JpegBlob fused_blob = Encode(image, fused, chroma, enc);
  const JpegBlob standard_blob =
      Encode(image, ScaleTable(StandardLuminanceTable(), options.quality), chroma, enc);
  WriteFileBytes(options.output_path, fused_blob.bytes());

  CompressResult result{*dist,
                        fused,
                        fused_blob.size(),
                        standard_blob.size(),
                        ScoreAll(image, Decode(fused_blob)),
                        ScoreAll(image, Decode(standard_blob)),
                        seconds};

  nlohmann::json j;
  j["image"] = options.image_path;
  j["model"] = options.model_path;
  j["model_config"] = model.config;
  j["quality"] = options.quality;
  j["anneal_quality"] = model.anneal_quality;
  j["subsampling"] = SubsamplingName(options.subsampling);
  j["prediction"] = options.labels_path.empty() ? "nearest-centroid" : options.labels_path;
  nlohmann::json d = nlohmann::json::object();
  for (const auto& [id, w] : dist->weights()) d[std::to_string(id)] = w;
  j["distribution"] = d;
  j["fused_table"] = fused.values();
  j["fused"] = {{"size", result.fused_size}, {"scores", ScoreJson(result.fused_scores)}};
  j["standard"] = {{"size", result.standard_size},
                   {"scores", ScoreJson(result.standard_scores)}};
  j["size_delta_pct"] = PercentDelta(static_cast<double>(result.fused_size),
                                     static_cast<double>(result.standard_size));
  j["predict_fuse_seconds"] = seconds;
  WriteFileText(options.report_path.empty() ? options.output_path + ".json"
                                            : options.report_path,
                j.dump(2) + "\n");
  log << "compress: " << result.fused_size << " bytes (standard " << result.standard_size
      << "), predict+fuse " << seconds << " s\n";
  return result;
}

BenchmarkReport RunBenchmarkCommand(const BenchmarkCommandOptions& options,
                                    std::ostream& log) {
  Require(!options.output_dir.empty(), "an output directory is required");
  std::vector<std::string> images = ListImages(options.corpus_dir);
  if (options.max_images > 0 && images.size() > static_cast<size_t>(options.max_images)) {
    images.resize(options.max_images);
  }
  std::optional<TextureModel> model;
  if (!options.model_path.empty()) {
    model = ReadModelFile(options.model_path);
    if (!model->has_tables()) Fail(ErrorCode::kInvalidArgument, "model has no annealed tables");
    for (int q : options.benchmark.qualities) {
      if (model->anneal_quality != 50 && model->anneal_quality != q) {
        log << "warning: tables annealed at Q=" << model->anneal_quality
            << " used at Q=" << q << "\n";
      }
    }
  }
  BenchmarkOptions bench = options.benchmark;
  for (const auto& path : options.table_paths) {
    bench.external_tables.push_back({fs::path(path).filename().string(), ReadTableFile(path)});
  }

  std::ostringstream cfg;
  cfg << "benchmark corpus=" << options.corpus_dir << " images=" << images.size()
      << " model=" << options.model_path << " qualities=";
  for (size_t i = 0; i < bench.qualities.size(); ++i) {
    cfg << (i ? ";" : "") << bench.qualities[i];
  }
  cfg << " subsampling=" << SubsamplingName(bench.subsampling);
  for (const auto& t : bench.external_tables) cfg << " table=" << t.label;
  if (model) {
    std::string mc = model->config;
    std::replace(mc.begin(), mc.end(), '\n', ' ');
    cfg << "\nmodel_config=" << mc;
  }

  const TextureModel* model_ptr = model ? &*model : nullptr;
  BenchmarkReport report = RunBenchmark(images, model_ptr, bench);
  report.config = cfg.str();

  EnsureDir(options.output_dir);
  EnsureDir(Join(options.output_dir, "images"));
  WriteFileText(Join(options.output_dir, "report.csv"), FormatRowsCsv(report));
  WriteFileText(Join(options.output_dir, "summary.csv"), FormatAggregatesCsv(report));
  for (const auto& img : report.images) {
    WriteFileText(Join(Join(options.output_dir, "images"),
                       fs::path(img.file).stem().string() + ".json"),
                  FormatImageJson(report, img));
    if (!img.error.empty()) log << "warning: " << img.file << " failed: " << img.error << "\n";
  }
  return report;
}

std::string RunMetrics(const std::string& reference_path,
                       const std::vector<std::string>& distorted_paths) {
  const RasterImage reference = ReadAnyImage(reference_path);
  std::string out = "file,psnr,ssim,fsim\n";
  for (const auto& path : distorted_paths) {
    const auto s = ScoreAll(reference, ReadAnyImage(path));
    out += path + "," + (std::isinf(s[0].value) ? std::string("inf") : Fmt(s[0].value)) +
           "," + Fmt(s[1].value) + "," + Fmt(s[2].value) + "\n";
  }
  return out;
}

std::string TableDiffText(const TableFile& table, const TableFile& baseline) {
  std::string out;
  int up = 0, down = 0;
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      const int i = r * 8 + c;
      const int v = table.table[i], b = baseline.table[i];
      char cell[16];
      std::snprintf(cell, sizeof(cell), "%4d%c", v, v > b ? '+' : v < b ? '-' : ' ');
      out += cell;
      up += v > b;
      down += v < b;
    }
    out += "\n";
  }
  out += std::to_string(up) + " increased, " + std::to_string(down) + " decreased\n";
  return out;
}

std::string TableDiffHtml(const TableFile& table, const TableFile& baseline,
                          const std::string& title) {
  auto escape = [](const std::string& s) {
    std::string o;
    for (char ch : s) {
      switch (ch) {
        case '<': o += "&lt;"; break;
        case '>': o += "&gt;"; break;
        case '&': o += "&amp;"; break;
        case '"': o += "&quot;"; break;
        default: o += ch;
      }
    }
    return o;
  };
  std::string out =
      "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>" + escape(title) +
      "</title>\n<style>\n"
      "body{font-family:monospace;margin:2em}\n"
      "table{border-collapse:collapse}\n"
      "td{border:1px solid #999;width:3em;height:2em;text-align:center}\n"
      "td.up{background:#f4a6a6}\ntd.down{background:#a6c4f4}\n"
      "td small{display:block;color:#555}\n"
      "</style></head><body>\n<h1>" +
      escape(title) + "</h1>\n<p>Q=" + std::to_string(table.quality) +
      " vs. baseline Q=" + std::to_string(baseline.quality) +
      ". Red: larger than baseline. Blue: smaller.</p>\n<table>\n";
  for (int r = 0; r < 8; ++r) {
    out += "<tr>";
    for (int c = 0; c < 8; ++c) {
      const int i = r * 8 + c;
      const int v = table.table[i], b = baseline.table[i];
      const char* cls = v > b ? " class=\"up\"" : v < b ? " class=\"down\"" : "";
      out += "<td" + std::string(cls) + ">" + std::to_string(v) + "<small>" +
             std::to_string(b) + "</small></td>";
    }
    out += "</tr>\n";
  }
  out += "</table>\n</body></html>\n";
  return out;
}

}  // namespace qtfuse
