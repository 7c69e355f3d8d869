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

#include "qtfuse/benchmark.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <tuple>

#include "json.hpp"
#include "qtfuse/error.h"
#include "qtfuse/metrics.h"
#include "qtfuse/parallel.h"

namespace qtfuse {

std::string_view TableKindName(TableKind kind) {
  switch (kind) {
    case TableKind::kStandard: return "standard";
    case TableKind::kFused: return "fused";
    case TableKind::kExternal: return "external";
  }
  return "?";
}

double PercentDelta(double variant, double standard) {
  if (variant == standard) return 0.0;
  return (variant / standard - 1.0) * 100.0;
}

namespace {

BenchmarkRow Score(const std::string& file, const RasterImage& image, TableKind kind,
                   std::string label, int quality, const QuantTable& luma,
                   const EncodeOptions& options) {
  const JpegBlob blob =
      Encode(image, luma, ScaleTable(StandardChrominanceTable(), quality), options);
  const PlaneF raw = Luma(image);
  const PlaneF decoded = Luma(Decode(blob));
  return {file, kind, std::move(label), quality, blob.size(),
          Psnr(raw, decoded), Ssim(raw, decoded), Fsim(raw, decoded)};
}

std::string FormatDouble(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<BenchmarkAggregate> Aggregate(const std::vector<BenchmarkRow>& rows) {
  std::map<std::pair<std::string, int>, const BenchmarkRow*> standard;
  for (const auto& r : rows) {
    if (r.kind == TableKind::kStandard) standard[{r.file, r.quality}] = &r;
  }
  using Key = std::tuple<int, std::string, int>;
  std::map<Key, BenchmarkAggregate> acc;
  for (const auto& r : rows) {
    auto it = standard.find({r.file, r.quality});
    if (it == standard.end()) continue;
    const BenchmarkRow& s = *it->second;
    const Key key{static_cast<int>(r.kind), r.label, r.quality};
    auto [a, inserted] = acc.try_emplace(key, BenchmarkAggregate{r.kind, r.label, r.quality,
                                                                 0, 0, 0, 0, 0});
    ++a->second.images;
    a->second.size_delta += PercentDelta(static_cast<double>(r.size), static_cast<double>(s.size));
    a->second.psnr_delta += PercentDelta(r.psnr, s.psnr);
    a->second.ssim_delta += PercentDelta(r.ssim, s.ssim);
    a->second.fsim_delta += PercentDelta(r.fsim, s.fsim);
  }
  std::vector<BenchmarkAggregate> out;
  for (auto& [key, a] : acc) {
    const double n = static_cast<double>(a.images);
    a.size_delta /= n;
    a.psnr_delta /= n;
    a.ssim_delta /= n;
    a.fsim_delta /= n;
    out.push_back(a);
  }
  return out;
}

BenchmarkReport RunBenchmark(const std::vector<std::string>& image_paths,
                             const TextureModel* model, const BenchmarkOptions& options) {
  Require(!options.qualities.empty(), "no benchmark qualities");
  for (int q : options.qualities) Require(q >= 1 && q <= 100, "quality must be in [1, 100]");
  const bool fused = model != nullptr && model->has_tables();
  EncodeOptions encode_options;
  encode_options.subsampling = options.subsampling;

  BenchmarkReport report;
  report.images.resize(image_paths.size());
  std::vector<std::vector<BenchmarkRow>> rows(image_paths.size());
  ParallelFor(image_paths.size(), options.workers, [&](size_t k) {
    const std::string& path = image_paths[k];
    const std::string name = std::filesystem::path(path).filename().string();
    ImageSummary& summary = report.images[k];
    summary.file = name;
    try {
      const RasterImage image = ReadImage(path);
      summary.width = image.width();
      summary.height = image.height();
      if (fused) {
        const auto start = std::chrono::steady_clock::now();
        summary.distribution = PredictDistribution(image, *model);
        for (int q : options.qualities) {
          summary.fused_tables.emplace(q, FusedTable(*model, *summary.distribution, q));
        }
        summary.predict_fuse_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
      for (int q : options.qualities) {
        rows[k].push_back(Score(name, image, TableKind::kStandard, "standard", q,
                                ScaleTable(StandardLuminanceTable(), q), encode_options));
        if (fused) {
          rows[k].push_back(Score(name, image, TableKind::kFused, "fused", q,
                                  summary.fused_tables.at(q), encode_options));
        }
        for (const auto& ext : options.external_tables) {
          rows[k].push_back(Score(name, image, TableKind::kExternal, ext.label, q,
                                  RescaleTable(ext.table.table, ext.table.quality, q),
                                  encode_options));
        }
      }
    } catch (const std::exception& e) {
      summary.error = e.what();
      rows[k].clear();
    }
  });
  for (auto& r : rows) report.rows.insert(report.rows.end(), r.begin(), r.end());
  report.aggregates = Aggregate(report.rows);
  return report;
}

std::string FormatRowsCsv(const BenchmarkReport& report) {
  std::string out;
  for (size_t start = 0; start < report.config.size();) {
    size_t end = report.config.find('\n', start);
    if (end == std::string::npos) end = report.config.size();
    out += "# " + report.config.substr(start, end - start) + "\n";
    start = end + 1;
  }
  out += "file,table,label,quality,size,psnr,ssim,fsim\n";
  for (const auto& r : report.rows) {
    out += r.file + "," + std::string(TableKindName(r.kind)) + "," + r.label + "," +
           std::to_string(r.quality) + "," + std::to_string(r.size) + "," +
           FormatDouble(r.psnr) + "," + FormatDouble(r.ssim) + "," + FormatDouble(r.fsim) +
           "\n";
  }
  for (const auto& img : report.images) {
    if (!img.error.empty()) out += "# failed: " + img.file + ": " + img.error + "\n";
  }
  return out;
}

std::string FormatAggregatesCsv(const BenchmarkReport& report) {
  std::string out =
      "table,label,quality,images,size_delta_pct,psnr_delta_pct,ssim_delta_pct,"
      "fsim_delta_pct\n";
  for (const auto& a : report.aggregates) {
    out += std::string(TableKindName(a.kind)) + "," + a.label + "," +
           std::to_string(a.quality) + "," + std::to_string(a.images) + "," +
           FormatDouble(a.size_delta) + "," + FormatDouble(a.psnr_delta) + "," +
           FormatDouble(a.ssim_delta) + "," + FormatDouble(a.fsim_delta) + "\n";
  }
  return out;
}

std::string FormatImageJson(const BenchmarkReport& report, const ImageSummary& image) {
  using nlohmann::json;
  auto number = [](double v) -> json {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
  };
  json j;
  j["file"] = image.file;
  j["config"] = report.config;
  j["width"] = image.width;
  j["height"] = image.height;
  if (!image.error.empty()) j["error"] = image.error;
  if (image.distribution) {
    json d = json::object();
    for (const auto& [id, w] : image.distribution->weights()) d[std::to_string(id)] = w;
    j["distribution"] = d;
    j["predict_fuse_seconds"] = image.predict_fuse_seconds;
  }
  json tables = json::object();
  for (const auto& [q, t] : image.fused_tables) tables[std::to_string(q)] = t.values();
  if (!image.fused_tables.empty()) j["fused_tables"] = tables;
  json rows = json::array();
  for (const auto& r : report.rows) {
    if (r.file != image.file) continue;
    rows.push_back({{"table", TableKindName(r.kind)},
                    {"label", r.label},
                    {"quality", r.quality},
                    {"size", r.size},
                    {"psnr", number(r.psnr)},
                    {"ssim", r.ssim},
                    {"fsim", r.fsim}});
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

}  // namespace qtfuse
