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

// Acceptance checks. Each criterion prints exactly one line,
// "PASS [n] name: details" or "FAIL [n] name: details", and the process
// exits non-zero on FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "../libjpeg_reference.h"
#include "../test_util.h"
#include "qtfuse/annealer.h"
#include "qtfuse/commands.h"
#include "qtfuse/error.h"
#include "qtfuse/file_util.h"
#include "qtfuse/jpeg.h"
#include "qtfuse/metrics.h"
#include "qtfuse/quant_table.h"
#include "qtfuse/rng.h"
#include "qtfuse/texture_model.h"

namespace qtfuse::acceptance {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass;
  std::string details;
};

// Collects failure messages; the first few are reported.
class Checker {
 public:
  void Expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 5) messages_.push_back(what);
  }
  bool ok() const { return failures_ == 0; }
  std::string Summary() const {
    std::string s = std::to_string(failures_) + " failure(s)";
    for (const auto& m : messages_) s += "; " + m;
    return s;
  }

 private:
  int failures_ = 0;
  std::vector<std::string> messages_;
};

std::string Fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

// ---- 1 -----------------------------------------------------------------

Outcome ScalingExactness(const std::string&) {
  Checker c;
  c.Expect(ScaleFactor(50).scale_percent == 100, "Q50 percent");
  c.Expect(ScaleFactor(35).scale_percent == 142, "Q35 percent");
  c.Expect(ScaleFactor(75).scale_percent == 50, "Q75 percent");
  c.Expect(ScaleFactor(95).scale_percent == 10, "Q95 percent");
  c.Expect(ScaleFactor(1).scale_percent == 5000, "Q1 percent");
  c.Expect(ScaleTable(StandardLuminanceTable(), 50) == StandardLuminanceTable(),
           "Q50 luminance identity");
  c.Expect(ScaleTable(StandardChrominanceTable(), 50) == StandardChrominanceTable(),
           "Q50 chrominance identity");
  const RasterImage img = testing::RandomImage(64, 48, ColorSpace::kRgb, 11);
  int compared = 0;
  for (int q : {35, 50, 75, 95}) {
    const testing::LibjpegImage ref =
        testing::LibjpegDecode(testing::LibjpegEncode(img, q, Subsampling::k420));
    if (!ref.ok || ref.quant_tables.size() < 2) {
      c.Expect(false, "reference encoder output unreadable at Q" + std::to_string(q));
      continue;
    }
    const QuantTable luma = ScaleTable(StandardLuminanceTable(), q);
    const QuantTable chroma = ScaleTable(StandardChrominanceTable(), q);
    for (size_t i = 0; i < kDctBlockSize; ++i) {
      c.Expect(luma[i] == ref.quant_tables[0][i],
               "Q" + std::to_string(q) + " luma entry " + std::to_string(i));
      c.Expect(chroma[i] == ref.quant_tables[1][i],
               "Q" + std::to_string(q) + " chroma entry " + std::to_string(i));
      compared += 2;
    }
    // Our own stream carries the same bytes.
    const JpegBlob ours = Encode(img, luma, chroma);
    const auto dqt = ReadDqtTables(ours.bytes());
    c.Expect(dqt.size() == 2 && dqt[0].values == ref.quant_tables[0] &&
                 dqt[1].values == ref.quant_tables[1],
             "emitted DQT at Q" + std::to_string(q));
  }
  return {c.ok(), c.ok() ? std::to_string(compared) +
                               " entries match the reference DQT at Q 35/50/75/95; "
                               "Q50 is the identity"
                         : c.Summary()};
}

// ---- 2 -----------------------------------------------------------------

Outcome TemperatureProbability(const std::string&) {
  Checker c;
  AnnealConfig config;
  config.max_iterations = 2000;
  config.p = 10;
  const double t0 = Temperature(0, config);
  const double tm = Temperature(2000, config);
  c.Expect(std::abs(t0 - 1.0) <= 1e-12, "T(0) = " + Fmt("%.17g", t0));
  c.Expect(std::abs(tm - 1.0 / 11.0) <= 1e-12, "T(2000) = " + Fmt("%.17g", tm));
  Rng rng(2026);
  int clamped = 0;
  constexpr int kTrials = 200000;
  for (int n = 0; n < kTrials; ++n) {
    const double scale = std::pow(10.0, rng.Uniform() * 12 - 4);
    const double s = rng.Uniform() * scale;
    const double s_prev = std::max(1e-300, rng.Uniform() * scale);
    const int i = static_cast<int>(rng.Below(2001));
    const double p = AcceptProbability(s, s_prev, i, config);
    c.Expect(p >= 0.0 && p <= 1.0, "P out of range: " + Fmt("%.17g", p));
    const double raw = s / s_prev * Temperature(i, config);
    const double expected = std::clamp(raw, 0.0, 1.0);
    c.Expect(std::abs(p - expected) <= 1e-12, "P formula at i=" + std::to_string(i));
    clamped += raw > 1.0;
  }
  try {
    AcceptProbability(1.0, 0.0, 1, config);
    c.Expect(false, "S_prev = 0 accepted");
  } catch (const Error& e) {
    c.Expect(e.code() == ErrorCode::kDegenerateEnergy, "wrong error for S_prev = 0");
  }
  return {c.ok(), c.ok() ? "T(0)=1, T(2000)=" + Fmt("%.17g", tm) + "; " +
                               std::to_string(kTrials) + " fuzzed P in [0,1] (" +
                               std::to_string(clamped) + " clamped)"
                         : c.Summary()};
}

// ---- 3 -----------------------------------------------------------------

Outcome MetricOracles(const std::string&) {
  Checker c;
  double worst_psnr = 0, worst_ssim = 0, worst_fsim = 0;
  const auto suite = testing::LoadMetricSuite();
  c.Expect(suite.size() == 10, "suite has " + std::to_string(suite.size()) + " entries");
  for (const auto& e : suite) {
    const RasterImage ref = testing::SuiteReference(e);
    const RasterImage dist = testing::SuiteDistorted(e);
    const double psnr = Psnr(ref, dist).value;
    const double brute = testing::BruteForcePsnr(ref, dist);
    const double ssim = Ssim(ref, dist).value;
    const double fsim = Fsim(ref, dist).value;
    worst_psnr = std::max(worst_psnr, std::abs(psnr - brute));
    worst_ssim = std::max(worst_ssim, std::abs(ssim - e.ssim));
    worst_fsim = std::max(worst_fsim, std::abs(fsim - e.fsim));
    c.Expect(std::abs(psnr - brute) <= 1e-9, e.name + " PSNR vs brute force");
    c.Expect(std::abs(ssim - e.ssim) <= 1e-4, e.name + " SSIM " + Fmt("%.9f", ssim));
    c.Expect(std::abs(fsim - e.fsim) <= 5e-3, e.name + " FSIM " + Fmt("%.9f", fsim));
    c.Expect(Ssim(ref, ref).value == 1.0, e.name + " SSIM self-similarity");
    c.Expect(std::abs(Fsim(ref, ref).value - 1.0) <= 1e-12, e.name + " FSIM self-similarity");
    c.Expect(std::isinf(Psnr(ref, ref).value), e.name + " PSNR self");
  }
  return {c.ok(), c.ok() ? "max |dPSNR|=" + Fmt("%.2e", worst_psnr) +
                               " max |dSSIM|=" + Fmt("%.2e", worst_ssim) +
                               " max |dFSIM|=" + Fmt("%.2e", worst_fsim) +
                               " over 10 pairs; self-similarity 1"
                         : c.Summary()};
}

// ---- 4 -----------------------------------------------------------------

Outcome AnnealingFeasibilityDeterminism(const std::string& work_dir) {
  Checker c;
  const RasterImage mosaic = testing::DeskMosaic(8, 1);
  c.Expect(mosaic.width() == 512 && mosaic.height() == 512, "mosaic is not 512x512");
  AnnealConfig config;
  config.max_iterations = 500;
  config.anneal_quality = 95;
  config.gamma = 0.01;
  config.seed = 1;

  std::vector<AnnealResult> runs;
  for (int r = 0; r < 3; ++r) {
    const auto start = std::chrono::steady_clock::now();
    runs.push_back(Anneal(mosaic, config));
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "run " << r << ": " << secs << " s, size " << runs.back().size << "\n";
  }
  const AnnealResult& a = runs[0];
  WriteFileText(work_dir + "/trace.csv", FormatTrace(a.trace, config));
  WriteTableFile(work_dir + "/annealed.qtable", {a.table, 95});
  for (int r = 1; r < 3; ++r) {
    c.Expect(runs[r].trace == a.trace, "trace of rerun " + std::to_string(r) + " differs");
    c.Expect(runs[r].table == a.table, "table of rerun " + std::to_string(r) + " differs");
    c.Expect(FormatTrace(runs[r].trace, config) == FormatTrace(a.trace, config),
             "serialized trace of rerun " + std::to_string(r) + " differs");
  }

  // Independent re-evaluation of the returned table.
  const QuantTable chroma = ScaleTable(StandardChrominanceTable(), 95);
  const JpegBlob standard = Encode(mosaic, ScaleTable(StandardLuminanceTable(), 95), chroma);
  const JpegBlob annealed = Encode(mosaic, a.table, chroma);
  const double fsim_std = Fsim(mosaic, Decode(standard)).value;
  const double fsim_new = Fsim(mosaic, Decode(annealed)).value;
  c.Expect(annealed.size() == a.size, "reported size does not match re-encode");
  c.Expect(QualityWithinTolerance(fsim_new, fsim_std, config.gamma),
           "returned table violates the FSIM tolerance");
  c.Expect(annealed.size() < standard.size(), "no size reduction: " +
                                                  std::to_string(annealed.size()) + " vs " +
                                                  std::to_string(standard.size()));

  // Trace invariants.
  size_t current = a.trace.baseline_size;
  size_t best = a.trace.baseline_size;
  for (const auto& rec : a.trace.records) {
    if (rec.kind == AcceptKind::kImprove) {
      c.Expect(rec.size < current && rec.feasible,
               "improve at i=" + std::to_string(rec.iteration) + " is not an improvement");
    }
    if (rec.accepted()) {
      current = rec.size;
      if (rec.feasible) best = std::min(best, rec.size);
    }
  }
  c.Expect(a.size == best, "returned size is not the smallest feasible accepted size");

  const double reduction = 100.0 * (1.0 - static_cast<double>(annealed.size()) /
                                              static_cast<double>(standard.size()));
  const double fsim_drop = 100.0 * (1.0 - fsim_new / fsim_std);
  std::string details = "size " + std::to_string(annealed.size()) + " vs standard " +
                        std::to_string(standard.size()) + " (" + Fmt("%.2f", reduction) +
                        "% smaller; desk expectation >= 5%), FSIM drop " +
                        Fmt("%.3f", fsim_drop) + "% (tolerance 1%), 3 reruns bit-identical";
  return {c.ok(), c.ok() ? details : c.Summary() + "; " + details};
}

// ---- 5 -----------------------------------------------------------------

Outcome FusionProperties(const std::string&) {
  Checker c;
  Rng rng(5);
  int trials = 0;
  for (int n = 0; n < 2000; ++n) {
    const QuantTable t = testing::RandomTable(rng, ComponentKind::kLuminance);
    c.Expect(Fuse({{3, t}}, FusionWeights({{3, 1.0}})) == t, "single-texture identity");
    std::map<TextureId, QuantTable> tables;
    std::map<TextureId, double> raw;
    const int k = 2 + static_cast<int>(rng.Below(7));
    double sum = 0;
    for (int j = 0; j < k; ++j) {
      tables.emplace(j, testing::RandomTable(rng, ComponentKind::kLuminance));
      raw[j] = rng.Uniform() + 1e-3;
      sum += raw[j];
    }
    for (auto& [id, w] : raw) w /= sum;
    std::map<TextureId, double> weights = raw;
    double total = 0;
    for (const auto& [id, w] : weights) total += w;
    weights.rbegin()->second += 1.0 - total;
    const QuantTable fused = Fuse(tables, FusionWeights(weights));
    for (size_t i = 0; i < kDctBlockSize; ++i) {
      int lo = 255, hi = 1;
      for (const auto& [id, tab] : tables) {
        lo = std::min(lo, tab[i]);
        hi = std::max(hi, tab[i]);
      }
      c.Expect(fused[i] >= lo - 1 && fused[i] <= hi + 1, "entry outside convex hull");
    }
    ++trials;
  }
  for (double w : {0.9, 1.1, 1.0 + 1e-6}) {
    try {
      FusionWeights({{0, w}});
      c.Expect(false, "weights summing to " + Fmt("%.9g", w) + " accepted");
    } catch (const Error& e) {
      c.Expect(e.code() == ErrorCode::kInvalidArgument, "wrong error code for bad weights");
    }
  }
  try {
    FusionWeights({{0, 1.5}, {1, -0.5}});
    c.Expect(false, "negative weight accepted");
  } catch (const Error&) {
  }
  return {c.ok(), c.ok() ? std::to_string(trials) +
                               " random fusions: identity exact, every entry within "
                               "[min-1, max+1]; non-unit weight sums rejected"
                         : c.Summary()};
}

// ---- 6 -----------------------------------------------------------------

Outcome EndToEnd(const std::string& work_dir) {
  Checker c;
  auto& log = std::cerr;
  const std::string model = work_dir + "/desk.qtm";
  const std::string annealed = work_dir + "/desk_annealed.qtm";

  ClusterOptions cluster;
  cluster.corpus_dir = testing::DeskCorpusDir();
  cluster.model_path = model;
  cluster.k = 8;
  cluster.stride = 128;
  cluster.seed = 1;
  const ClusterResult clustered = RunCluster(cluster, log);
  const size_t images = ListImages(cluster.corpus_dir).size();
  c.Expect(images >= 20, "desk corpus has " + std::to_string(images) + " images");

  AnnealCommandOptions anneal;
  anneal.model_path = model;
  anneal.corpus_dir = cluster.corpus_dir;
  anneal.output_path = annealed;
  anneal.trace_dir = work_dir + "/traces";
  anneal.config.max_iterations = 500;
  anneal.config.anneal_quality = 50;
  anneal.config.gamma = 0.01;
  anneal.config.seed = 1;
  RunAnneal(anneal, log);

  BenchmarkCommandOptions bench;
  bench.corpus_dir = cluster.corpus_dir;
  bench.model_path = annealed;
  bench.output_dir = work_dir + "/benchmark";
  bench.benchmark.qualities = {35, 50, 75, 95};
  const BenchmarkReport report = RunBenchmarkCommand(bench, log);

  std::string details = std::to_string(images) + " images, " +
                        std::to_string(clustered.patches.size()) + " patches;";
  for (const auto& img : report.images) {
    c.Expect(img.error.empty(), img.file + ": " + img.error);
  }
  int seen = 0;
  for (const auto& a : report.aggregates) {
    if (a.kind != TableKind::kFused) continue;
    ++seen;
    details += " Q" + std::to_string(a.quality) + " size " + Fmt("%+.2f", a.size_delta) +
               "% fsim " + Fmt("%+.3f", a.fsim_delta) + "%;";
    c.Expect(a.images == images, "aggregate at Q" + std::to_string(a.quality) +
                                     " covers " + std::to_string(a.images) + " images");
    c.Expect(a.size_delta < 0, "mean size delta not negative at Q" +
                                   std::to_string(a.quality) + " (" +
                                   Fmt("%+.3f", a.size_delta) + "%)");
    if (a.quality == 95) {
      c.Expect(a.fsim_delta >= -1.0,
               "mean FSIM drop above 1% at Q95 (" + Fmt("%+.3f", a.fsim_delta) + "%)");
    }
  }
  c.Expect(seen == 4, "expected 4 fused aggregates, got " + std::to_string(seen));
  details += " report in " + bench.output_dir;
  return {c.ok(), c.ok() ? details : c.Summary() + "; " + details};
}

// ---- 7 -----------------------------------------------------------------

std::string MachineDescription() {
  std::ifstream in("/proc/cpuinfo");
  std::string line, model = "unknown CPU";
  int cores = 0;
  while (std::getline(in, line)) {
    if (line.rfind("model name", 0) == 0) {
      model = line.substr(line.find(':') + 2);
      ++cores;
    }
  }
  return model + " (" + std::to_string(cores) + " logical cores visible)";
}

Outcome PredictionLatency(const std::string& work_dir) {
  Checker c;
  std::ostringstream sink;
  ClusterOptions cluster;
  cluster.corpus_dir = testing::DeskCorpusDir();
  cluster.model_path = work_dir + "/latency.qtm";
  cluster.k = 8;
  cluster.stride = 256;
  TextureModel model = RunCluster(cluster, sink).model;
  Rng rng(7);
  for (int t = 0; t < model.k(); ++t) {
    model.tables.emplace(t, UnscaleTable(testing::RandomTable(rng, ComponentKind::kLuminance,
                                                              2, 99), 50));
  }
  model.anneal_quality = 50;

  // 2048 x 1365 photo, upscaled from a desk image.
  const RasterImage src = ReadImage(testing::DeskCorpusDir() + "/chelsea.png");
  const RasterImage image = ResizeBilinear(src, 2048, 1365);
  std::vector<double> times;
  QuantTable fused = StandardLuminanceTable();
  for (int r = 0; r < 5; ++r) {
    const auto start = std::chrono::steady_clock::now();
    const TextureDistribution dist = PredictDistribution(image, model, 1);
    fused = FusedTable(model, dist, 75);
    times.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  std::sort(times.begin(), times.end());
  const double median = times[2];
  const double worst = times.back();
  c.Expect(worst < 1.0, "predict+fuse took " + Fmt("%.3f", worst) + " s");
  const std::string machine = MachineDescription();
  const std::string details = "2048x1365 image, 1 worker: median " + Fmt("%.1f", median * 1e3) +
                              " ms, max " + Fmt("%.1f", worst * 1e3) + " ms over 5 runs on " +
                              machine;
  WriteFileText(work_dir + "/latency_report.txt", details + "\n");
  return {c.ok(), c.ok() ? details : c.Summary() + "; " + details};
}

// ---- 8 -----------------------------------------------------------------

Outcome CodecInterop(const std::string&) {
  Checker c;
  int decoded = 0, emitted = 0, compared = 0;
  double worst_ratio = 0;
  Rng rng(8);
  for (const std::string& path : testing::DeskImages()) {
    const RasterImage img = ReadImage(path);
    const std::string name = fs::path(path).filename().string();
    for (Subsampling ss : {Subsampling::k420, Subsampling::k444}) {
      for (int q : {35, 50, 75, 95}) {
        EncodeOptions opts;
        opts.subsampling = ss;
        const JpegBlob ours = Encode(img, ScaleTable(StandardLuminanceTable(), q),
                                     ScaleTable(StandardChrominanceTable(), q), opts);
        const auto ref = testing::LibjpegEncode(img, q, ss);
        const double ratio =
            static_cast<double>(ours.size()) / static_cast<double>(ref.size()) - 1.0;
        worst_ratio = std::max(worst_ratio, std::abs(ratio));
        c.Expect(std::abs(ratio) <= 0.10, name + " Q" + std::to_string(q) + " " +
                                             std::string(SubsamplingName(ss)) +
                                             " size off by " + Fmt("%+.2f", ratio * 100) + "%");
        ++compared;

        // The standard stream plus one with arbitrary tables and one with
        // optimized Huffman coding.
        std::vector<JpegBlob> blobs = {ours};
        blobs.push_back(Encode(img, testing::RandomTable(rng, ComponentKind::kLuminance),
                               testing::RandomTable(rng, ComponentKind::kChrominance), opts));
        opts.optimize_huffman = true;
        blobs.push_back(Encode(img, ScaleTable(StandardLuminanceTable(), q),
                               ScaleTable(StandardChrominanceTable(), q), opts));
        for (const JpegBlob& b : blobs) {
          ++emitted;
          const testing::LibjpegImage d = testing::LibjpegDecode(b.bytes());
          const bool ok = d.ok && d.warnings == 0 && d.width == img.width() &&
                          d.height == img.height();
          c.Expect(ok, name + " Q" + std::to_string(q) + ": " +
                           (d.ok ? "warnings or wrong shape" : d.error));
          decoded += ok;
        }
      }
    }
  }
  return {c.ok(), c.ok() ? std::to_string(decoded) + "/" + std::to_string(emitted) +
                               " emitted JPEGs decoded by libjpeg; size within " +
                               Fmt("%.2f", worst_ratio * 100) + "% of libjpeg over " +
                               std::to_string(compared) + " matched encodes (limit 10%)"
                         : c.Summary()};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome(const std::string&)> run;
};

const std::vector<Criterion>& Criteria() {
  static const std::vector<Criterion> kCriteria = {
      {1, "scaling exactness", ScalingExactness},
      {2, "temperature/probability exactness", TemperatureProbability},
      {3, "metric oracles", MetricOracles},
      {4, "annealing feasibility and determinism", AnnealingFeasibilityDeterminism},
      {5, "fusion properties", FusionProperties},
      {6, "end-to-end rate-distortion direction", EndToEnd},
      {7, "prediction latency", PredictionLatency},
      {8, "codec interop", CodecInterop},
  };
  return kCriteria;
}

bool RunOne(const Criterion& c, const std::string& work_root) {
  const std::string dir = work_root + "/criterion_" + std::to_string(c.id);
  fs::remove_all(dir);
  fs::create_directories(dir);
  Outcome out;
  try {
    out = c.run(dir);
  } catch (const Error& e) {
    out = {false, std::string("error ") + std::string(ErrorCodeName(e.code())) + ": " + e.what()};
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  std::cout << (out.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": "
            << out.details << std::endl;
  return out.pass;
}

}  // namespace
}  // namespace qtfuse::acceptance

int main(int argc, char** argv) {
  using qtfuse::acceptance::Criteria;
  CLI::App app{"Acceptance checks"};
  int criterion = 0;
  std::string work_dir = "acceptance_work";
  app.add_option("--criterion", criterion, "Criterion to run (0: all)")
      ->check(CLI::Range(0, static_cast<int>(Criteria().size())));
  app.add_option("--work-dir", work_dir, "Scratch directory for outputs");
  CLI11_PARSE(app, argc, argv);
  bool ok = true;
  for (const auto& c : Criteria()) {
    if (criterion == 0 || criterion == c.id) ok &= qtfuse::acceptance::RunOne(c, work_dir);
  }
  return ok ? 0 : 1;
}
