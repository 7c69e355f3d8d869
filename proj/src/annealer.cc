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

#include "qtfuse/annealer.h"

#include <algorithm>
#include <array>
#include <cstdio>
#include <mutex>
#include <optional>

#include "qtfuse/error.h"
#include "qtfuse/metrics.h"
#include "qtfuse/parallel.h"

namespace qtfuse {

void AnnealConfig::Validate() const {
  Require(max_iterations >= 0, "M must be >= 0");
  Require(p > 0.0, "p must be > 0");
  Require(gamma >= 0.0 && gamma < 1.0, "gamma must be in [0, 1)");
  Require(anneal_quality >= 1 && anneal_quality <= 100,
          "annealing quality must be in [1, 100]");
  Require(max_reproposals >= 1, "max_reproposals must be >= 1");
}

std::string_view AcceptKindName(AcceptKind kind) {
  switch (kind) {
    case AcceptKind::kImprove: return "improve";
    case AcceptKind::kWorseAccepted: return "worse-accepted";
    case AcceptKind::kKept: return "kept";
  }
  return "?";
}

std::string_view AnnealSelectionName(AnnealSelection s) {
  return s == AnnealSelection::kMinSize ? "min-size" : "min-energy";
}

AnnealSelection ParseAnnealSelection(std::string_view name) {
  if (name == "min-size") return AnnealSelection::kMinSize;
  if (name == "min-energy") return AnnealSelection::kMinEnergy;
  Fail(ErrorCode::kInvalidArgument, "unknown selection: " + std::string(name));
}

double Temperature(int i, const AnnealConfig& config) {
  Require(i >= 0 && i <= std::max(config.max_iterations, 0),
          "iteration out of range");
  if (i == 0) return 1.0;
  const double m = config.max_iterations;
  return m / (m + i * config.p);
}

double Energy(size_t size, double fsim) {
  return static_cast<double>(size) * (1.0 - fsim);
}

double AcceptProbability(double s, double s_prev, int i, const AnnealConfig& config) {
  if (!(s_prev > 0.0)) {
    Fail(ErrorCode::kDegenerateEnergy, "previous energy must be > 0");
  }
  return std::clamp((s / s_prev) * Temperature(i, config), 0.0, 1.0);
}

QuantTable Propose(const QuantTable& current, Rng& rng) {
  const int n = 1 + static_cast<int>(rng.Below(4));
  std::array<double, kDctBlockSize> weight;
  for (size_t k = 0; k < kDctBlockSize; ++k) weight[k] = 1.0 / current[k];
  QuantTable::Values values = current.values();
  for (int pick = 0; pick < n; ++pick) {
    double total = 0.0;
    for (double w : weight) total += w;
    const double target = rng.Uniform() * total;
    double acc = 0.0;
    size_t chosen = kDctBlockSize;
    for (size_t k = 0; k < kDctBlockSize; ++k) {
      if (weight[k] == 0.0) continue;
      acc += weight[k];
      chosen = k;
      if (acc > target) break;
    }
    weight[chosen] = 0.0;
    values[chosen] = std::clamp(values[chosen] + (rng.Coin() ? 1 : -1), 1, 255);
  }
  return QuantTable(values, current.kind());
}

namespace {

struct Evaluation {
  size_t size;
  double fsim;
  double energy;
};

class MosaicScorer {
 public:
  MosaicScorer(const RasterImage& mosaic, const QuantTable& chroma, Subsampling s)
      : mosaic_(mosaic), chroma_(chroma), reference_(Luma(mosaic)) {
    options_.subsampling = s;
  }

  Evaluation Evaluate(const QuantTable& luma) const {
    const JpegBlob blob = Encode(mosaic_, luma, chroma_, options_);
    const double fsim = reference_.Score(Luma(Decode(blob)));
    return {blob.size(), fsim, Energy(blob.size(), fsim)};
  }

 private:
  const RasterImage& mosaic_;
  QuantTable chroma_;
  FsimReference reference_;
  EncodeOptions options_;
};

}  // namespace

AnnealResult Anneal(const RasterImage& mosaic, const AnnealConfig& config,
                    const AnnealObserver& observer) {
  config.Validate();
  Require(mosaic.width() >= 64 && mosaic.height() >= 64, "mosaic must be at least 64x64");
  const int q = config.anneal_quality;
  const MosaicScorer scorer(mosaic, ScaleTable(StandardChrominanceTable(), q),
                            config.subsampling);

  QuantTable current = ScaleTable(StandardLuminanceTable(), q);
  const Evaluation baseline = scorer.Evaluate(current);
  Evaluation state = baseline;

  AnnealResult best{current, baseline.size, baseline.fsim, baseline.energy, {}};
  best.trace.baseline_size = baseline.size;
  best.trace.baseline_fsim = baseline.fsim;

  Rng rng(config.seed);
  for (int i = 1; i <= config.max_iterations; ++i) {
    try {
      AnnealRecord record{};
      record.iteration = i;
      record.kind = AcceptKind::kKept;
      record.temperature = Temperature(i, config);
      for (int attempt = 1; attempt <= config.max_reproposals; ++attempt) {
        record.proposals = attempt;
        QuantTable candidate = Propose(current, rng);
        const Evaluation e = scorer.Evaluate(candidate);
        const bool feasible = QualityWithinTolerance(e.fsim, baseline.fsim, config.gamma);
        std::optional<AcceptKind> accept;
        if (e.size < state.size && feasible) {
          record.probability = 1.0;
          accept = AcceptKind::kImprove;
        } else {
          record.probability = AcceptProbability(e.energy, state.energy, i, config);
          if (rng.Uniform() < record.probability) accept = AcceptKind::kWorseAccepted;
        }
        if (accept) {
          record.kind = *accept;
          current = std::move(candidate);
          state = e;
          const bool better =
              config.selection == AnnealSelection::kMinEnergy
                  ? e.energy < best.energy
                  : e.size < best.size || (e.size == best.size && e.energy < best.energy);
          if (feasible && better) {
            best.table = current;
            best.size = e.size;
            best.fsim = e.fsim;
            best.energy = e.energy;
          }
          break;
        }
      }
      record.size = state.size;
      record.fsim = state.fsim;
      record.energy = state.energy;
      record.feasible = QualityWithinTolerance(state.fsim, baseline.fsim, config.gamma);
      best.trace.records.push_back(record);
      if (observer) observer(record);
    } catch (const Error& e) {
      Fail(e.code(), "annealing iteration " + std::to_string(i) + ": " + e.what());
    }
  }
  return best;
}

std::map<int, AnnealResult> AnnealAll(const std::map<int, RasterImage>& mosaics,
                                      const AnnealConfig& config, int workers,
                                      const AnnealAllObserver& observer) {
  config.Validate();
  std::vector<int> ids;
  for (const auto& [id, m] : mosaics) ids.push_back(id);
  std::vector<std::optional<AnnealResult>> results(ids.size());
  ParallelFor(ids.size(), workers, [&](size_t k) {
    try {
      AnnealObserver per_texture;
      if (observer) {
        per_texture = [&, id = ids[k]](const AnnealRecord& r) { observer(id, r); };
      }
      results[k] = Anneal(mosaics.at(ids[k]), config, per_texture);
    } catch (const Error& e) {
      Fail(e.code(), "texture " + std::to_string(ids[k]) + ": " + e.what());
    }
  });
  std::map<int, AnnealResult> out;
  for (size_t k = 0; k < ids.size(); ++k) out.emplace(ids[k], std::move(*results[k]));
  return out;
}

std::string FormatTrace(const AnnealTrace& trace, const AnnealConfig& config) {
  std::string out;
  char line[512];
  std::snprintf(line, sizeof(line),
                "# M=%d p=%.17g gamma=%.17g anneal_quality=%d seed=%llu "
                "max_reproposals=%d subsampling=%s selection=%s\n",
                config.max_iterations, config.p, config.gamma, config.anneal_quality,
                static_cast<unsigned long long>(config.seed), config.max_reproposals,
                std::string(SubsamplingName(config.subsampling)).c_str(),
                std::string(AnnealSelectionName(config.selection)).c_str());
  out += line;
  std::snprintf(line, sizeof(line), "# baseline_size=%zu baseline_fsim=%.17g\n",
                trace.baseline_size, trace.baseline_fsim);
  out += line;
  out += "i,proposals,accepted,kind,size,fsim,energy,temperature,probability,feasible\n";
  for (const auto& r : trace.records) {
    std::snprintf(line, sizeof(line), "%d,%d,%d,%s,%zu,%.17g,%.17g,%.17g,%.17g,%d\n",
                  r.iteration, r.proposals, r.accepted() ? 1 : 0,
                  std::string(AcceptKindName(r.kind)).c_str(), r.size, r.fsim,
                  r.energy, r.temperature, r.probability, r.feasible ? 1 : 0);
    out += line;
  }
  return out;
}

}  // namespace qtfuse
