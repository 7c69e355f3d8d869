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

#ifndef QTFUSE_ANNEALER_H_
#define QTFUSE_ANNEALER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qtfuse/image.h"
#include "qtfuse/jpeg.h"
#include "qtfuse/quant_table.h"
#include "qtfuse/rng.h"

namespace qtfuse {

// Which feasible accepted state Anneal returns. kMinSize ranks by
// compressed size, then energy; kMinEnergy ranks by energy alone.
enum class AnnealSelection { kMinSize, kMinEnergy };

std::string_view AnnealSelectionName(AnnealSelection s);
AnnealSelection ParseAnnealSelection(std::string_view name);

struct AnnealConfig {
  int max_iterations = 2000;  // M
  double p = 10.0;            // temperature shape
  double gamma = 0.01;        // FSIM tolerance
  int anneal_quality = 50;
  uint64_t seed = 1;
  int max_reproposals = 50;
  Subsampling subsampling = Subsampling::k420;
  AnnealSelection selection = AnnealSelection::kMinSize;

  void Validate() const;
};

enum class AcceptKind { kImprove, kWorseAccepted, kKept };

std::string_view AcceptKindName(AcceptKind kind);

// State after iteration `iteration`. For kImprove the probability column
// is 1; for the other kinds it is the last probability drawn against.
struct AnnealRecord {
  int iteration;
  int proposals;
  AcceptKind kind;
  size_t size;
  double fsim;
  double energy;
  double temperature;
  double probability;
  bool feasible;

  bool accepted() const { return kind != AcceptKind::kKept; }
  bool operator==(const AnnealRecord&) const = default;
};

struct AnnealTrace {
  size_t baseline_size = 0;
  double baseline_fsim = 0.0;
  std::vector<AnnealRecord> records;

  bool operator==(const AnnealTrace&) const = default;
};

struct AnnealResult {
  QuantTable table;  // at config.anneal_quality
  size_t size;
  double fsim;
  double energy;
  AnnealTrace trace;
};

// M / (M + i * p); 1 at i = 0.
double Temperature(int i, const AnnealConfig& config);

// size * (1 - fsim).
double Energy(size_t size, double fsim);

// clamp((s / s_prev) * T(i), 0, 1). s_prev <= 0 raises kDegenerateEnergy.
double AcceptProbability(double s, double s_prev, int i, const AnnealConfig& config);

// Moves n in {1..4} distinct entries by +-1 (clamped to [1, 255]).
// Entries are drawn without replacement with weight 1 / value.
QuantTable Propose(const QuantTable& current, Rng& rng);

using AnnealObserver = std::function<void(const AnnealRecord&)>;

// Anneals the luminance table on `mosaic`, starting from the standard
// table at the annealing quality. Chrominance stays at the scaled standard
// table. Returns the best accepted state, per config.selection, among
// those passing the FSIM tolerance gate; the baseline counts as one.
AnnealResult Anneal(const RasterImage& mosaic, const AnnealConfig& config,
                    const AnnealObserver& observer = {});

using AnnealAllObserver = std::function<void(int texture, const AnnealRecord&)>;

// One independent run per mosaic, all with config.seed, on up to
// `workers` threads. The observer may be called concurrently.
std::map<int, AnnealResult> AnnealAll(const std::map<int, RasterImage>& mosaics,
                                      const AnnealConfig& config, int workers,
                                      const AnnealAllObserver& observer = {});

// CSV, one row per record, preceded by '#' lines with the config and the
// baseline.
std::string FormatTrace(const AnnealTrace& trace, const AnnealConfig& config);

}  // namespace qtfuse

#endif  // QTFUSE_ANNEALER_H_
