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

#ifndef QTFUSE_METRICS_H_
#define QTFUSE_METRICS_H_

#include <memory>
#include <string_view>

#include "qtfuse/image.h"

namespace qtfuse {

enum class MetricKind { kPsnr, kSsim, kFsim };

std::string_view MetricKindName(MetricKind kind);

// PSNR is in dB and is +infinity for identical inputs; SSIM and FSIM are
// in [0, 1] for natural 8-bit images.
struct QualityScore {
  MetricKind kind;
  double value;
};

// All metrics work on BT.601 luminance; the RasterImage overloads convert
// with Luma().
double Psnr(const PlaneF& a, const PlaneF& b);
double Ssim(const PlaneF& a, const PlaneF& b);
double Fsim(const PlaneF& a, const PlaneF& b);

QualityScore Psnr(const RasterImage& a, const RasterImage& b);
QualityScore Ssim(const RasterImage& a, const RasterImage& b);
QualityScore Fsim(const RasterImage& a, const RasterImage& b);

constexpr int kSsimMinDimension = 11;
constexpr int kFsimMinDimension = 32;

// FSIM against a fixed reference image. The reference side (downsampling,
// phase congruency, gradient magnitude) is computed once, which is what a
// search loop scoring many candidates against one original wants.
// Score(x) is bit-identical to Fsim(reference, x).
class FsimReference {
 public:
  explicit FsimReference(const PlaneF& reference);
  ~FsimReference();
  FsimReference(FsimReference&&) noexcept;
  FsimReference& operator=(FsimReference&&) noexcept;

  double Score(const PlaneF& distorted) const;

  int width() const;
  int height() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// FSIM(raw, candidate) >= FSIM(raw, baseline) * (1 - gamma).
bool QualityWithinTolerance(double candidate_fsim, double baseline_fsim,
                            double gamma);
bool QualityWithinTolerance(const RasterImage& raw,
                            const RasterImage& candidate,
                            const RasterImage& baseline, double gamma);

}  // namespace qtfuse

#endif  // QTFUSE_METRICS_H_
