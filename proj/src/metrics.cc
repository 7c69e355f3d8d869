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

#include "qtfuse/metrics.h"

#include <array>
#include <cmath>
#include <limits>

#include "qtfuse/error.h"
#include "qtfuse/phase_congruency.h"

namespace qtfuse {

namespace {

void RequireSameShape(const PlaneF& a, const PlaneF& b) {
  if (a.width != b.width || a.height != b.height) {
    Fail(ErrorCode::kInvalidArgument,
         "dimension mismatch: " + std::to_string(a.width) + "x" +
             std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
             std::to_string(b.height));
  }
}

void RequireMinDimension(const PlaneF& a, int min_dim, const char* metric) {
  if (a.width < min_dim || a.height < min_dim) {
    Fail(ErrorCode::kInvalidArgument, std::string(metric) + " needs images of at least " +
                                          std::to_string(min_dim) + "x" +
                                          std::to_string(min_dim));
  }
}

// ---- SSIM -----------------------------------------------------------------

constexpr int kSsimRadius = 5;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimC1 = (0.01 * 255) * (0.01 * 255);
constexpr double kSsimC2 = (0.03 * 255) * (0.03 * 255);

std::array<double, 2 * kSsimRadius + 1> SsimKernel() {
  std::array<double, 2 * kSsimRadius + 1> k;
  double sum = 0.0;
  for (int i = -kSsimRadius; i <= kSsimRadius; ++i) {
    k[i + kSsimRadius] = std::exp(-0.5 * i * i / (kSsimSigma * kSsimSigma));
    sum += k[i + kSsimRadius];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable Gaussian filter, keeping only positions where the window fits.
PlaneF FilterValid(const PlaneF& in) {
  static const auto kernel = SsimKernel();
  const int taps = 2 * kSsimRadius + 1;
  const int ow = in.width - taps + 1, oh = in.height - taps + 1;
  PlaneF rows(ow, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < taps; ++k) s += kernel[k] * in.at(x + k, y);
      rows.at(x, y) = s;
    }
  }
  PlaneF out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < taps; ++k) s += kernel[k] * rows.at(x, y + k);
      out.at(x, y) = s;
    }
  }
  return out;
}

// ---- FSIM -----------------------------------------------------------------

constexpr double kPcStability = 0.85;
constexpr double kGradientStability = 160.0;

// Box average over an f x f window (zero padded, MATLAB conv2 'same'
// alignment) sampled every f pixels.
PlaneF Downsample(const PlaneF& in, int f) {
  if (f == 1) return in;
  const int ow = (in.width + f - 1) / f, oh = (in.height + f - 1) / f;
  const int offset = f / 2;
  PlaneF out(ow, oh);
  const double inv = 1.0 / (static_cast<double>(f) * f);
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      const int cy = oy * f + offset, cx = ox * f + offset;
      double s = 0.0;
      for (int y = cy - f + 1; y <= cy; ++y) {
        if (y < 0 || y >= in.height) continue;
        for (int x = cx - f + 1; x <= cx; ++x) {
          if (x < 0 || x >= in.width) continue;
          s += in.at(x, y);
        }
      }
      out.at(ox, oy) = s * inv;
    }
  }
  return out;
}

int FsimDownsampleFactor(int width, int height) {
  return std::max(1L, std::lround(std::min(width, height) / 256.0));
}

// Scharr gradient magnitude with zero padding.
PlaneF GradientMagnitude(const PlaneF& in) {
  static constexpr double kDx[3][3] = {{3, 0, -3}, {10, 0, -10}, {3, 0, -3}};
  static constexpr double kDy[3][3] = {{3, 10, 3}, {0, 0, 0}, {-3, -10, -3}};
  PlaneF out(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      double gx = 0.0, gy = 0.0;
      for (int j = -1; j <= 1; ++j) {
        const int yy = y + j;
        if (yy < 0 || yy >= in.height) continue;
        for (int i = -1; i <= 1; ++i) {
          const int xx = x + i;
          if (xx < 0 || xx >= in.width) continue;
          const double v = in.at(xx, yy);
          gx += kDx[j + 1][i + 1] * v;
          gy += kDy[j + 1][i + 1] * v;
        }
      }
      out.at(x, y) = std::sqrt(gx * gx + gy * gy) / 16.0;
    }
  }
  return out;
}

}  // namespace

std::string_view MetricKindName(MetricKind kind) {
  switch (kind) {
    case MetricKind::kPsnr:
      return "psnr";
    case MetricKind::kSsim:
      return "ssim";
    case MetricKind::kFsim:
      return "fsim";
  }
  return "unknown";
}

double Psnr(const PlaneF& a, const PlaneF& b) {
  RequireSameShape(a, b);
  double sse = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    sse += d * d;
  }
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sse / static_cast<double>(a.data.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double Ssim(const PlaneF& a, const PlaneF& b) {
  RequireSameShape(a, b);
  RequireMinDimension(a, kSsimMinDimension, "SSIM");
  const size_t n = a.data.size();
  PlaneF aa(a.width, a.height), bb(a.width, a.height), ab(a.width, a.height);
  for (size_t i = 0; i < n; ++i) {
    aa.data[i] = a.data[i] * a.data[i];
    bb.data[i] = b.data[i] * b.data[i];
    ab.data[i] = a.data[i] * b.data[i];
  }
  const PlaneF mu_a = FilterValid(a), mu_b = FilterValid(b);
  const PlaneF e_aa = FilterValid(aa), e_bb = FilterValid(bb), e_ab = FilterValid(ab);
  double sum = 0.0;
  for (size_t i = 0; i < mu_a.data.size(); ++i) {
    const double ma = mu_a.data[i], mb = mu_b.data[i];
    const double va = e_aa.data[i] - ma * ma;
    const double vb = e_bb.data[i] - mb * mb;
    const double cov = e_ab.data[i] - ma * mb;
    sum += ((2 * ma * mb + kSsimC1) * (2 * cov + kSsimC2)) /
           ((ma * ma + mb * mb + kSsimC1) * (va + vb + kSsimC2));
  }
  return sum / static_cast<double>(mu_a.data.size());
}

struct FsimReference::Impl {
  int width = 0;
  int height = 0;
  int factor = 1;
  std::shared_ptr<const PhaseCongruency> pc;
  PlaneF pc_ref;
  PlaneF grad_ref;
};

FsimReference::FsimReference(const PlaneF& reference)
    : impl_(std::make_unique<Impl>()) {
  RequireMinDimension(reference, kFsimMinDimension, "FSIM");
  impl_->width = reference.width;
  impl_->height = reference.height;
  impl_->factor = FsimDownsampleFactor(reference.width, reference.height);
  const PlaneF small = Downsample(reference, impl_->factor);
  impl_->pc = PhaseCongruency::ForSize(small.width, small.height);
  impl_->pc_ref = impl_->pc->Compute(small);
  impl_->grad_ref = GradientMagnitude(small);
}

FsimReference::~FsimReference() = default;
FsimReference::FsimReference(FsimReference&&) noexcept = default;
FsimReference& FsimReference::operator=(FsimReference&&) noexcept = default;

int FsimReference::width() const { return impl_->width; }
int FsimReference::height() const { return impl_->height; }

double FsimReference::Score(const PlaneF& distorted) const {
  if (distorted.width != impl_->width || distorted.height != impl_->height) {
    Fail(ErrorCode::kInvalidArgument, "dimension mismatch against FSIM reference");
  }
  const PlaneF small = Downsample(distorted, impl_->factor);
  const PlaneF pc = impl_->pc->Compute(small);
  const PlaneF grad = GradientMagnitude(small);
  const PlaneF& pc_ref = impl_->pc_ref;
  const PlaneF& grad_ref = impl_->grad_ref;
  double weighted = 0.0, weight = 0.0, grad_only = 0.0;
  for (size_t i = 0; i < pc.data.size(); ++i) {
    const double p1 = pc_ref.data[i], p2 = pc.data[i];
    const double g1 = grad_ref.data[i], g2 = grad.data[i];
    const double pc_sim = (2 * p1 * p2 + kPcStability) / (p1 * p1 + p2 * p2 + kPcStability);
    const double g_sim = (2 * g1 * g2 + kGradientStability) /
                         (g1 * g1 + g2 * g2 + kGradientStability);
    const double pcm = std::max(p1, p2);
    weighted += g_sim * pc_sim * pcm;
    weight += pcm;
    grad_only += g_sim;
  }
  // Featureless images (no phase congruency anywhere) fall back to the
  // unweighted gradient similarity.
  if (weight == 0.0) return grad_only / static_cast<double>(pc.data.size());
  return weighted / weight;
}

double Fsim(const PlaneF& a, const PlaneF& b) {
  RequireSameShape(a, b);
  return FsimReference(a).Score(b);
}

QualityScore Psnr(const RasterImage& a, const RasterImage& b) {
  return {MetricKind::kPsnr, Psnr(Luma(a), Luma(b))};
}

QualityScore Ssim(const RasterImage& a, const RasterImage& b) {
  return {MetricKind::kSsim, Ssim(Luma(a), Luma(b))};
}

QualityScore Fsim(const RasterImage& a, const RasterImage& b) {
  return {MetricKind::kFsim, Fsim(Luma(a), Luma(b))};
}

bool QualityWithinTolerance(double candidate_fsim, double baseline_fsim,
                            double gamma) {
  Require(gamma >= 0.0 && gamma < 1.0, "gamma must be in [0, 1)");
  return candidate_fsim >= baseline_fsim * (1.0 - gamma);
}

bool QualityWithinTolerance(const RasterImage& raw, const RasterImage& candidate,
                            const RasterImage& baseline, double gamma) {
  Require(gamma >= 0.0 && gamma < 1.0, "gamma must be in [0, 1)");
  const PlaneF raw_luma = Luma(raw);
  const PlaneF cand = Luma(candidate), base = Luma(baseline);
  RequireSameShape(raw_luma, cand);
  RequireSameShape(raw_luma, base);
  const FsimReference ref(raw_luma);
  return QualityWithinTolerance(ref.Score(cand), ref.Score(base), gamma);
}

}  // namespace qtfuse
