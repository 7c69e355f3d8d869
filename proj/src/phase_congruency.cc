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

#include "qtfuse/phase_congruency.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

namespace qtfuse {

namespace {

constexpr double kMinWavelength = 6.0;
constexpr double kScaleMult = 2.0;
constexpr double kSigmaOnf = 0.55;
constexpr double kDThetaOnSigma = 1.2;
constexpr double kNoiseStdDevs = 2.0;
constexpr double kEpsilon = 1e-4;
constexpr double kLowpassCutoff = 0.45;
constexpr int kLowpassOrder = 15;

// fftw planning is not thread-safe; execution on new arrays is.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

ComplexBuffer AllocComplex(size_t n) {
  return ComplexBuffer(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

// Normalized frequency coordinate along one axis, before the quadrant swap.
std::vector<double> AxisRange(int n) {
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) {
    r[i] = (n % 2) ? (i - (n - 1) / 2.0) / (n - 1) : (i - n / 2.0) / n;
  }
  return r;
}

// ifftshift of a coordinate axis: element floor(n/2) moves to index 0.
std::vector<double> Shifted(const std::vector<double>& r) {
  const size_t n = r.size();
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = r[(i + n / 2) % n];
  return out;
}

double Median(std::vector<double> v) {
  const size_t n = v.size();
  const size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (n % 2) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

}  // namespace

struct PhaseCongruency::Impl {
  size_t n = 0;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  // filters[o][s], frequency domain, unshifted layout.
  std::vector<std::vector<std::vector<double>>> filters;
  std::vector<double> em_n;           // per orientation
  std::vector<double> sum_an2;        // per orientation
  std::vector<double> sum_ai_aj;      // per orientation

  ~Impl() {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

PhaseCongruency::PhaseCongruency(int width, int height)
    : width_(width), height_(height), impl_(std::make_unique<Impl>()) {
  const int rows = height, cols = width;
  const size_t n = static_cast<size_t>(rows) * cols;
  impl_->n = n;
  {
    ComplexBuffer a = AllocComplex(n), b = AllocComplex(n);
    std::lock_guard<std::mutex> lock(PlannerMutex());
    impl_->forward = fftw_plan_dft_2d(rows, cols, a.get(), b.get(),
                                      FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->backward = fftw_plan_dft_2d(rows, cols, a.get(), b.get(),
                                       FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  const std::vector<double> xr = AxisRange(cols), yr = AxisRange(rows);
  const std::vector<double> xs = Shifted(xr), ys = Shifted(yr);
  std::vector<double> radius(n), sintheta(n), costheta(n), lowpass(n);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const size_t i = static_cast<size_t>(r) * cols + c;
      const double x = xs[c], y = ys[r];
      const double rad = std::sqrt(x * x + y * y);
      lowpass[i] =
          1.0 / (1.0 + std::pow(rad / kLowpassCutoff, 2 * kLowpassOrder));
      radius[i] = rad;
      const double theta = std::atan2(-y, x);
      sintheta[i] = std::sin(theta);
      costheta[i] = std::cos(theta);
    }
  }
  radius[0] = 1.0;

  std::vector<std::vector<double>> log_gabor(kScales, std::vector<double>(n));
  const double log_sigma = std::log(kSigmaOnf);
  for (int s = 0; s < kScales; ++s) {
    const double fo = 1.0 / (kMinWavelength * std::pow(kScaleMult, s));
    for (size_t i = 0; i < n; ++i) {
      const double l = std::log(radius[i] / fo);
      log_gabor[s][i] =
          std::exp(-(l * l) / (2 * log_sigma * log_sigma)) * lowpass[i];
    }
    log_gabor[s][0] = 0.0;
  }

  const double theta_sigma = std::numbers::pi / kOrientations / kDThetaOnSigma;
  impl_->filters.assign(kOrientations, {});
  impl_->em_n.assign(kOrientations, 0.0);
  impl_->sum_an2.assign(kOrientations, 0.0);
  impl_->sum_ai_aj.assign(kOrientations, 0.0);
  ComplexBuffer in = AllocComplex(n), out = AllocComplex(n);
  const double root_n = std::sqrt(static_cast<double>(n));
  for (int o = 0; o < kOrientations; ++o) {
    const double angle = o * std::numbers::pi / kOrientations;
    const double ca = std::cos(angle), sa = std::sin(angle);
    std::vector<double> spread(n);
    for (size_t i = 0; i < n; ++i) {
      const double ds = sintheta[i] * ca - costheta[i] * sa;
      const double dc = costheta[i] * ca + sintheta[i] * sa;
      const double dtheta = std::abs(std::atan2(ds, dc));
      spread[i] = std::exp(-(dtheta * dtheta) / (2 * theta_sigma * theta_sigma));
    }
    std::vector<std::vector<double>> spatial(kScales);
    for (int s = 0; s < kScales; ++s) {
      std::vector<double> filter(n);
      for (size_t i = 0; i < n; ++i) filter[i] = log_gabor[s][i] * spread[i];
      if (s == 0) {
        double e = 0.0;
        for (double f : filter) e += f * f;
        impl_->em_n[o] = e;
      }
      // real(ifft2(filter)) * sqrt(rows * cols)
      for (size_t i = 0; i < n; ++i) {
        in[i][0] = filter[i];
        in[i][1] = 0.0;
      }
      fftw_execute_dft(impl_->backward, in.get(), out.get());
      spatial[s].resize(n);
      for (size_t i = 0; i < n; ++i) spatial[s][i] = out[i][0] / n * root_n;
      impl_->filters[o].push_back(std::move(filter));
    }
    double an2 = 0.0;
    for (int s = 0; s < kScales; ++s) {
      for (double v : spatial[s]) an2 += v * v;
    }
    double aiaj = 0.0;
    for (int si = 0; si < kScales - 1; ++si) {
      for (int sj = si + 1; sj < kScales; ++sj) {
        for (size_t i = 0; i < n; ++i) aiaj += spatial[si][i] * spatial[sj][i];
      }
    }
    impl_->sum_an2[o] = an2;
    impl_->sum_ai_aj[o] = aiaj;
  }
}

PhaseCongruency::~PhaseCongruency() = default;

std::shared_ptr<const PhaseCongruency> PhaseCongruency::ForSize(int width,
                                                                int height) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const PhaseCongruency>>
      cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{width, height}];
  if (!slot) slot = std::make_shared<const PhaseCongruency>(width, height);
  return slot;
}

PlaneF PhaseCongruency::Compute(const PlaneF& image) const {
  const size_t n = impl_->n;
  ComplexBuffer spectrum = AllocComplex(n), work = AllocComplex(n);
  for (size_t i = 0; i < n; ++i) {
    work[i][0] = image.data[i];
    work[i][1] = 0.0;
  }
  fftw_execute_dft(impl_->forward, work.get(), spectrum.get());

  std::vector<ComplexBuffer> eo;
  for (int s = 0; s < kScales; ++s) eo.push_back(AllocComplex(n));
  std::vector<double> energy_all(n, 0.0), an_all(n, 0.0);
  std::vector<double> sum_e(n), sum_o(n), energy(n), e2(n);
  const double inv_n = 1.0 / static_cast<double>(n);

  for (int o = 0; o < kOrientations; ++o) {
    std::fill(sum_e.begin(), sum_e.end(), 0.0);
    std::fill(sum_o.begin(), sum_o.end(), 0.0);
    std::fill(energy.begin(), energy.end(), 0.0);
    for (int s = 0; s < kScales; ++s) {
      const std::vector<double>& filter = impl_->filters[o][s];
      for (size_t i = 0; i < n; ++i) {
        work[i][0] = spectrum[i][0] * filter[i];
        work[i][1] = spectrum[i][1] * filter[i];
      }
      fftw_execute_dft(impl_->backward, work.get(), eo[s].get());
      fftw_complex* r = eo[s].get();
      for (size_t i = 0; i < n; ++i) {
        r[i][0] *= inv_n;
        r[i][1] *= inv_n;
        an_all[i] += std::sqrt(r[i][0] * r[i][0] + r[i][1] * r[i][1]);
        sum_e[i] += r[i][0];
        sum_o[i] += r[i][1];
      }
    }
    for (int s = 0; s < kScales; ++s) {
      const fftw_complex* r = eo[s].get();
      for (size_t i = 0; i < n; ++i) {
        const double x_energy =
            std::sqrt(sum_e[i] * sum_e[i] + sum_o[i] * sum_o[i]) + kEpsilon;
        const double mean_e = sum_e[i] / x_energy;
        const double mean_o = sum_o[i] / x_energy;
        const double e = r[i][0], od = r[i][1];
        energy[i] += e * mean_e + od * mean_o - std::abs(e * mean_o - od * mean_e);
      }
    }
    // Noise power from the median squared response at the finest scale.
    const fftw_complex* fine = eo[0].get();
    for (size_t i = 0; i < n; ++i) {
      e2[i] = fine[i][0] * fine[i][0] + fine[i][1] * fine[i][1];
    }
    const double mean_e2n = -Median(e2) / std::log(0.5);
    const double noise_power = mean_e2n / impl_->em_n[o];
    const double est_noise_energy2 = 2 * noise_power * impl_->sum_an2[o] +
                                     4 * noise_power * impl_->sum_ai_aj[o];
    const double tau = std::sqrt(est_noise_energy2 / 2);
    const double est_noise_energy = tau * std::sqrt(std::numbers::pi / 2);
    const double est_noise_sigma = std::sqrt((2 - std::numbers::pi / 2) * tau * tau);
    const double threshold =
        (est_noise_energy + kNoiseStdDevs * est_noise_sigma) / 1.7;
    for (size_t i = 0; i < n; ++i) {
      energy_all[i] += std::max(energy[i] - threshold, 0.0);
    }
  }

  PlaneF pc(width_, height_);
  for (size_t i = 0; i < n; ++i) {
    pc.data[i] = an_all[i] > 0.0 ? energy_all[i] / an_all[i] : 0.0;
  }
  return pc;
}

}  // namespace qtfuse
