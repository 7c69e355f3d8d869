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

#ifndef QTFUSE_PHASE_CONGRUENCY_H_
#define QTFUSE_PHASE_CONGRUENCY_H_

#include <memory>

#include "qtfuse/image.h"

namespace qtfuse {

// Kovesi-style phase congruency with the log-Gabor bank FSIM uses:
// 4 scales (minimum wavelength 6, multiplier 2, sigmaOnf 0.55),
// 4 orientations (dThetaOnSigma 1.2), noise threshold k = 2 with the
// empirical 1/1.7 rescaling.
class PhaseCongruency {
 public:
  static constexpr int kScales = 4;
  static constexpr int kOrientations = 4;

  // Filters depend only on the image size; instances for the same size are
  // shared process-wide.
  static std::shared_ptr<const PhaseCongruency> ForSize(int width, int height);

  PhaseCongruency(int width, int height);
  ~PhaseCongruency();

  int width() const { return width_; }
  int height() const { return height_; }

  PlaneF Compute(const PlaneF& image) const;

 private:
  struct Impl;
  int width_;
  int height_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace qtfuse

#endif  // QTFUSE_PHASE_CONGRUENCY_H_
