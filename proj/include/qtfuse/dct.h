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

#ifndef QTFUSE_DCT_H_
#define QTFUSE_DCT_H_

#include <array>
#include <cstdint>

namespace qtfuse {

// kZigzag[k] is the natural (row-major) index of zigzag position k.
extern const std::array<uint8_t, 64> kZigzag;

// Orthonormal 8x8 type-II DCT and its inverse, natural order. This is the
// JPEG FDCT/IDCT normalization: F(0,0) = 8 * mean.
void ForwardDct8x8(const float in[64], float out[64]);
void InverseDct8x8(const float in[64], float out[64]);

}  // namespace qtfuse

#endif  // QTFUSE_DCT_H_
