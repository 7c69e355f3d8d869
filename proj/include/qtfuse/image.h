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

#ifndef QTFUSE_IMAGE_H_
#define QTFUSE_IMAGE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qtfuse {

enum class ColorSpace { kGray, kRgb, kYCbCr };

std::string_view ColorSpaceName(ColorSpace cs);

// 8-bit image with one full-resolution plane per channel. RGB channels are
// R, G, B; YCbCr channels are full-range BT.601 Y, Cb, Cr.
class RasterImage {
 public:
  static constexpr int kMinDimension = 8;

  RasterImage(int width, int height, ColorSpace color_space);

  int width() const { return width_; }
  int height() const { return height_; }
  ColorSpace color_space() const { return color_space_; }
  int channels() const { return color_space_ == ColorSpace::kGray ? 1 : 3; }

  std::span<uint8_t> plane(int c) {
    return {planes_[c].data(), planes_[c].size()};
  }
  std::span<const uint8_t> plane(int c) const {
    return {planes_[c].data(), planes_[c].size()};
  }

  uint8_t& at(int c, int x, int y) { return planes_[c][Index(x, y)]; }
  uint8_t at(int c, int x, int y) const { return planes_[c][Index(x, y)]; }

  bool operator==(const RasterImage& other) const = default;

 private:
  size_t Index(int x, int y) const {
    return static_cast<size_t>(y) * width_ + x;
  }

  int width_;
  int height_;
  ColorSpace color_space_;
  std::vector<std::vector<uint8_t>> planes_;
};

// Single-channel image of doubles; the working type of the metrics.
struct PlaneF {
  PlaneF() = default;
  PlaneF(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

  double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  double at(int x, int y) const {
    return data[static_cast<size_t>(y) * width + x];
  }

  int width = 0;
  int height = 0;
  std::vector<double> data;
};

// BT.601 luminance: identity for gray, Y plane for YCbCr and
// 0.299 R + 0.587 G + 0.114 B (unrounded) for RGB.
PlaneF Luma(const RasterImage& image);

// Luminance rounded to 8 bits, as a single-channel gray image.
RasterImage LumaImage(const RasterImage& image);

RasterImage ToRgb(const RasterImage& image);

// Copies the rectangle [x0, x0+w) x [y0, y0+h) into a new image.
RasterImage Crop(const RasterImage& image, int x0, int y0, int w, int h);

// Bilinear resize (half-pixel centers, edge clamped).
RasterImage ResizeBilinear(const RasterImage& image, int width, int height);

// PNG (8/16-bit, any color type) and binary PPM/PGM. Gray sources load as
// kGray, everything else as kRgb (alpha is dropped).
RasterImage ReadImage(const std::string& path);
RasterImage DecodePng(std::span<const uint8_t> bytes);
RasterImage DecodePnm(std::span<const uint8_t> bytes);

// Format chosen by extension: .png, .ppm, .pgm. YCbCr is converted to RGB.
void WriteImage(const std::string& path, const RasterImage& image);
std::vector<uint8_t> EncodePng(const RasterImage& image);
std::vector<uint8_t> EncodePnm(const RasterImage& image);

}  // namespace qtfuse

#endif  // QTFUSE_IMAGE_H_
