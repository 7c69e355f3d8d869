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

#include "qtfuse/image.h"

#include <algorithm>
#include <cmath>

#include "qtfuse/error.h"

namespace qtfuse {

namespace {

uint8_t RoundToByte(double v) {
  return static_cast<uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

std::string_view ColorSpaceName(ColorSpace cs) {
  switch (cs) {
    case ColorSpace::kGray:
      return "gray";
    case ColorSpace::kRgb:
      return "rgb";
    case ColorSpace::kYCbCr:
      return "ycbcr";
  }
  return "unknown";
}

RasterImage::RasterImage(int width, int height, ColorSpace color_space)
    : width_(width), height_(height), color_space_(color_space) {
  if (width < kMinDimension || height < kMinDimension) {
    Fail(ErrorCode::kInvalidArgument,
         "image " + std::to_string(width) + "x" + std::to_string(height) +
             " is smaller than 8x8");
  }
  planes_.assign(channels(),
                 std::vector<uint8_t>(static_cast<size_t>(width) * height));
}

PlaneF Luma(const RasterImage& image) {
  PlaneF out(image.width(), image.height());
  const size_t n = out.data.size();
  if (image.color_space() == ColorSpace::kRgb) {
    auto r = image.plane(0), g = image.plane(1), b = image.plane(2);
    for (size_t i = 0; i < n; ++i) {
      out.data[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
    }
  } else {
    auto y = image.plane(0);
    for (size_t i = 0; i < n; ++i) out.data[i] = y[i];
  }
  return out;
}

RasterImage LumaImage(const RasterImage& image) {
  if (image.color_space() == ColorSpace::kGray) return image;
  RasterImage out(image.width(), image.height(), ColorSpace::kGray);
  if (image.color_space() == ColorSpace::kYCbCr) {
    std::ranges::copy(image.plane(0), out.plane(0).begin());
    return out;
  }
  const PlaneF luma = Luma(image);
  auto dst = out.plane(0);
  for (size_t i = 0; i < luma.data.size(); ++i) dst[i] = RoundToByte(luma.data[i]);
  return out;
}

RasterImage ToRgb(const RasterImage& image) {
  if (image.color_space() == ColorSpace::kRgb) return image;
  RasterImage out(image.width(), image.height(), ColorSpace::kRgb);
  auto r = out.plane(0), g = out.plane(1), b = out.plane(2);
  if (image.color_space() == ColorSpace::kGray) {
    auto y = image.plane(0);
    std::ranges::copy(y, r.begin());
    std::ranges::copy(y, g.begin());
    std::ranges::copy(y, b.begin());
    return out;
  }
  auto y = image.plane(0), cb = image.plane(1), cr = image.plane(2);
  for (size_t i = 0; i < y.size(); ++i) {
    const double yy = y[i], u = cb[i] - 128.0, v = cr[i] - 128.0;
    r[i] = RoundToByte(yy + 1.402 * v);
    g[i] = RoundToByte(yy - 0.344136 * u - 0.714136 * v);
    b[i] = RoundToByte(yy + 1.772 * u);
  }
  return out;
}

RasterImage Crop(const RasterImage& image, int x0, int y0, int w, int h) {
  Require(x0 >= 0 && y0 >= 0 && x0 + w <= image.width() &&
              y0 + h <= image.height(),
          "crop rectangle outside the image");
  RasterImage out(w, h, image.color_space());
  for (int c = 0; c < image.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) out.at(c, x, y) = image.at(c, x0 + x, y0 + y);
    }
  }
  return out;
}

RasterImage ResizeBilinear(const RasterImage& image, int width, int height) {
  RasterImage out(width, height, image.color_space());
  const double sx = static_cast<double>(image.width()) / width;
  const double sy = static_cast<double>(image.height()) / height;
  const int max_x = image.width() - 1, max_y = image.height() - 1;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, double(max_y));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, max_y);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, double(max_x));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, max_x);
      const double wx = fx - x0;
      for (int c = 0; c < image.channels(); ++c) {
        const double top =
            image.at(c, x0, y0) * (1 - wx) + image.at(c, x1, y0) * wx;
        const double bottom =
            image.at(c, x0, y1) * (1 - wx) + image.at(c, x1, y1) * wx;
        out.at(c, x, y) = RoundToByte(top * (1 - wy) + bottom * wy);
      }
    }
  }
  return out;
}

}  // namespace qtfuse
