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

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <filesystem>

#include "qtfuse/error.h"
#include "qtfuse/file_util.h"
#include "qtfuse/image.h"

namespace qtfuse {

namespace {

std::string Lowercase(std::string s) {
  std::ranges::transform(s, s.begin(), [](unsigned char ch) {
    return static_cast<char>(std::tolower(ch));
  });
  return s;
}

// Reads one whitespace-delimited PNM header token, skipping comments.
class PnmHeaderReader {
 public:
  explicit PnmHeaderReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  int NextInt() {
    SkipSpaceAndComments();
    size_t start = pos_;
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > (1L << 24)) Fail(ErrorCode::kFormat, "PNM header value too large");
    }
    if (pos_ == start) Fail(ErrorCode::kFormat, "malformed PNM header");
    return static_cast<int>(value);
  }

  // Exactly one whitespace byte separates the header from the raster.
  size_t RasterOffset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      Fail(ErrorCode::kFormat, "malformed PNM header");
    }
    return pos_ + 1;
  }

 private:
  void SkipSpaceAndComments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const uint8_t> bytes_;
  size_t pos_ = 2;
};

}  // namespace

RasterImage DecodePnm(std::span<const uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    Fail(ErrorCode::kFormat, "not a binary PGM/PPM file");
  }
  const bool color = bytes[1] == '6';
  PnmHeaderReader header(bytes);
  const int width = header.NextInt();
  const int height = header.NextInt();
  const int maxval = header.NextInt();
  if (maxval < 1 || maxval > 65535) Fail(ErrorCode::kFormat, "bad PNM maxval");
  const size_t offset = header.RasterOffset();
  const int channels = color ? 3 : 1;
  const size_t sample_bytes = maxval > 255 ? 2 : 1;
  const size_t need = static_cast<size_t>(width) * height * channels * sample_bytes;
  if (bytes.size() - offset < need) Fail(ErrorCode::kFormat, "truncated PNM raster");
  RasterImage image(width, height, color ? ColorSpace::kRgb : ColorSpace::kGray);
  const uint8_t* p = bytes.data() + offset;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) {
        int v = *p++;
        if (sample_bytes == 2) v = (v << 8) | *p++;
        image.at(c, x, y) = static_cast<uint8_t>((v * 255 + maxval / 2) / maxval);
      }
    }
  }
  return image;
}

std::vector<uint8_t> EncodePnm(const RasterImage& image) {
  const RasterImage src =
      image.color_space() == ColorSpace::kYCbCr ? ToRgb(image) : image;
  const bool color = src.channels() == 3;
  const std::string header = std::string(color ? "P6" : "P5") + "\n" +
                             std::to_string(src.width()) + " " +
                             std::to_string(src.height()) + "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + static_cast<size_t>(src.width()) * src.height() * src.channels());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      for (int c = 0; c < src.channels(); ++c) out.push_back(src.at(c, x, y));
    }
  }
  return out;
}

RasterImage DecodePng(std::span<const uint8_t> bytes) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
    Fail(ErrorCode::kFormat, std::string("PNG: ") + png.message);
  }
  const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  std::vector<uint8_t> buffer(PNG_IMAGE_SIZE(png));
  // Alpha, if any, is composited onto white.
  png_color background{255, 255, 255};
  if (!png_image_finish_read(&png, &background, buffer.data(), 0, nullptr)) {
    png_image_free(&png);
    Fail(ErrorCode::kFormat, std::string("PNG: ") + png.message);
  }
  RasterImage image(static_cast<int>(png.width), static_cast<int>(png.height),
                    color ? ColorSpace::kRgb : ColorSpace::kGray);
  const uint8_t* p = buffer.data();
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < channels; ++c) image.at(c, x, y) = *p++;
    }
  }
  return image;
}

std::vector<uint8_t> EncodePng(const RasterImage& image) {
  const RasterImage src =
      image.color_space() == ColorSpace::kYCbCr ? ToRgb(image) : image;
  const int channels = src.channels();
  std::vector<uint8_t> raster;
  raster.reserve(static_cast<size_t>(src.width()) * src.height() * channels);
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      for (int c = 0; c < channels; ++c) raster.push_back(src.at(c, x, y));
    }
  }
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(src.width());
  png.height = static_cast<png_uint_32>(src.height());
  png.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png, nullptr, &size, 0, raster.data(), 0,
                                 nullptr)) {
    Fail(ErrorCode::kIo, std::string("PNG: ") + png.message);
  }
  std::vector<uint8_t> out(size);
  if (!png_image_write_to_memory(&png, out.data(), &size, 0, raster.data(), 0,
                                 nullptr)) {
    Fail(ErrorCode::kIo, std::string("PNG: ") + png.message);
  }
  out.resize(size);
  return out;
}

RasterImage ReadImage(const std::string& path) {
  const std::vector<uint8_t> bytes = ReadFileBytes(path);
  try {
    if (bytes.size() >= 8 && bytes[0] == 0x89 && bytes[1] == 'P') {
      return DecodePng(bytes);
    }
    if (bytes.size() >= 2 && bytes[0] == 'P') return DecodePnm(bytes);
  } catch (const Error& e) {
    Fail(e.code(), path + ": " + e.what());
  }
  Fail(ErrorCode::kFormat, path + ": unsupported image format (PNG, PPM, PGM)");
}

void WriteImage(const std::string& path, const RasterImage& image) {
  const std::string ext =
      Lowercase(std::filesystem::path(path).extension().string());
  if (ext == ".png") {
    WriteFileBytes(path, EncodePng(image));
  } else if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") {
    RasterImage src = image;
    if (ext == ".pgm" && image.channels() == 3) src = LumaImage(image);
    if (ext == ".ppm" && image.channels() == 1) src = ToRgb(image);
    WriteFileBytes(path, EncodePnm(src));
  } else {
    Fail(ErrorCode::kInvalidArgument, "unsupported output extension '" + ext + "'");
  }
}

}  // namespace qtfuse
