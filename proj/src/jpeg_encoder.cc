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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>

#include "qtfuse/dct.h"
#include "qtfuse/error.h"
#include "qtfuse/jpeg.h"

namespace qtfuse {

namespace {

// Huffman table in DHT form: code counts per length 1..16 and symbols.
struct HuffmanSpec {
  std::array<uint8_t, 16> bits;
  std::vector<uint8_t> values;
};

// JPEG Annex K.3 tables.
const HuffmanSpec& StdDcLuminance() {
  static const HuffmanSpec spec{{0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0},
                                {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}};
  return spec;
}

const HuffmanSpec& StdDcChrominance() {
  static const HuffmanSpec spec{{0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0},
                                {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}};
  return spec;
}

const HuffmanSpec& StdAcLuminance() {
  static const HuffmanSpec spec{
      {0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7d},
      {0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06,
       0x13, 0x51, 0x61, 0x07, 0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xa1, 0x08,
       0x23, 0x42, 0xb1, 0xc1, 0x15, 0x52, 0xd1, 0xf0, 0x24, 0x33, 0x62, 0x72,
       0x82, 0x09, 0x0a, 0x16, 0x17, 0x18, 0x19, 0x1a, 0x25, 0x26, 0x27, 0x28,
       0x29, 0x2a, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3a, 0x43, 0x44, 0x45,
       0x46, 0x47, 0x48, 0x49, 0x4a, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59,
       0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6a, 0x73, 0x74, 0x75,
       0x76, 0x77, 0x78, 0x79, 0x7a, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89,
       0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a, 0xa2, 0xa3,
       0xa4, 0xa5, 0xa6, 0xa7, 0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6,
       0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3, 0xc4, 0xc5, 0xc6, 0xc7, 0xc8, 0xc9,
       0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8, 0xd9, 0xda, 0xe1, 0xe2,
       0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf1, 0xf2, 0xf3, 0xf4,
       0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa}};
  return spec;
}

const HuffmanSpec& StdAcChrominance() {
  static const HuffmanSpec spec{
      {0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 0x77},
      {0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41,
       0x51, 0x07, 0x61, 0x71, 0x13, 0x22, 0x32, 0x81, 0x08, 0x14, 0x42, 0x91,
       0xa1, 0xb1, 0xc1, 0x09, 0x23, 0x33, 0x52, 0xf0, 0x15, 0x62, 0x72, 0xd1,
       0x0a, 0x16, 0x24, 0x34, 0xe1, 0x25, 0xf1, 0x17, 0x18, 0x19, 0x1a, 0x26,
       0x27, 0x28, 0x29, 0x2a, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3a, 0x43, 0x44,
       0x45, 0x46, 0x47, 0x48, 0x49, 0x4a, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58,
       0x59, 0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6a, 0x73, 0x74,
       0x75, 0x76, 0x77, 0x78, 0x79, 0x7a, 0x82, 0x83, 0x84, 0x85, 0x86, 0x87,
       0x88, 0x89, 0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a,
       0xa2, 0xa3, 0xa4, 0xa5, 0xa6, 0xa7, 0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4,
       0xb5, 0xb6, 0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3, 0xc4, 0xc5, 0xc6, 0xc7,
       0xc8, 0xc9, 0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8, 0xd9, 0xda,
       0xe2, 0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf2, 0xf3, 0xf4,
       0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa}};
  return spec;
}

struct HuffmanCodes {
  std::array<uint16_t, 256> code{};
  std::array<uint8_t, 256> size{};
};

HuffmanCodes BuildCodes(const HuffmanSpec& spec) {
  HuffmanCodes codes;
  uint32_t code = 0;
  size_t k = 0;
  for (int len = 1; len <= 16; ++len) {
    for (int i = 0; i < spec.bits[len - 1]; ++i) {
      const uint8_t symbol = spec.values[k++];
      codes.code[symbol] = static_cast<uint16_t>(code);
      codes.size[symbol] = static_cast<uint8_t>(len);
      ++code;
    }
    code <<= 1;
  }
  return codes;
}

// Length-limited optimal code (JPEG Annex K.2), one reserved code point so
// that no code is all ones.
HuffmanSpec OptimalSpec(const std::array<uint32_t, 256>& counts) {
  std::array<int64_t, 257> freq{};
  for (int i = 0; i < 256; ++i) freq[i] = counts[i];
  freq[256] = 1;
  std::array<int, 257> codesize{};
  std::array<int, 257> others;
  others.fill(-1);
  for (;;) {
    int c1 = -1, c2 = -1;
    int64_t v = INT64_MAX;
    for (int i = 0; i <= 256; ++i) {
      if (freq[i] && freq[i] <= v) {
        v = freq[i];
        c1 = i;
      }
    }
    v = INT64_MAX;
    for (int i = 0; i <= 256; ++i) {
      if (freq[i] && freq[i] <= v && i != c1) {
        v = freq[i];
        c2 = i;
      }
    }
    if (c2 < 0) break;
    freq[c1] += freq[c2];
    freq[c2] = 0;
    ++codesize[c1];
    while (others[c1] >= 0) {
      c1 = others[c1];
      ++codesize[c1];
    }
    others[c1] = c2;
    ++codesize[c2];
    while (others[c2] >= 0) {
      c2 = others[c2];
      ++codesize[c2];
    }
  }
  std::array<int, 33> bits{};
  for (int i = 0; i <= 256; ++i) {
    if (codesize[i]) ++bits[codesize[i]];
  }
  for (int i = 32; i > 16; --i) {
    while (bits[i] > 0) {
      int j = i - 2;
      while (bits[j] == 0) --j;
      bits[i] -= 2;
      bits[i - 1] += 1;
      bits[j + 1] += 2;
      bits[j] -= 1;
    }
  }
  int top = 16;
  while (bits[top] == 0) --top;
  --bits[top];

  HuffmanSpec spec;
  for (int i = 1; i <= 16; ++i) spec.bits[i - 1] = static_cast<uint8_t>(bits[i]);
  for (int len = 1; len <= 32; ++len) {
    for (int s = 0; s < 256; ++s) {
      if (codesize[s] == len) spec.values.push_back(static_cast<uint8_t>(s));
    }
  }
  return spec;
}

class BitWriter {
 public:
  explicit BitWriter(std::vector<uint8_t>* out) : out_(out) {}

  void Put(uint32_t bits, int count) {
    acc_ = (acc_ << count) | (bits & ((1u << count) - 1));
    filled_ += count;
    while (filled_ >= 8) {
      const uint8_t byte = static_cast<uint8_t>(acc_ >> (filled_ - 8));
      out_->push_back(byte);
      if (byte == 0xFF) out_->push_back(0x00);
      filled_ -= 8;
    }
    acc_ &= (uint64_t{1} << filled_) - 1;
  }

  void Flush() {
    if (filled_ > 0) Put(0x7F, 8 - filled_);
  }

 private:
  std::vector<uint8_t>* out_;
  uint64_t acc_ = 0;
  int filled_ = 0;
};

int MagnitudeBits(int v) {
  unsigned a = static_cast<unsigned>(v < 0 ? -v : v);
  int n = 0;
  while (a) {
    ++n;
    a >>= 1;
  }
  return n;
}

// Quantized coefficients of one component, zigzag order, block raster order
// within the component's padded plane.
struct ComponentCoefs {
  int blocks_w = 0;
  int blocks_h = 0;
  int h_samp = 1;
  int v_samp = 1;
  std::vector<std::array<int16_t, 64>> blocks;

  const std::array<int16_t, 64>& block(int bx, int by) const {
    return blocks[static_cast<size_t>(by) * blocks_w + bx];
  }
};

ComponentCoefs QuantizePlane(const std::vector<float>& plane, int w, int h,
                             const QuantTable& table, int h_samp, int v_samp) {
  ComponentCoefs out;
  out.blocks_w = w / 8;
  out.blocks_h = h / 8;
  out.h_samp = h_samp;
  out.v_samp = v_samp;
  out.blocks.resize(static_cast<size_t>(out.blocks_w) * out.blocks_h);
  std::array<float, 64> inv_q;
  for (int i = 0; i < 64; ++i) inv_q[i] = 1.0f / static_cast<float>(table[i]);
  float in[64], coef[64];
  for (int by = 0; by < out.blocks_h; ++by) {
    for (int bx = 0; bx < out.blocks_w; ++bx) {
      for (int y = 0; y < 8; ++y) {
        const float* row = &plane[static_cast<size_t>(by * 8 + y) * w + bx * 8];
        for (int x = 0; x < 8; ++x) in[y * 8 + x] = row[x] - 128.0f;
      }
      ForwardDct8x8(in, coef);
      auto& dst = out.blocks[static_cast<size_t>(by) * out.blocks_w + bx];
      for (int k = 0; k < 64; ++k) {
        const int n = kZigzag[k];
        const int q = static_cast<int>(std::floor(coef[n] * inv_q[n] + 0.5f));
        dst[k] = static_cast<int16_t>(std::clamp(q, -1023, 1023));
      }
    }
  }
  return out;
}

// Replicates edge samples so the plane covers whole MCUs.
std::vector<float> PadPlane(const std::vector<float>& src, int w, int h,
                            int padded_w, int padded_h) {
  std::vector<float> out(static_cast<size_t>(padded_w) * padded_h);
  for (int y = 0; y < padded_h; ++y) {
    const int sy = std::min(y, h - 1);
    for (int x = 0; x < padded_w; ++x) {
      out[static_cast<size_t>(y) * padded_w + x] =
          src[static_cast<size_t>(sy) * w + std::min(x, w - 1)];
    }
  }
  return out;
}

std::vector<float> Downsample2x2(const std::vector<float>& src, int w, int h) {
  const int ow = w / 2, oh = h / 2;
  std::vector<float> out(static_cast<size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    const float* r0 = &src[static_cast<size_t>(2 * y) * w];
    const float* r1 = r0 + w;
    for (int x = 0; x < ow; ++x) {
      out[static_cast<size_t>(y) * ow + x] =
          0.25f * (r0[2 * x] + r0[2 * x + 1] + r1[2 * x] + r1[2 * x + 1]);
    }
  }
  return out;
}

// Walks blocks in interleaved MCU order and hands each to `fn(component,
// block)`.
template <typename Fn>
void ForEachBlockInScan(const std::array<ComponentCoefs, 3>& comps, int mcus_x,
                        int mcus_y, Fn&& fn) {
  for (int my = 0; my < mcus_y; ++my) {
    for (int mx = 0; mx < mcus_x; ++mx) {
      for (int c = 0; c < 3; ++c) {
        const ComponentCoefs& cc = comps[c];
        for (int v = 0; v < cc.v_samp; ++v) {
          for (int h = 0; h < cc.h_samp; ++h) {
            fn(c, cc.block(mx * cc.h_samp + h, my * cc.v_samp + v));
          }
        }
      }
    }
  }
}

void PutU16(std::vector<uint8_t>* out, int v) {
  out->push_back(static_cast<uint8_t>(v >> 8));
  out->push_back(static_cast<uint8_t>(v & 0xFF));
}

void WriteDqt(std::vector<uint8_t>* out, int slot, const QuantTable& table) {
  out->insert(out->end(), {0xFF, 0xDB});
  PutU16(out, 2 + 1 + 64);
  out->push_back(static_cast<uint8_t>(slot));
  for (int k = 0; k < 64; ++k) {
    out->push_back(static_cast<uint8_t>(table[kZigzag[k]]));
  }
}

void WriteDht(std::vector<uint8_t>* out, int table_class, int slot,
              const HuffmanSpec& spec) {
  out->insert(out->end(), {0xFF, 0xC4});
  PutU16(out, 2 + 1 + 16 + static_cast<int>(spec.values.size()));
  out->push_back(static_cast<uint8_t>((table_class << 4) | slot));
  out->insert(out->end(), spec.bits.begin(), spec.bits.end());
  out->insert(out->end(), spec.values.begin(), spec.values.end());
}

}  // namespace

std::string_view SubsamplingName(Subsampling s) {
  return s == Subsampling::k420 ? "420" : "444";
}

Subsampling ParseSubsampling(std::string_view name) {
  if (name == "420" || name == "4:2:0") return Subsampling::k420;
  if (name == "444" || name == "4:4:4") return Subsampling::k444;
  Fail(ErrorCode::kInvalidArgument,
       "unknown subsampling '" + std::string(name) + "' (420 or 444)");
}

JpegBlob::JpegBlob(std::vector<uint8_t> bytes) : bytes_(std::move(bytes)) {
  const size_t n = bytes_.size();
  if (n < 4 || bytes_[0] != 0xFF || bytes_[1] != 0xD8 || bytes_[n - 2] != 0xFF ||
      bytes_[n - 1] != 0xD9) {
    Fail(ErrorCode::kFormat, "JPEG stream must start with SOI and end with EOI");
  }
}

JpegBlob Encode(const RasterImage& image, const QuantTable& luma,
                const QuantTable& chroma, const EncodeOptions& options) {
  const int w = image.width(), h = image.height();
  if (w > 65535 || h > 65535) {
    Fail(ErrorCode::kInvalidArgument, "image too large for baseline JPEG");
  }
  const size_t n = static_cast<size_t>(w) * h;
  std::array<std::vector<float>, 3> ycc;
  for (auto& p : ycc) p.resize(n);
  switch (image.color_space()) {
    case ColorSpace::kGray: {
      auto g = image.plane(0);
      for (size_t i = 0; i < n; ++i) ycc[0][i] = g[i];
      std::fill(ycc[1].begin(), ycc[1].end(), 128.0f);
      std::fill(ycc[2].begin(), ycc[2].end(), 128.0f);
      break;
    }
    case ColorSpace::kRgb: {
      auto r = image.plane(0), g = image.plane(1), b = image.plane(2);
      for (size_t i = 0; i < n; ++i) {
        const float R = r[i], G = g[i], B = b[i];
        ycc[0][i] = 0.299f * R + 0.587f * G + 0.114f * B;
        ycc[1][i] = -0.168736f * R - 0.331264f * G + 0.5f * B + 128.0f;
        ycc[2][i] = 0.5f * R - 0.418688f * G - 0.081312f * B + 128.0f;
      }
      break;
    }
    case ColorSpace::kYCbCr:
      for (int c = 0; c < 3; ++c) {
        auto p = image.plane(c);
        for (size_t i = 0; i < n; ++i) ycc[c][i] = p[i];
      }
      break;
  }

  const bool sub = options.subsampling == Subsampling::k420;
  const int mcu = sub ? 16 : 8;
  const int mcus_x = (w + mcu - 1) / mcu, mcus_y = (h + mcu - 1) / mcu;
  const int pw = mcus_x * mcu, ph = mcus_y * mcu;

  std::array<ComponentCoefs, 3> comps;
  comps[0] = QuantizePlane(PadPlane(ycc[0], w, h, pw, ph), pw, ph, luma,
                           sub ? 2 : 1, sub ? 2 : 1);
  for (int c = 1; c < 3; ++c) {
    std::vector<float> padded = PadPlane(ycc[c], w, h, pw, ph);
    if (sub) {
      comps[c] = QuantizePlane(Downsample2x2(padded, pw, ph), pw / 2, ph / 2,
                               chroma, 1, 1);
    } else {
      comps[c] = QuantizePlane(padded, pw, ph, chroma, 1, 1);
    }
  }

  HuffmanSpec dc_spec[2] = {StdDcLuminance(), StdDcChrominance()};
  HuffmanSpec ac_spec[2] = {StdAcLuminance(), StdAcChrominance()};
  if (options.optimize_huffman) {
    std::array<uint32_t, 256> dc_counts[2] = {}, ac_counts[2] = {};
    std::array<int, 3> pred{};
    ForEachBlockInScan(comps, mcus_x, mcus_y, [&](int c, const auto& blk) {
      const int t = c == 0 ? 0 : 1;
      ++dc_counts[t][MagnitudeBits(blk[0] - pred[c])];
      pred[c] = blk[0];
      int run = 0;
      for (int k = 1; k < 64; ++k) {
        if (blk[k] == 0) {
          ++run;
          continue;
        }
        while (run > 15) {
          ++ac_counts[t][0xF0];
          run -= 16;
        }
        ++ac_counts[t][(run << 4) | MagnitudeBits(blk[k])];
        run = 0;
      }
      if (run > 0) ++ac_counts[t][0x00];
    });
    for (int t = 0; t < 2; ++t) {
      dc_spec[t] = OptimalSpec(dc_counts[t]);
      ac_spec[t] = OptimalSpec(ac_counts[t]);
    }
  }
  const HuffmanCodes dc_codes[2] = {BuildCodes(dc_spec[0]), BuildCodes(dc_spec[1])};
  const HuffmanCodes ac_codes[2] = {BuildCodes(ac_spec[0]), BuildCodes(ac_spec[1])};

  std::vector<uint8_t> out;
  out.reserve(n / 2 + 1024);
  out.insert(out.end(), {0xFF, 0xD8});
  // APP0 JFIF 1.01, no density, no thumbnail.
  out.insert(out.end(), {0xFF, 0xE0, 0x00, 0x10, 'J', 'F', 'I', 'F', 0x00, 0x01,
                         0x01, 0x00, 0x00, 0x01, 0x00, 0x01, 0x00, 0x00});
  WriteDqt(&out, 0, luma);
  WriteDqt(&out, 1, chroma);

  out.insert(out.end(), {0xFF, 0xC0});
  PutU16(&out, 8 + 3 * 3);
  out.push_back(8);
  PutU16(&out, h);
  PutU16(&out, w);
  out.push_back(3);
  for (int c = 0; c < 3; ++c) {
    out.push_back(static_cast<uint8_t>(c + 1));
    out.push_back(static_cast<uint8_t>((comps[c].h_samp << 4) | comps[c].v_samp));
    out.push_back(c == 0 ? 0 : 1);
  }

  WriteDht(&out, 0, 0, dc_spec[0]);
  WriteDht(&out, 1, 0, ac_spec[0]);
  WriteDht(&out, 0, 1, dc_spec[1]);
  WriteDht(&out, 1, 1, ac_spec[1]);

  out.insert(out.end(), {0xFF, 0xDA});
  PutU16(&out, 6 + 2 * 3);
  out.push_back(3);
  for (int c = 0; c < 3; ++c) {
    out.push_back(static_cast<uint8_t>(c + 1));
    out.push_back(c == 0 ? 0x00 : 0x11);
  }
  out.insert(out.end(), {0x00, 0x3F, 0x00});

  BitWriter writer(&out);
  std::array<int, 3> pred{};
  ForEachBlockInScan(comps, mcus_x, mcus_y, [&](int c, const auto& blk) {
    const int t = c == 0 ? 0 : 1;
    const HuffmanCodes& dc = dc_codes[t];
    const HuffmanCodes& ac = ac_codes[t];
    const int diff = blk[0] - pred[c];
    pred[c] = blk[0];
    const int dbits = MagnitudeBits(diff);
    writer.Put(dc.code[dbits], dc.size[dbits]);
    if (dbits) writer.Put(static_cast<uint32_t>(diff < 0 ? diff - 1 : diff), dbits);
    int run = 0;
    for (int k = 1; k < 64; ++k) {
      const int v = blk[k];
      if (v == 0) {
        ++run;
        continue;
      }
      while (run > 15) {
        writer.Put(ac.code[0xF0], ac.size[0xF0]);
        run -= 16;
      }
      const int nbits = MagnitudeBits(v);
      const int symbol = (run << 4) | nbits;
      writer.Put(ac.code[symbol], ac.size[symbol]);
      writer.Put(static_cast<uint32_t>(v < 0 ? v - 1 : v), nbits);
      run = 0;
    }
    if (run > 0) writer.Put(ac.code[0x00], ac.size[0x00]);
  });
  writer.Flush();
  out.insert(out.end(), {0xFF, 0xD9});
  return JpegBlob(std::move(out));
}

}  // namespace qtfuse
