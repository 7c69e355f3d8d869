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
#include <optional>

#include "qtfuse/dct.h"
#include "qtfuse/error.h"
#include "qtfuse/jpeg.h"

namespace qtfuse {

namespace {

constexpr int kLookaheadBits = 9;

struct HuffmanDecodeTable {
  bool defined = false;
  // Canonical decoding state per code length 1..16.
  std::array<int32_t, 18> maxcode{};
  std::array<int32_t, 17> valoffset{};
  std::vector<uint8_t> values;
  // Fast path: (length << 8 | symbol) for codes up to kLookaheadBits long,
  // 0 when the code is longer.
  std::array<uint16_t, 1 << kLookaheadBits> lookup{};
};

HuffmanDecodeTable BuildDecodeTable(const std::array<uint8_t, 16>& bits,
                                    std::vector<uint8_t> values) {
  HuffmanDecodeTable t;
  t.defined = true;
  t.values = std::move(values);
  int32_t code = 0;
  int k = 0;
  for (int len = 1; len <= 16; ++len) {
    const int count = bits[len - 1];
    t.valoffset[len] = k - code;
    for (int i = 0; i < count; ++i) {
      if (len <= kLookaheadBits) {
        const int shift = kLookaheadBits - len;
        for (int fill = 0; fill < (1 << shift); ++fill) {
          t.lookup[(code << shift) | fill] =
              static_cast<uint16_t>((len << 8) | t.values[k]);
        }
      }
      ++code;
      ++k;
    }
    t.maxcode[len] = count ? code - 1 : -1;
    code <<= 1;
  }
  t.maxcode[17] = INT32_MAX;
  return t;
}

struct Component {
  int id = 0;
  int h_samp = 1;
  int v_samp = 1;
  int tq = 0;
  int blocks_w = 0;  // in the padded, MCU-aligned plane
  int blocks_h = 0;
  std::vector<uint8_t> samples;  // blocks_w*8 x blocks_h*8
  int dc_pred = 0;
};

class Reader {
 public:
  explicit Reader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  size_t pos() const { return pos_; }
  size_t size() const { return bytes_.size(); }
  bool AtEnd() const { return pos_ >= bytes_.size(); }

  uint8_t U8() {
    if (pos_ >= bytes_.size()) throw ParseError(pos_, "unexpected end of stream");
    return bytes_[pos_++];
  }
  int U16() {
    const int hi = U8();
    return (hi << 8) | U8();
  }
  void Skip(size_t n) {
    if (bytes_.size() - pos_ < n) throw ParseError(pos_, "segment overruns stream");
    pos_ += n;
  }
  uint8_t Peek(size_t ahead = 0) const {
    if (pos_ + ahead >= bytes_.size()) {
      throw ParseError(pos_ + ahead, "unexpected end of stream");
    }
    return bytes_[pos_ + ahead];
  }
  void Seek(size_t pos) { pos_ = pos; }

 private:
  std::span<const uint8_t> bytes_;
  size_t pos_ = 0;
};

// Entropy-coded segment reader: unstuffs FF 00, stops at markers.
class BitReader {
 public:
  explicit BitReader(Reader* r) : r_(r) {}

  void Fill() {
    while (count_ <= 56) {
      if (marker_hit_) {
        // Past a marker: feed zeros, as a tolerant decoder does.
        acc_ <<= 8;
        count_ += 8;
        continue;
      }
      if (r_->AtEnd()) throw ParseError(r_->pos(), "truncated entropy-coded data");
      uint8_t byte = r_->Peek();
      if (byte == 0xFF) {
        const uint8_t next = r_->Peek(1);
        if (next == 0x00) {
          r_->Skip(2);
        } else {
          marker_hit_ = true;
          continue;
        }
      } else {
        r_->Skip(1);
      }
      acc_ = (acc_ << 8) | byte;
      count_ += 8;
    }
  }

  uint32_t PeekBits(int n) {
    if (count_ < n) Fill();
    return static_cast<uint32_t>((acc_ >> (count_ - n)) & ((1ull << n) - 1));
  }
  void Consume(int n) { count_ -= n; }
  uint32_t Bits(int n) {
    if (n == 0) return 0;
    const uint32_t v = PeekBits(n);
    Consume(n);
    return v;
  }

  int Decode(const HuffmanDecodeTable& t) {
    const uint16_t fast = t.lookup[PeekBits(kLookaheadBits)];
    if (fast) {
      Consume(fast >> 8);
      return fast & 0xFF;
    }
    int len = kLookaheadBits + 1;
    int32_t code = static_cast<int32_t>(PeekBits(len));
    while (len <= 16 && code > t.maxcode[len]) {
      ++len;
      code = static_cast<int32_t>(PeekBits(len));
    }
    if (len > 16) throw ParseError(r_->pos(), "invalid Huffman code");
    Consume(len);
    const int idx = code + t.valoffset[len];
    if (idx < 0 || idx >= static_cast<int>(t.values.size())) {
      throw ParseError(r_->pos(), "invalid Huffman code");
    }
    return t.values[idx];
  }

  // Drops buffered bits and positions the reader on the next marker.
  void Reset() {
    acc_ = 0;
    count_ = 0;
    marker_hit_ = false;
  }

  bool marker_hit() const { return marker_hit_; }

 private:
  Reader* r_;
  uint64_t acc_ = 0;
  int count_ = 0;
  bool marker_hit_ = false;
};

int Extend(uint32_t v, int bits) {
  return v < (1u << (bits - 1)) ? static_cast<int>(v) - (1 << bits) + 1
                                 : static_cast<int>(v);
}

class Decoder {
 public:
  explicit Decoder(std::span<const uint8_t> bytes) : r_(bytes) {}

  RasterImage Run() {
    if (r_.U8() != 0xFF || r_.U8() != 0xD8) throw ParseError(0, "missing SOI marker");
    bool done = false;
    bool scanned = false;
    while (!done) {
      const int marker = NextMarker();
      const size_t marker_pos = r_.pos() - 2;
      switch (marker) {
        case 0xD9:
          done = true;
          break;
        case 0xC0:
        case 0xC1:
          ReadFrame(marker_pos);
          break;
        case 0xC4:
          ReadHuffman();
          break;
        case 0xDB:
          ReadQuant();
          break;
        case 0xDD:
          ReadRestartInterval();
          break;
        case 0xDA:
          if (components_.empty()) throw ParseError(marker_pos, "SOS before SOF");
          ReadScan();
          scanned = true;
          break;
        default:
          if ((marker >= 0xC2 && marker <= 0xCF) && marker != 0xC4 &&
              marker != 0xC8 && marker != 0xCC) {
            throw ParseError(marker_pos, "unsupported (non-baseline) JPEG process");
          }
          if (marker >= 0xD0 && marker <= 0xD7) break;
          SkipSegment();
          break;
      }
    }
    if (!scanned) throw ParseError(r_.pos(), "no scan data before EOI");
    return Assemble();
  }

 private:
  int NextMarker() {
    if (r_.U8() != 0xFF) throw ParseError(r_.pos() - 1, "expected marker");
    int m = r_.U8();
    while (m == 0xFF) m = r_.U8();
    return m;
  }

  void SkipSegment() {
    const int len = r_.U16();
    if (len < 2) throw ParseError(r_.pos() - 2, "bad segment length");
    r_.Skip(len - 2);
  }

  void ReadQuant() {
    const size_t start = r_.pos();
    const int len = r_.U16();
    const size_t end = start + len;
    while (r_.pos() < end) {
      const int pq_tq = r_.U8();
      const int pq = pq_tq >> 4, tq = pq_tq & 15;
      if (tq > 3) throw ParseError(r_.pos() - 1, "bad quantization table slot");
      if (pq != 0) throw ParseError(r_.pos() - 1, "16-bit quantization tables unsupported");
      std::array<int, 64> q;
      for (int k = 0; k < 64; ++k) q[kZigzag[k]] = r_.U8();
      qtables_[tq] = q;
    }
    if (r_.pos() != end) throw ParseError(r_.pos(), "DQT length mismatch");
  }

  void ReadHuffman() {
    const size_t start = r_.pos();
    const int len = r_.U16();
    const size_t end = start + len;
    while (r_.pos() < end) {
      const int tc_th = r_.U8();
      const int tc = tc_th >> 4, th = tc_th & 15;
      if (tc > 1 || th > 3) throw ParseError(r_.pos() - 1, "bad Huffman table id");
      std::array<uint8_t, 16> bits;
      int total = 0;
      for (auto& b : bits) {
        b = r_.U8();
        total += b;
      }
      if (total > 256) throw ParseError(r_.pos(), "too many Huffman symbols");
      std::vector<uint8_t> values(total);
      for (auto& v : values) v = r_.U8();
      (tc == 0 ? dc_tables_ : ac_tables_)[th] = BuildDecodeTable(bits, std::move(values));
    }
    if (r_.pos() != end) throw ParseError(r_.pos(), "DHT length mismatch");
  }

  void ReadRestartInterval() {
    const int len = r_.U16();
    if (len != 4) throw ParseError(r_.pos() - 2, "bad DRI length");
    restart_interval_ = r_.U16();
  }

  void ReadFrame(size_t marker_pos) {
    if (!components_.empty()) throw ParseError(marker_pos, "multiple frames");
    r_.U16();
    const int precision = r_.U8();
    if (precision != 8) throw ParseError(r_.pos() - 1, "only 8-bit samples supported");
    height_ = r_.U16();
    width_ = r_.U16();
    const int nc = r_.U8();
    if (height_ == 0) throw ParseError(r_.pos(), "DNL-defined height unsupported");
    if (width_ < RasterImage::kMinDimension || height_ < RasterImage::kMinDimension) {
      throw ParseError(r_.pos(), "image smaller than 8x8");
    }
    if (nc != 1 && nc != 3) throw ParseError(r_.pos() - 1, "only 1 or 3 components supported");
    components_.resize(nc);
    for (auto& c : components_) {
      c.id = r_.U8();
      const int hv = r_.U8();
      c.h_samp = hv >> 4;
      c.v_samp = hv & 15;
      c.tq = r_.U8();
      if (c.h_samp < 1 || c.h_samp > 4 || c.v_samp < 1 || c.v_samp > 4 || c.tq > 3) {
        throw ParseError(r_.pos() - 2, "bad component parameters");
      }
      hmax_ = std::max(hmax_, c.h_samp);
      vmax_ = std::max(vmax_, c.v_samp);
    }
    mcus_x_ = (width_ + 8 * hmax_ - 1) / (8 * hmax_);
    mcus_y_ = (height_ + 8 * vmax_ - 1) / (8 * vmax_);
    for (auto& c : components_) {
      c.blocks_w = mcus_x_ * c.h_samp;
      c.blocks_h = mcus_y_ * c.v_samp;
      c.samples.assign(static_cast<size_t>(c.blocks_w) * 8 * c.blocks_h * 8, 0);
    }
  }

  void ReadScan() {
    const size_t start = r_.pos();
    const int len = r_.U16();
    const int ns = r_.U8();
    if (ns < 1 || ns > static_cast<int>(components_.size()) || len != 6 + 2 * ns) {
      throw ParseError(start, "bad SOS header");
    }
    std::vector<int> order;
    std::vector<std::pair<int, int>> tables;
    for (int i = 0; i < ns; ++i) {
      const int id = r_.U8();
      const int td_ta = r_.U8();
      auto it = std::find_if(components_.begin(), components_.end(),
                             [id](const Component& c) { return c.id == id; });
      if (it == components_.end()) throw ParseError(r_.pos() - 2, "unknown component in scan");
      const int ci = static_cast<int>(it - components_.begin());
      const int td = td_ta >> 4, ta = td_ta & 15;
      if (td > 3 || ta > 3 || !dc_tables_[td].defined || !ac_tables_[ta].defined) {
        throw ParseError(r_.pos() - 1, "scan references undefined Huffman table");
      }
      if (!qtables_[components_[ci].tq]) {
        throw ParseError(r_.pos() - 2, "component references undefined quantization table");
      }
      order.push_back(ci);
      tables.emplace_back(td, ta);
    }
    const int ss = r_.U8(), se = r_.U8(), ahl = r_.U8();
    if (ss != 0 || se != 63 || ahl != 0) throw ParseError(r_.pos() - 3, "not a sequential scan");

    for (int ci : order) components_[ci].dc_pred = 0;
    BitReader bits(&r_);
    int units_x, units_y;
    if (ns == 1) {
      const Component& c = components_[order[0]];
      units_x = (static_cast<int>(std::ceil(double(width_) * c.h_samp / hmax_)) + 7) / 8;
      units_y = (static_cast<int>(std::ceil(double(height_) * c.v_samp / vmax_)) + 7) / 8;
    } else {
      units_x = mcus_x_;
      units_y = mcus_y_;
    }
    int units_left = restart_interval_;
    int expected_rst = 0;
    for (int uy = 0; uy < units_y; ++uy) {
      for (int ux = 0; ux < units_x; ++ux) {
        if (restart_interval_ && units_left == 0) {
          HandleRestart(&bits, &expected_rst);
          for (int ci : order) components_[ci].dc_pred = 0;
          units_left = restart_interval_;
        }
        for (int s = 0; s < ns; ++s) {
          Component& c = components_[order[s]];
          const auto& dc = dc_tables_[tables[s].first];
          const auto& ac = ac_tables_[tables[s].second];
          if (ns == 1) {
            DecodeBlock(&bits, dc, ac, &c, ux, uy);
          } else {
            for (int v = 0; v < c.v_samp; ++v) {
              for (int h = 0; h < c.h_samp; ++h) {
                DecodeBlock(&bits, dc, ac, &c, ux * c.h_samp + h, uy * c.v_samp + v);
              }
            }
          }
        }
        --units_left;
      }
    }
    // Leave the reader on the marker that ends the scan.
    while (!r_.AtEnd()) {
      if (r_.Peek() == 0xFF && r_.Peek(1) != 0x00 && !(r_.Peek(1) >= 0xD0 && r_.Peek(1) <= 0xD7)) {
        return;
      }
      r_.Skip(1);
    }
    throw ParseError(r_.pos(), "missing EOI marker");
  }

  void HandleRestart(BitReader* bits, int* expected) {
    bits->Reset();
    // Skip any fill bytes up to the RSTn marker.
    while (!(r_.Peek() == 0xFF && r_.Peek(1) >= 0xD0 && r_.Peek(1) <= 0xD7)) {
      r_.Skip(1);
    }
    if (r_.Peek(1) != 0xD0 + *expected) throw ParseError(r_.pos(), "restart marker out of sequence");
    r_.Skip(2);
    *expected = (*expected + 1) & 7;
  }

  void DecodeBlock(BitReader* bits, const HuffmanDecodeTable& dc,
                   const HuffmanDecodeTable& ac, Component* c, int bx, int by) {
    const auto& q = *qtables_[c->tq];
    float coef[64] = {};
    const int s = bits->Decode(dc);
    if (s > 11) throw ParseError(r_.pos(), "DC magnitude out of range");
    if (s) c->dc_pred += Extend(bits->Bits(s), s);
    coef[0] = static_cast<float>(c->dc_pred * q[0]);
    for (int k = 1; k < 64;) {
      const int rs = bits->Decode(ac);
      const int run = rs >> 4, size = rs & 15;
      if (size == 0) {
        if (run != 15) break;
        k += 16;
        continue;
      }
      k += run;
      if (k > 63) throw ParseError(r_.pos(), "AC coefficient index out of range");
      const int n = kZigzag[k];
      coef[n] = static_cast<float>(Extend(bits->Bits(size), size) * q[n]);
      ++k;
    }
    float pix[64];
    InverseDct8x8(coef, pix);
    const int stride = c->blocks_w * 8;
    uint8_t* dst = &c->samples[static_cast<size_t>(by) * 8 * stride + bx * 8];
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 8; ++x) {
        const long v = std::lround(pix[y * 8 + x] + 128.0f);
        dst[y * stride + x] = static_cast<uint8_t>(std::clamp(v, 0L, 255L));
      }
    }
  }

  RasterImage Assemble() const {
    const bool gray = components_.size() == 1;
    RasterImage out(width_, height_, gray ? ColorSpace::kGray : ColorSpace::kYCbCr);
    for (size_t ci = 0; ci < components_.size(); ++ci) {
      const Component& c = components_[ci];
      const int stride = c.blocks_w * 8;
      const int fx = hmax_ / c.h_samp, fy = vmax_ / c.v_samp;
      for (int y = 0; y < height_; ++y) {
        const uint8_t* row = &c.samples[static_cast<size_t>(y / fy) * stride];
        for (int x = 0; x < width_; ++x) {
          out.at(static_cast<int>(ci), x, y) = row[x / fx];
        }
      }
    }
    return out;
  }

  Reader r_;
  std::array<std::optional<std::array<int, 64>>, 4> qtables_;
  std::array<HuffmanDecodeTable, 4> dc_tables_;
  std::array<HuffmanDecodeTable, 4> ac_tables_;
  std::vector<Component> components_;
  int width_ = 0, height_ = 0;
  int hmax_ = 1, vmax_ = 1;
  int mcus_x_ = 0, mcus_y_ = 0;
  int restart_interval_ = 0;
};

}  // namespace

RasterImage Decode(std::span<const uint8_t> bytes) {
  return Decoder(bytes).Run();
}

std::vector<DqtTable> ReadDqtTables(std::span<const uint8_t> bytes) {
  Reader r(bytes);
  if (r.U8() != 0xFF || r.U8() != 0xD8) throw ParseError(0, "missing SOI marker");
  std::vector<DqtTable> out;
  for (;;) {
    if (r.U8() != 0xFF) throw ParseError(r.pos() - 1, "expected marker");
    int m = r.U8();
    while (m == 0xFF) m = r.U8();
    if (m == 0xD9 || m == 0xDA) break;
    if (m >= 0xD0 && m <= 0xD7) continue;
    const size_t start = r.pos();
    const int len = r.U16();
    if (len < 2) throw ParseError(start, "bad segment length");
    if (m != 0xDB) {
      r.Skip(len - 2);
      continue;
    }
    const size_t end = start + len;
    while (r.pos() < end) {
      const int pq_tq = r.U8();
      DqtTable t;
      t.slot = pq_tq & 15;
      t.precision_bits = (pq_tq >> 4) ? 16 : 8;
      for (int k = 0; k < 64; ++k) {
        t.values[kZigzag[k]] = t.precision_bits == 16 ? r.U16() : r.U8();
      }
      out.push_back(t);
    }
    if (r.pos() != end) throw ParseError(r.pos(), "DQT length mismatch");
  }
  return out;
}

}  // namespace qtfuse
