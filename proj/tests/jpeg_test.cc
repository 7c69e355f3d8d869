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

#include "qtfuse/jpeg.h"

#include <gtest/gtest.h>

#include <cmath>

#include "libjpeg_reference.h"
#include "qtfuse/error.h"
#include "qtfuse/metrics.h"
#include "test_util.h"

namespace qtfuse {
namespace {

QuantTable Luma(int q) { return ScaleTable(StandardLuminanceTable(), q); }
QuantTable Chroma(int q) { return ScaleTable(StandardChrominanceTable(), q); }

double Mse(const RasterImage& a, const RasterImage& b) {
  const PlaneF x = qtfuse::Luma(a), y = qtfuse::Luma(b);
  double s = 0;
  for (size_t i = 0; i < x.data.size(); ++i) s += (x.data[i] - y.data[i]) * (x.data[i] - y.data[i]);
  return s / x.data.size();
}

TEST(JpegBlobTest, Markers) {
  EXPECT_EQ(JpegBlob({0xFF, 0xD8, 0xFF, 0xD9}).size(), 4u);
  EXPECT_THROW(JpegBlob({0xFF, 0xD8}), Error);
  EXPECT_THROW(JpegBlob({0x00, 0xD8, 0xFF, 0xD9}), Error);
}

TEST(EncodeTest, UniformGrayIsNearlyExact) {
  RasterImage img(64, 64, ColorSpace::kGray);
  for (auto& v : img.plane(0)) v = 128;
  const RasterImage back = Decode(Encode(img, Luma(95), Chroma(95)));
  ASSERT_EQ(back.width(), 64);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) ASSERT_LE(std::abs(back.at(0, x, y) - 128), 1);
  }
}

TEST(EncodeTest, DeterministicAndShapePreserving) {
  for (auto [w, h] : {std::pair{8, 8}, {17, 9}, {33, 70}, {100, 64}}) {
    for (auto cs : {ColorSpace::kGray, ColorSpace::kRgb}) {
      const RasterImage img = testing::RandomImage(w, h, cs, w * 31 + h);
      for (auto s : {Subsampling::k420, Subsampling::k444}) {
        EncodeOptions o;
        o.subsampling = s;
        const JpegBlob a = Encode(img, Luma(75), Chroma(75), o);
        EXPECT_EQ(a, Encode(img, Luma(75), Chroma(75), o));
        const RasterImage d = Decode(a);
        EXPECT_EQ(d.width(), w);
        EXPECT_EQ(d.height(), h);
      }
    }
  }
}

TEST(EncodeTest, DqtCarriesSuppliedTables) {
  Rng rng(5);
  const RasterImage img = testing::RandomImage(40, 24, ColorSpace::kRgb, 1);
  for (int n = 0; n < 20; ++n) {
    const QuantTable l = testing::RandomTable(rng, ComponentKind::kLuminance);
    const QuantTable c = testing::RandomTable(rng, ComponentKind::kChrominance);
    const JpegBlob blob = Encode(img, l, c);
    const auto dqt = ReadDqtTables(blob.bytes());
    ASSERT_EQ(dqt.size(), 2u);
    EXPECT_EQ(dqt[0].slot, 0);
    EXPECT_EQ(dqt[1].slot, 1);
    EXPECT_EQ(dqt[0].precision_bits, 8);
    EXPECT_EQ(dqt[0].values, l.values());
    EXPECT_EQ(dqt[1].values, c.values());
    const auto ref = testing::LibjpegDecode(blob.bytes());
    ASSERT_TRUE(ref.ok) << ref.error;
    EXPECT_EQ(ref.quant_tables[0], l.values());
    EXPECT_EQ(ref.quant_tables[1], c.values());
  }
}

TEST(EncodeTest, FinerTablesReduceError) {
  const RasterImage img = ReadImage(testing::DeskCorpusDir() + "/astronaut.png");
  const auto ones = QuantTable::Uniform(1, ComponentKind::kLuminance);
  const auto ones_c = QuantTable::Uniform(1, ComponentKind::kChrominance);
  EXPECT_LT(Mse(img, Decode(Encode(img, ones, ones_c))),
            Mse(img, Decode(Encode(img, Luma(50), Chroma(50)))));
}

TEST(EncodeTest, HigherQualityIsLarger) {
  const RasterImage img = ReadImage(testing::DeskCorpusDir() + "/coffee.png");
  EXPECT_GT(Encode(img, Luma(95), Chroma(95)).size(), Encode(img, Luma(50), Chroma(50)).size());
}

TEST(EncodeTest, DoublingTablesShrinksFiles) {
  int exceptions = 0, count = 0;
  for (const auto& path : testing::DeskImages()) {
    const RasterImage img = ReadImage(path);
    auto doubled = [](const QuantTable& t) {
      QuantTable::Values v = t.values();
      for (int& x : v) x = std::min(255, 2 * x);
      return QuantTable(v, t.kind());
    };
    const size_t a = Encode(img, Luma(75), Chroma(75)).size();
    const size_t b = Encode(img, doubled(Luma(75)), doubled(Chroma(75))).size();
    exceptions += b >= a;
    ++count;
  }
  EXPECT_GE(count, 20);
  EXPECT_LE(exceptions, 1);
}

TEST(EncodeTest, OptimizedHuffmanIsSmallerAndDecodes) {
  const RasterImage img = ReadImage(testing::DeskCorpusDir() + "/chelsea.png");
  EncodeOptions opt;
  opt.optimize_huffman = true;
  const JpegBlob a = Encode(img, Luma(75), Chroma(75));
  const JpegBlob b = Encode(img, Luma(75), Chroma(75), opt);
  EXPECT_LT(b.size(), a.size());
  EXPECT_EQ(Decode(a), Decode(b));
  EXPECT_TRUE(testing::LibjpegDecode(b.bytes()).ok);
}

TEST(DecodeTest, TruncatedStreamIsParseError) {
  const RasterImage img = testing::RandomImage(48, 40, ColorSpace::kRgb, 2);
  const JpegBlob blob = Encode(img, Luma(80), Chroma(80));
  for (size_t cut : {size_t{2}, size_t{20}, size_t{150}, blob.size() / 2, blob.size() - 3}) {
    std::vector<uint8_t> part(blob.bytes().begin(), blob.bytes().begin() + cut);
    try {
      Decode(part);
      FAIL() << "cut " << cut;
    } catch (const ParseError& e) {
      EXPECT_LE(e.offset(), cut);
    }
  }
}

TEST(DecodeTest, GarbageIsParseError) {
  std::vector<uint8_t> junk(100, 0x42);
  EXPECT_THROW(Decode(junk), ParseError);
  EXPECT_THROW(Decode(std::vector<uint8_t>{0xFF, 0xD8, 0xFF, 0xD9}), ParseError);
}

TEST(DecodeTest, ReadsLibjpegOutputCloseToOwnRoundTrip) {
  for (const char* name : {"astronaut.png", "camera.png", "rocket.png"}) {
    const RasterImage img = ReadImage(testing::DeskCorpusDir() + "/" + name);
    for (int q : {50, 90}) {
      const auto ref_bytes = testing::LibjpegEncode(img, q, Subsampling::k420);
      const RasterImage theirs = Decode(ref_bytes);
      const RasterImage ours = Decode(Encode(img, Luma(q), Chroma(q)));
      const double a = Psnr(img, theirs).value, b = Psnr(img, ours).value;
      EXPECT_NEAR(a, b, 0.5) << name << " Q=" << q;
      // Our decode of libjpeg's stream also agrees with libjpeg's own decode.
      const auto lib = testing::LibjpegDecode(ref_bytes);
      ASSERT_TRUE(lib.ok);
      EXPECT_GT(Psnr(lib.image, theirs).value, 35.0);
    }
  }
}

TEST(DecodeTest, ThirdPartyDecodesOurOutput) {
  for (auto s : {Subsampling::k420, Subsampling::k444}) {
    EncodeOptions o;
    o.subsampling = s;
    const RasterImage img = ReadImage(testing::DeskCorpusDir() + "/coins.png");
    const JpegBlob blob = Encode(img, Luma(60), Chroma(60), o);
    const auto lib = testing::LibjpegDecode(blob.bytes());
    ASSERT_TRUE(lib.ok) << lib.error;
    EXPECT_EQ(lib.warnings, 0);
    EXPECT_EQ(lib.width, img.width());
    EXPECT_GT(Psnr(lib.image, Decode(blob)).value, 40.0);
  }
}

TEST(SizeTest, WithinTenPercentOfLibjpeg) {
  const RasterImage img = ReadImage(testing::DeskCorpusDir() + "/astronaut.png");
  const double ours = Encode(img, Luma(95), Chroma(95)).size();
  const double theirs = testing::LibjpegEncode(img, 95, Subsampling::k420).size();
  EXPECT_LT(std::abs(ours / theirs - 1.0), 0.10);
}

}  // namespace
}  // namespace qtfuse
