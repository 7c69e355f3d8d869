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

#include "qtfuse/texture.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "qtfuse/embedding_io.h"
#include "qtfuse/error.h"
#include "qtfuse/kmeans.h"
#include "qtfuse/texture_model.h"
#include "test_util.h"

namespace qtfuse {
namespace {

TexturePatch FlatPatch(uint8_t v) {
  TexturePatch p;
  p.pixels.assign(kPatchSize * kPatchSize, v);
  return p;
}

TexturePatch StripePatch(int period) {
  TexturePatch p;
  p.pixels.resize(kPatchSize * kPatchSize);
  for (int y = 0; y < kPatchSize; ++y) {
    for (int x = 0; x < kPatchSize; ++x) {
      p.pixels[y * kPatchSize + x] = (x / period) % 2 ? 200 : 40;
    }
  }
  return p;
}

TEST(PatchTest, Counts) {
  EXPECT_EQ(PatchCount(768, 512, 64), 96u);
  EXPECT_EQ(PatchCount(64, 64, 1), 1u);
  EXPECT_EQ(PatchCount(64, 64, 1000), 1u);
  EXPECT_EQ(PatchCount(4288, 2848, 256), 187u);
  EXPECT_EQ(ExtractPatches(RasterImage(768, 512, ColorSpace::kGray), 64).size(), 96u);
  EXPECT_EQ(ExtractPatches(RasterImage(4288, 2848, ColorSpace::kGray), 256).size(), 187u);
}

TEST(PatchTest, OriginsAndContent) {
  const RasterImage img = testing::RandomImage(200, 150, ColorSpace::kGray, 4);
  const auto patches = ExtractPatches(img, 50, 7);
  ASSERT_EQ(patches.size(), PatchCount(200, 150, 50));
  for (const auto& p : patches) {
    EXPECT_EQ(p.source_image, 7);
    EXPECT_EQ(p.x % 50, 0);
    EXPECT_LE(p.x + 64, 200);
    EXPECT_LE(p.y + 64, 150);
    EXPECT_EQ(p.pixels[5 * 64 + 9], img.at(0, p.x + 9, p.y + 5));
  }
}

TEST(PatchTest, Errors) {
  EXPECT_THROW(ExtractPatches(RasterImage(63, 100, ColorSpace::kGray), 8), Error);
  EXPECT_THROW(ExtractPatches(RasterImage(64, 64, ColorSpace::kGray), 0), Error);
}

TEST(EmbedTest, FlatPatch) {
  const Embedding e = EmbedPatch(FlatPatch(100));
  ASSERT_EQ(e.values.size(), kClassicalEmbeddingDim);
  EXPECT_EQ(e.embedder_id, kClassicalEmbedderId);
  EXPECT_GT(e.values[0], 0.0f);
  for (int k = 1; k < 64; ++k) EXPECT_NEAR(e.values[k], 0.0f, 1e-4) << k;
  EXPECT_NEAR(e.values[64], 100.0 / 255.0, 1e-6);
  EXPECT_EQ(e.values[65], 0.0f);
}

TEST(EmbedTest, StripesCarryOnlyHorizontalFrequencyEnergy) {
  const Embedding stripes = EmbedPatch(StripePatch(2));
  // Zigzag positions 1, 5, 6, 14 are (row, column) = (0,1), (0,2), (0,3),
  // (0,4); positions 2, 3, 9, 10 are the matching vertical frequencies.
  float horizontal = 0;
  for (int k : {1, 5, 6, 14}) horizontal += stripes.values[k];
  EXPECT_GT(horizontal, 1.0f);
  for (int k : {2, 3, 9, 10}) EXPECT_NEAR(stripes.values[k], 0.0f, 1e-4) << k;
  EXPECT_EQ(EmbedPatch(StripePatch(2)).values, stripes.values);
}

TEST(EmbedTest, MatchesBruteForceDct) {
  const RasterImage img = ReadImage(testing::DeskCorpusDir() + "/astronaut.png");
  const TexturePatch p = ExtractPatches(img, 64)[37];
  // Natural-order index of each zigzag position.
  int zigzag[64];
  {
    int k = 0;
    for (int s = 0; s < 15; ++s) {
      for (int i = 0; i <= s; ++i) {
        const int r = (s % 2) ? i : s - i, c = s - r;
        if (r < 8 && c < 8) zigzag[k++] = r * 8 + c;
      }
    }
  }
  std::vector<double> energy(64, 0.0);
  for (int by = 0; by < 8; ++by) {
    for (int bx = 0; bx < 8; ++bx) {
      for (int u = 0; u < 8; ++u) {
        for (int v = 0; v < 8; ++v) {
          double s = 0;
          for (int y = 0; y < 8; ++y) {
            for (int x = 0; x < 8; ++x) {
              s += p.pixels[(by * 8 + y) * 64 + bx * 8 + x] *
                   std::cos((2 * y + 1) * u * std::numbers::pi / 16) *
                   std::cos((2 * x + 1) * v * std::numbers::pi / 16);
            }
          }
          const double cu = u ? 0.5 : std::sqrt(0.125), cv = v ? 0.5 : std::sqrt(0.125);
          energy[u * 8 + v] += std::abs(cu * cv * s);
        }
      }
    }
  }
  const Embedding e = EmbedPatch(p);
  for (int k = 0; k < 64; ++k) {
    EXPECT_NEAR(e.values[k], std::log1p(energy[zigzag[k]] / 64), 1e-4) << k;
  }
}

TEST(KMeansTest, SeparatedBlobs) {
  Rng rng(3);
  std::vector<std::vector<float>> pts;
  std::vector<int> truth;
  for (int i = 0; i < 200; ++i) {
    const int blob = i % 2;
    pts.push_back({static_cast<float>(blob * 10 + rng.Uniform()),
                   static_cast<float>(-blob * 10 + rng.Uniform())});
    truth.push_back(blob);
  }
  const KMeansResult r = KMeans(pts, 2, 1);
  for (size_t i = 0; i < pts.size(); ++i) {
    EXPECT_EQ(r.assignments[i] == r.assignments[0], truth[i] == truth[0]);
  }
}

TEST(KMeansTest, SingleClusterIsMean) {
  std::vector<std::vector<float>> pts = {{1, 2}, {3, 4}, {5, 9}};
  const KMeansResult r = KMeans(pts, 1, 5);
  EXPECT_NEAR(r.centroids[0][0], 3.0, 1e-12);
  EXPECT_NEAR(r.centroids[0][1], 5.0, 1e-12);
}

TEST(KMeansTest, ObjectiveNonIncreasingAndDeterministic) {
  Rng rng(4);
  std::vector<std::vector<float>> pts(500, std::vector<float>(5));
  for (auto& p : pts) {
    for (auto& x : p) x = static_cast<float>(rng.Uniform() * 10);
  }
  const KMeansResult r = KMeans(pts, 8, 11);
  for (size_t i = 1; i < r.objective.size(); ++i) {
    EXPECT_LE(r.objective[i], r.objective[i - 1] * (1 + 1e-12));
  }
  const KMeansResult again = KMeans(pts, 8, 11);
  EXPECT_EQ(r.centroids, again.centroids);
  EXPECT_EQ(r.assignments, again.assignments);

  // Input order does not matter.
  std::vector<size_t> perm(pts.size());
  for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  for (size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.Below(i + 1)]);
  std::vector<std::vector<float>> shuffled;
  for (size_t i : perm) shuffled.push_back(pts[i]);
  const KMeansResult s = KMeans(shuffled, 8, 11);
  EXPECT_EQ(s.centroids, r.centroids);
  for (size_t i = 0; i < perm.size(); ++i) EXPECT_EQ(s.assignments[i], r.assignments[perm[i]]);
}

TEST(KMeansTest, Errors) {
  std::vector<std::vector<float>> pts = {{1}, {1}, {2}};
  EXPECT_THROW(KMeans(pts, 3, 1), Error);
  EXPECT_THROW(KMeans(pts, 4, 1), Error);
  EXPECT_THROW(KMeans(pts, 0, 1), Error);
  EXPECT_NO_THROW(KMeans(pts, 2, 1));
}

TEST(KMeansTest, NearestCentroidTiesGoLow) {
  std::vector<std::vector<float>> c = {{0, 0}, {2, 0}, {1, 5}};
  const std::vector<float> p = {1, 0};
  EXPECT_EQ(NearestCentroid(p, c), 0);
}

TEST(MosaicTest, Geometry) {
  std::vector<TexturePatch> patches;
  for (int i = 0; i < 225; ++i) patches.push_back(FlatPatch(static_cast<uint8_t>(i)));
  const RasterImage m = StitchMosaic(patches, 225, 1);
  EXPECT_EQ(m.width(), 960);
  EXPECT_EQ(m.height(), 960);
  std::set<int> seen;
  for (int gy = 0; gy < 15; ++gy) {
    for (int gx = 0; gx < 15; ++gx) seen.insert(m.at(0, gx * 64 + 3, gy * 64 + 3));
  }
  EXPECT_EQ(seen.size(), 225u);
}

TEST(MosaicTest, SinglePatch) {
  const TexturePatch p = ExtractPatches(testing::RandomImage(64, 64, ColorSpace::kGray, 9), 64)[0];
  const RasterImage m = StitchMosaic(std::vector<TexturePatch>{p}, 225, 3);
  ASSERT_EQ(m.width(), 64);
  EXPECT_TRUE(std::equal(p.pixels.begin(), p.pixels.end(), m.plane(0).begin()));
}

TEST(MosaicTest, CyclicFill) {
  std::vector<TexturePatch> patches;
  for (int i = 0; i < 10; ++i) patches.push_back(FlatPatch(static_cast<uint8_t>(10 * i + 5)));
  const RasterImage m = StitchMosaic(patches, 225, 2);
  EXPECT_EQ(m.width(), 256);
  std::vector<int> cells;
  for (int c = 0; c < 16; ++c) cells.push_back(m.at(0, (c % 4) * 64, (c / 4) * 64));
  for (int c = 10; c < 16; ++c) EXPECT_EQ(cells[c], cells[c - 10]);
  EXPECT_EQ(std::set<int>(cells.begin(), cells.end()).size(), 10u);
  EXPECT_THROW(StitchMosaic(std::vector<TexturePatch>{}, 5, 1), Error);
}

TEST(MosaicTest, SelectionIsSeededSubset) {
  std::vector<TexturePatch> patches;
  for (int i = 0; i < 50; ++i) patches.push_back(FlatPatch(static_cast<uint8_t>(i)));
  const RasterImage a = StitchMosaic(patches, 9, 1);
  EXPECT_EQ(a, StitchMosaic(patches, 9, 1));
  EXPECT_EQ(a.width(), 192);
  std::set<int> vals(a.plane(0).begin(), a.plane(0).end());
  EXPECT_EQ(vals.size(), 9u);
  for (int v : vals) EXPECT_LT(v, 50);
}

TEST(DistributionTest, FromLabels) {
  const std::vector<int> labels = {0, 0, 3, 3, 3, 3, 1, 0};
  const auto d = TextureDistribution::FromLabels(labels);
  EXPECT_DOUBLE_EQ(d.weights().at(3), 0.5);
  EXPECT_DOUBLE_EQ(d.weights().at(0), 0.375);
  EXPECT_EQ(d.weights().count(2), 0u);
  double sum = 0;
  for (const auto& [id, w] : d.weights()) sum += w;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_THROW(TextureDistribution({{0, 0.5}}), Error);
  EXPECT_THROW(TextureDistribution::FromLabels(std::vector<int>{}), Error);
  EXPECT_EQ(TextureDistribution({{0, 1.0}, {1, 0.0}}).weights().size(), 1u);
}

TEST(EmbeddingFileTest, RoundTrip) {
  Rng rng(6);
  EmbeddingFile f;
  f.embedder_id = "vgg16-pca500";
  f.dim = 500;
  for (int i = 0; i < 7; ++i) {
    std::vector<float> v(500);
    for (auto& x : v) x = static_cast<float>(rng.Uniform() * 2 - 1) * 1e3f;
    f.vectors.push_back(v);
  }
  f.labels = std::vector<uint16_t>{0, 1, 2, 3, 4, 5, 65535};
  const auto bytes = SerializeEmbeddings(f);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "JQFE");
  const EmbeddingFile back = ParseEmbeddings(bytes);
  EXPECT_EQ(back.embedder_id, f.embedder_id);
  EXPECT_EQ(back.dim, 500u);
  EXPECT_EQ(back.vectors, f.vectors);
  EXPECT_EQ(back.labels, f.labels);
}

TEST(EmbeddingFileTest, EmptyAndLabelsOnly) {
  EmbeddingFile f;
  f.embedder_id = "x";
  f.dim = 66;
  EXPECT_TRUE(ParseEmbeddings(SerializeEmbeddings(f)).vectors.empty());
  f.labels = std::vector<uint16_t>{1, 1, 2};
  const EmbeddingFile back = ParseEmbeddings(SerializeEmbeddings(f));
  EXPECT_TRUE(back.vectors.empty());
  EXPECT_EQ(back.labels->size(), 3u);
}

TEST(EmbeddingFileTest, Malformed) {
  EmbeddingFile f;
  f.embedder_id = "id";
  f.dim = 2;
  f.vectors = {{1, 2}, {3, 4}};
  auto bytes = SerializeEmbeddings(f);
  auto expect_format = [](std::vector<uint8_t> b) {
    try {
      ParseEmbeddings(b);
      ADD_FAILURE() << "no error";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kFormat);
    }
  };
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  expect_format(bad_magic);
  expect_format(std::vector<uint8_t>(bytes.begin(), bytes.end() - 1));
  auto extra = bytes;
  extra.push_back(0);
  expect_format(extra);
  f.vectors[1].push_back(5);  // length differs from dim
  EXPECT_THROW(SerializeEmbeddings(f), Error);
}

TextureModel ToyModel() {
  TextureModel m;
  m.embedder_id = std::string(kClassicalEmbedderId);
  m.dim = kClassicalEmbeddingDim;
  m.centroids.push_back(EmbedPatch(FlatPatch(30)).values);
  m.centroids.push_back(EmbedPatch(StripePatch(2)).values);
  m.centroids.push_back(EmbedPatch(FlatPatch(220)).values);
  return m;
}

TEST(ModelFileTest, RoundTripAndValidation) {
  TextureModel m = ToyModel();
  m.config = "k=3\n";
  EXPECT_EQ(ParseModel(SerializeModel(m)).centroids, m.centroids);
  Rng rng(2);
  for (int t = 0; t < 3; ++t) m.tables.emplace(t, testing::RandomTable(rng, ComponentKind::kLuminance));
  m.anneal_quality = 95;
  const TextureModel back = ParseModel(SerializeModel(m));
  EXPECT_EQ(back.tables, m.tables);
  EXPECT_EQ(back.anneal_quality, 95);
  EXPECT_EQ(back.config, m.config);
  EXPECT_EQ(SerializeModel(back), SerializeModel(m));

  TextureModel dup = ToyModel();
  dup.centroids[2] = dup.centroids[0];
  EXPECT_THROW(SerializeModel(dup), Error);
  auto bytes = SerializeModel(m);
  bytes.resize(bytes.size() - 3);
  EXPECT_THROW(ParseModel(bytes), Error);
}

TEST(PredictTest, SingleTextureImage) {
  const TextureModel m = ToyModel();
  RasterImage img(640, 320, ColorSpace::kGray);
  const TexturePatch s = StripePatch(2);
  for (int y = 0; y < 320; ++y) {
    for (int x = 0; x < 640; ++x) img.at(0, x, y) = s.pixels[(y % 64) * 64 + x % 64];
  }
  const auto d = PredictDistribution(img, m);
  ASSERT_EQ(d.weights().size(), 1u);
  EXPECT_EQ(d.weights().at(1), 1.0);
}

TEST(PredictTest, MatchesBruteForceNearestCentroid) {
  const RasterImage img = ReadImage(testing::DeskCorpusDir() + "/coffee.png");
  std::vector<std::vector<float>> pts;
  for (const auto& p : ExtractPatches(img, 32)) pts.push_back(EmbedPatch(p).values);
  const KMeansResult km = KMeans(pts, 6, 3);
  TextureModel m;
  m.embedder_id = std::string(kClassicalEmbedderId);
  m.dim = kClassicalEmbeddingDim;
  for (const auto& c : km.centroids) m.centroids.emplace_back(c.begin(), c.end());
  const auto labels = PredictLabels(img, m, 3);
  const auto patches = ExtractPatches(img, 64);
  ASSERT_EQ(labels.size(), patches.size());
  for (size_t i = 0; i < patches.size(); ++i) {
    const auto e = EmbedPatch(patches[i]).values;
    int best = 0;
    double best_d = 1e300;
    for (int c = 0; c < m.k(); ++c) {
      double d = 0;
      for (size_t j = 0; j < e.size(); ++j) d += (e[j] - m.centroids[c][j]) * (e[j] - m.centroids[c][j]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    EXPECT_EQ(labels[i], best);
  }
}

TEST(PredictTest, DownsamplesLargeImages) {
  const RasterImage big(4288, 2848, ColorSpace::kGray);
  const RasterImage small = PredictionImage(big);
  EXPECT_EQ(small.width(), 2048);
  EXPECT_EQ(small.height(), 1360);
  EXPECT_EQ(PredictionImage(RasterImage(1000, 3000, ColorSpace::kGray)).height(), 2048);
  EXPECT_EQ(PredictionImage(RasterImage(2048, 100, ColorSpace::kGray)).width(), 2048);
}

TEST(PredictTest, LabelOverrideAndFusion) {
  TextureModel m = ToyModel();
  EXPECT_THROW(FusedTable(m, TextureDistribution({{0, 1.0}}), 50), Error);
  Rng rng(12);
  for (int t = 0; t < 3; ++t) m.tables.emplace(t, testing::RandomTable(rng, ComponentKind::kLuminance, 20, 90));
  m.anneal_quality = 50;
  const std::vector<uint16_t> labels = {2, 2, 2, 2};
  const auto d = DistributionFromLabels(labels, m);
  EXPECT_EQ(FusedTable(m, d, 50), m.tables.at(2));
  EXPECT_EQ(FusedTable(m, d, 95), ScaleTable(m.tables.at(2), 95));
  EXPECT_THROW(DistributionFromLabels(std::vector<uint16_t>{3}, m), Error);

  TextureModel neural = m;
  neural.embedder_id = "vgg16-pca500";
  EXPECT_THROW(PredictDistribution(RasterImage(64, 64, ColorSpace::kGray), neural), Error);
}

}  // namespace
}  // namespace qtfuse
