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

#ifndef QTFUSE_KMEANS_H_
#define QTFUSE_KMEANS_H_

#include <cstdint>
#include <span>
#include <vector>

namespace qtfuse {

struct KMeansOptions {
  int max_iterations = 300;
};

struct KMeansResult {
  std::vector<std::vector<double>> centroids;
  std::vector<int> assignments;  // per input point, input order
  // Within-cluster sum of squares after each assignment step.
  std::vector<double> objective;
};

// Lloyd's algorithm with k-means++ seeding and Euclidean distance.
// Points are first put in a canonical (lexicographic) order, so the result
// depends on the point set and the seed but not on the input order.
// Requires at least k distinct points.
KMeansResult KMeans(std::span<const std::vector<float>> points, int k,
                    uint64_t seed, const KMeansOptions& options = {});

// Index of the closest centroid, lowest index on ties.
int NearestCentroid(std::span<const float> point,
                    std::span<const std::vector<float>> centroids);

}  // namespace qtfuse

#endif  // QTFUSE_KMEANS_H_
