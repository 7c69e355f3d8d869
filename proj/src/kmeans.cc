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

#include "qtfuse/kmeans.h"

#include <algorithm>
#include <limits>
#include <numeric>

#include "qtfuse/error.h"
#include "qtfuse/rng.h"

namespace qtfuse {

namespace {

double SquaredDistance(std::span<const float> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double SquaredDistance(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

int NearestCentroid(std::span<const float> point,
                    std::span<const std::vector<float>> centroids) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t c = 0; c < centroids.size(); ++c) {
    const double d = SquaredDistance(point, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

KMeansResult KMeans(std::span<const std::vector<float>> points, int k,
                    uint64_t seed, const KMeansOptions& options) {
  Require(k >= 1, "K must be >= 1");
  const size_t n = points.size();
  if (n < static_cast<size_t>(k)) {
    Fail(ErrorCode::kInvalidArgument, "K=" + std::to_string(k) + " exceeds the " +
                                          std::to_string(n) + " available points");
  }
  const size_t dim = points[0].size();
  for (const auto& p : points) Require(p.size() == dim, "embedding dimensions differ");

  // Canonical order: the stable lexicographic sort makes the run independent
  // of input order.
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return std::lexicographical_compare(points[a].begin(), points[a].end(),
                                        points[b].begin(), points[b].end());
  });
  size_t distinct = 1;
  for (size_t i = 1; i < n; ++i) {
    if (points[order[i]] != points[order[i - 1]]) ++distinct;
  }
  if (distinct < static_cast<size_t>(k)) {
    Fail(ErrorCode::kInvalidArgument, "K=" + std::to_string(k) + " exceeds the " +
                                          std::to_string(distinct) + " distinct points");
  }
  auto point = [&](size_t i) -> std::span<const float> { return points[order[i]]; };

  // k-means++ seeding.
  Rng rng(seed);
  std::vector<std::vector<double>> centroids;
  {
    const size_t first = rng.Below(n);
    centroids.emplace_back(point(first).begin(), point(first).end());
  }
  std::vector<double> d2(n);
  for (size_t i = 0; i < n; ++i) d2[i] = SquaredDistance(point(i), centroids[0]);
  while (centroids.size() < static_cast<size_t>(k)) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    const double target = rng.Uniform() * total;
    double acc = 0.0;
    size_t pick = n;
    for (size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      acc += d2[i];
      pick = i;
      if (acc > target) break;
    }
    centroids.emplace_back(point(pick).begin(), point(pick).end());
    for (size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], SquaredDistance(point(i), centroids.back()));
    }
  }

  KMeansResult result;
  std::vector<int> assign(n, -1);
  std::vector<double> dist(n);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    bool changed = false;
    double objective = 0.0;
    for (size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = SquaredDistance(point(i), centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) changed = true;
      assign[i] = best;
      dist[i] = best_d;
      objective += best_d;
    }
    result.objective.push_back(objective);
    if (!changed) break;

    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<size_t> counts(k, 0);
    for (size_t i = 0; i < n; ++i) {
      auto p = point(i);
      for (size_t j = 0; j < dim; ++j) sums[assign[i]][j] += p[j];
      ++counts[assign[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Re-seed an empty cluster with the point farthest from its centroid.
        const size_t far = static_cast<size_t>(
            std::max_element(dist.begin(), dist.end()) - dist.begin());
        centroids[c].assign(point(far).begin(), point(far).end());
        dist[far] = 0.0;
        continue;
      }
      for (size_t j = 0; j < dim; ++j) centroids[c][j] = sums[c][j] / counts[c];
    }
  }

  result.centroids = std::move(centroids);
  result.assignments.assign(n, 0);
  for (size_t i = 0; i < n; ++i) result.assignments[order[i]] = assign[i];
  return result;
}

}  // namespace qtfuse
