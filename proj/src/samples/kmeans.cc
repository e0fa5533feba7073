// Copyright 2026 The VFL Workbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vfl/samples/kmeans.h"

#include <algorithm>
#include <limits>

#include "vfl/common/error.h"
#include "vfl/common/random.h"

namespace vfl::samples {
namespace {

double SquaredDistance(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

}  // namespace

namespace {

KMeansResult KMeansOnce(const Matrix& points, int k, uint64_t seed, int max_iterations) {
  const Eigen::Index n = points.rows();
  Rng rng(seed);

  // Seeding: first centre uniform, the rest with probability ~ D^2.
  Matrix centroids(k, points.cols());
  std::vector<double> d2(static_cast<size_t>(n), std::numeric_limits<double>::infinity());
  std::vector<bool> chosen(static_cast<size_t>(n), false);
  Eigen::Index first = static_cast<Eigen::Index>(UniformIndex(rng, static_cast<uint64_t>(n)));
  centroids.row(0) = points.row(first);
  chosen[static_cast<size_t>(first)] = true;
  for (int c = 1; c < k; ++c) {
    double total = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[static_cast<size_t>(i)] =
          std::min(d2[static_cast<size_t>(i)], SquaredDistance(points, i, centroids, c - 1));
      total += d2[static_cast<size_t>(i)];
    }
    Eigen::Index pick = -1;
    if (total > 0) {
      double target = UniformUnit(rng) * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= d2[static_cast<size_t>(i)];
        if (target < 0 && d2[static_cast<size_t>(i)] > 0) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {
        for (Eigen::Index i = n - 1; i >= 0; --i) {
          if (d2[static_cast<size_t>(i)] > 0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // Every point sits on a centre already; take the first unused one.
      for (Eigen::Index i = 0; i < n && pick < 0; ++i) {
        if (!chosen[static_cast<size_t>(i)]) pick = i;
      }
    }
    centroids.row(c) = points.row(pick);
    chosen[static_cast<size_t>(pick)] = true;
  }

  KMeansResult result;
  result.assignment.assign(static_cast<size_t>(n), -1);
  for (int it = 0; it < max_iterations; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = SquaredDistance(points, i, centroids, 0);
      for (int c = 1; c < k; ++c) {
        const double d = SquaredDistance(points, i, centroids, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (result.assignment[static_cast<size_t>(i)] != best) {
        result.assignment[static_cast<size_t>(i)] = best;
        changed = true;
      }
    }
    result.iterations = it + 1;
    if (!changed) break;

    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<int> counts(static_cast<size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = result.assignment[static_cast<size_t>(i)];
      sums.row(c) += points.row(i);
      ++counts[static_cast<size_t>(c)];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] > 0) {
        centroids.row(c) = sums.row(c) / counts[static_cast<size_t>(c)];
        continue;
      }
      Eigen::Index far = 0;
      double far_d = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d =
            SquaredDistance(points, i, centroids, result.assignment[static_cast<size_t>(i)]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      centroids.row(c) = points.row(far);
      result.assignment[static_cast<size_t>(far)] = c;
    }
  }
  // Final centroids are the member means of the final assignment.
  Matrix sums = Matrix::Zero(k, points.cols());
  std::vector<int> counts(static_cast<size_t>(k), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = result.assignment[static_cast<size_t>(i)];
    sums.row(c) += points.row(i);
    ++counts[static_cast<size_t>(c)];
  }
  for (int c = 0; c < k; ++c) {
    if (counts[static_cast<size_t>(c)] > 0) centroids.row(c) = sums.row(c) / counts[static_cast<size_t>(c)];
  }
  result.centroids = centroids;
  result.wcss = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    result.wcss += SquaredDistance(points, i, centroids, result.assignment[static_cast<size_t>(i)]);
  }
  return result;
}

}  // namespace

KMeansResult KMeans(const Matrix& points, int k, uint64_t seed, int max_iterations,
                    int restarts) {
  VFL_ENFORCE(k >= 1, ErrorCode::kInvalidArgument, "k must be at least 1");
  VFL_ENFORCE(k <= points.rows(), ErrorCode::kKTooLarge, "k exceeds the number of points");
  KMeansResult best;
  for (int r = 0; r < std::max(restarts, 1); ++r) {
    auto run = KMeansOnce(points, k, r == 0 ? seed : DeriveSeed(seed, 0x4b4d0000u + r),
                          max_iterations);
    if (r == 0 || run.wcss < best.wcss) best = std::move(run);
  }
  return best;
}

ElbowResult ChooseKElbow(const Matrix& points, int k_max, uint64_t seed) {
  VFL_ENFORCE(k_max >= 2 && k_max < points.rows(), ErrorCode::kKRangeInvalid,
              "k_max must satisfy 2 <= k_max < n");
  ElbowResult result;
  for (int k = 1; k <= k_max; ++k) {
    result.wcss.push_back(KMeans(points, k, DeriveSeed(seed, static_cast<uint64_t>(k))).wcss);
  }
  // Vertical gap below the chord; for a fixed line it is proportional to the
  // perpendicular distance, whatever the axis scales.
  const double w1 = result.wcss.front();
  const double wk = result.wcss.back();
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= k_max; ++k) {
    const double chord = w1 + (wk - w1) * (k - 1) / static_cast<double>(k_max - 1);
    const double gap = chord - result.wcss[static_cast<size_t>(k - 1)];
    if (gap > best + 1e-12 * std::max(1.0, std::abs(w1))) {
      best = gap;
      result.k = k;
    }
  }
  return result;
}

}  // namespace vfl::samples
