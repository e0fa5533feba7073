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

#pragma once

#include <cstdint>
#include <vector>

#include "vfl/common/matrix.h"

namespace vfl::samples {

struct KMeansResult {
  Matrix centroids;  // k x d
  std::vector<int> assignment;
  double wcss = 0.0;
  int iterations = 0;
};

// KMeans++ seeding followed by Lloyd iterations until the assignment stops
// changing or `max_iterations` is hit. The best of `restarts` independently
// seeded runs (lowest WCSS, earliest on ties) is returned. Ties go to the lower cluster index; an
// emptied cluster is moved to the point farthest from its centroid.
// Throws kTooFewRows for k < 1 and kKTooLarge for k > n.
KMeansResult KMeans(const Matrix& points, int k, uint64_t seed, int max_iterations = 300,
                    int restarts = 10);

struct ElbowResult {
  int k = 1;
  std::vector<double> wcss;  // wcss[k - 1]
};

// Runs KMeans for k = 1..k_max and picks the k farthest below the chord from
// (1, WCSS_1) to (k_max, WCSS_k_max). Throws kKRangeInvalid unless
// 2 <= k_max < n.
ElbowResult ChooseKElbow(const Matrix& points, int k_max, uint64_t seed);

}  // namespace vfl::samples
