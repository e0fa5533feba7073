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
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vfl/common/matrix.h"

namespace vfl::samples {

struct RingSpec {
  int n_rings = 11;
  double r = 0.5;
  // Divide distances by the cluster's RMS radius before binning.
  bool normalize = false;

  // Squared outer edge of ring i, i * r. Exact for the default constants.
  double SquaredBoundary(int i) const { return i * r; }
  // sqrt(i r) for i = 1..n_rings-1.
  std::vector<double> Boundaries() const;
  void Validate() const;
};

void to_json(nlohmann::json& j, const RingSpec& s);
void from_json(const nlohmann::json& j, RingSpec& s);

// Index i with boundaries[i-1] <= d < boundaries[i]; the last ring is open.
int RingIndex(double distance, const std::vector<double>& boundaries);

// Ring of every member. `members` indexes rows of `coords`.
std::vector<int> RingPartition(const Matrix& coords, const std::vector<size_t>& members,
                               const Vector& centroid, const RingSpec& spec);

// Retention rates per ring for each cluster; clusters without an entry keep
// everything.
struct SamplePlan {
  uint64_t seed = 0;
  std::map<int, std::vector<double>> rates;
};

void to_json(nlohmann::json& j, const SamplePlan& p);
void from_json(const nlohmann::json& j, SamplePlan& p);

// From each (cluster, ring) keep ceil(rate * size) members drawn uniformly
// without replacement. The draw for each (cluster, ring) uses its own seed
// derived from the plan seed, so editing one ring leaves the others alone.
// `ring_members[c][i]` lists the member indices of ring i in cluster c.
// Returns the sorted union of kept indices. Throws kRateOutOfRange.
std::vector<size_t> ApplyPlan(const std::vector<std::vector<std::vector<size_t>>>& ring_members,
                              const SamplePlan& plan, int n_rings);

}  // namespace vfl::samples
