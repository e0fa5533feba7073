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
#include "vfl/samples/rings.h"

namespace vfl::samples {

// 1-D Wasserstein distance between two empirical distributions: the area
// between their CDFs.
double Wasserstein1D(std::vector<double> a, std::vector<double> b);

struct ClusterInfo {
  int id = 0;
  Vector centroid;                    // 2-D
  std::vector<size_t> members;        // row indices, ascending
  std::map<int, size_t> label_hist;
  std::vector<double> emd_profile;    // one entry per feature
  std::vector<int> member_rings;      // aligned with members
  std::vector<std::vector<size_t>> rings;  // member rows per ring
};

struct ClusterModel {
  int k = 0;
  uint64_t seed = 0;
  double wcss = 0.0;
  RingSpec ring_spec;
  std::vector<int> assignment;
  Matrix centroids;  // k x 2
  std::vector<ClusterInfo> clusters;

  // ring_members[c][i] for ApplyPlan.
  std::vector<std::vector<std::vector<size_t>>> RingMembers() const;
};

// KMeans++ on the embedding, then per-cluster label histograms, EMD of every
// feature against its global marginal, and the ring partition. Unlabelled
// populations pass empty `labels` and get empty histograms.
ClusterModel BuildClusterModel(const Matrix& coords, const Matrix& features,
                               const std::vector<int>& labels, int k, uint64_t seed,
                               const RingSpec& ring_spec = {});

// Per-ring rates that keep exactly `target` members in total, spread over the
// (cluster, ring) cells in proportion to their sizes by largest remainder.
// Throws kInvalidArgument when the target exceeds the population.
SamplePlan PlanForTarget(const ClusterModel& model, size_t target, uint64_t seed);

// cluster -> {centroid, label_hist, emd_profile, rings: {index: [ids]}}
nlohmann::json ClusterModelToJson(const ClusterModel& model, const std::vector<std::string>& ids,
                                  const std::vector<std::string>& feature_names);

}  // namespace vfl::samples
