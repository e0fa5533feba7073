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

#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vfl/common/matrix.h"

namespace vfl::samples {

// mu = 2 - sqrt(sum_y |q(y) - 1/|alphabet||^2), q the label distribution of
// the selection over the pool's label alphabet. Throws kEmptySelection.
double Homogeneity(const std::vector<int>& selected_labels, const std::vector<int>& alphabet);

// 1 - mean pairwise similarity over unordered pairs. Vectors are min-max
// scaled per feature over the selection; S is cosine clamped to [0, 1], with
// S = 1 for two all-zero vectors and S = 0 for a zero and a non-zero vector.
// Throws kTooFewSamples below two vectors.
double Diversity(const Matrix& vectors);

struct PoolQuality {
  size_t sample_count = 0;
  std::optional<double> homogeneity;
  std::optional<double> diversity;
};

void to_json(nlohmann::json& j, const PoolQuality& q);

// Metrics of the rows `selected`; a metric whose precondition fails is left
// empty rather than thrown.
PoolQuality ComputeQuality(const std::vector<size_t>& selected, const std::vector<int>& labels,
                           const Matrix& features);

}  // namespace vfl::samples
