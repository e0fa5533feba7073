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

#include "vfl/samples/quality.h"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "vfl/common/error.h"

namespace vfl::samples {

double Homogeneity(const std::vector<int>& selected_labels, const std::vector<int>& alphabet) {
  VFL_ENFORCE(!selected_labels.empty(), ErrorCode::kEmptySelection, "selection is empty");
  VFL_ENFORCE(!alphabet.empty(), ErrorCode::kInvalidArgument, "label alphabet is empty");
  const double uniform = 1.0 / static_cast<double>(alphabet.size());
  const double m = static_cast<double>(selected_labels.size());
  double sum = 0;
  for (int label : alphabet) {
    const double q =
        static_cast<double>(std::count(selected_labels.begin(), selected_labels.end(), label)) / m;
    sum += (q - uniform) * (q - uniform);
  }
  return 2.0 - std::sqrt(sum);
}

double Diversity(const Matrix& vectors) {
  const Eigen::Index m = vectors.rows();
  VFL_ENFORCE(m >= 2, ErrorCode::kTooFewSamples, "diversity needs at least two vectors");
  Matrix scaled = vectors;
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    const double lo = vectors.col(j).minCoeff();
    const double hi = vectors.col(j).maxCoeff();
    if (hi == lo) {
      scaled.col(j).setZero();
    } else {
      scaled.col(j) = (vectors.col(j).array() - lo) / (hi - lo);
    }
  }
  // Scaled entries are non-negative, so every cosine is already >= 0 and the
  // sum over pairs of u_i . u_j follows from |sum u|^2.
  Vector sum_unit = Vector::Zero(vectors.cols());
  double zeros = 0;
  double nonzeros = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double norm = scaled.row(i).norm();
    if (norm == 0) {
      zeros += 1;
    } else {
      nonzeros += 1;
      sum_unit += scaled.row(i).transpose() / norm;
    }
  }
  const double pair_sum =
      zeros * (zeros - 1) / 2 + std::max(0.0, (sum_unit.squaredNorm() - nonzeros) / 2);
  const double md = static_cast<double>(m);
  return std::clamp(1.0 - 2.0 * pair_sum / (md * (md - 1)), 0.0, 1.0);
}

void to_json(nlohmann::json& j, const PoolQuality& q) {
  j = nlohmann::json{{"sample_count", q.sample_count},
                     {"homogeneity", nullptr},
                     {"diversity", nullptr}};
  if (q.homogeneity) j["homogeneity"] = *q.homogeneity;
  if (q.diversity) j["diversity"] = *q.diversity;
}

PoolQuality ComputeQuality(const std::vector<size_t>& selected, const std::vector<int>& labels,
                           const Matrix& features) {
  PoolQuality q;
  q.sample_count = selected.size();
  const std::set<int> alphabet_set(labels.begin(), labels.end());
  const std::vector<int> alphabet(alphabet_set.begin(), alphabet_set.end());
  if (!selected.empty()) {
    std::vector<int> sel;
    for (size_t i : selected) sel.push_back(labels[i]);
    q.homogeneity = Homogeneity(sel, alphabet);
  }
  if (selected.size() >= 2) q.diversity = Diversity(SelectRows(features, selected));
  return q;
}

}  // namespace vfl::samples
