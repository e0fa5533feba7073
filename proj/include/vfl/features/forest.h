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

namespace vfl::features {

struct ForestOptions {
  int trees = 100;
  int max_depth = 10;
  int min_samples_split = 2;
  // Features tried per split; 0 means round(sqrt(d)), at least 1.
  int max_features = 0;
};

// Bagged CART classifier with Gini impurity, binary labels.
class RandomForest {
 public:
  struct Node {
    int feature = -1;  // -1 for a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };
  using Tree = std::vector<Node>;

  static RandomForest Fit(const Matrix& x, const std::vector<int>& y,
                          const ForestOptions& options, uint64_t seed);

  // Mean over trees of the leaf's positive-class fraction.
  std::vector<double> PredictProba(const Matrix& x) const;
  // Mean decrease in impurity, each tree normalized to sum 1 (trees that
  // never split contribute zeros).
  const std::vector<double>& impurity_importance() const { return importance_; }

 private:
  static double PredictTree(const Tree& tree, const Matrix& x, Eigen::Index row);

  std::vector<Tree> trees_;
  std::vector<double> importance_;
};

}  // namespace vfl::features
