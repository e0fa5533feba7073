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

#include "vfl/features/forest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vfl/common/error.h"
#include "vfl/common/random.h"

namespace vfl::features {
namespace {

double Gini(double pos, double total) {
  if (total <= 0) return 0.0;
  const double p = pos / total;
  return 2.0 * p * (1.0 - p);
}

struct Builder {
  const Matrix& x;
  const std::vector<int>& y;
  const ForestOptions& options;
  int max_features;
  Rng& rng;
  std::vector<RandomForest::Node>* tree;
  std::vector<double>* importance;
  double root_size = 0;

  int Build(std::vector<size_t>& rows, size_t begin, size_t end, int depth) {
    const double n = static_cast<double>(end - begin);
    double pos = 0;
    for (size_t k = begin; k < end; ++k) pos += y[rows[k]];
    const int id = static_cast<int>(tree->size());
    tree->push_back({});
    (*tree)[static_cast<size_t>(id)].value = pos / n;
    if (depth >= options.max_depth || n < options.min_samples_split || pos == 0 || pos == n) {
      return id;
    }

    // Random subset of candidate features.
    const auto d = static_cast<size_t>(x.cols());
    std::vector<size_t> features(d);
    std::iota(features.begin(), features.end(), size_t{0});
    for (size_t k = 0; k < static_cast<size_t>(max_features) && k < d; ++k) {
      std::swap(features[k], features[k + UniformIndex(rng, d - k)]);
    }
    const double parent = Gini(pos, n);
    double best_gain = 0;
    int best_feature = -1;
    double best_threshold = 0;
    std::vector<std::pair<double, int>> column(end - begin);
    for (size_t f = 0; f < static_cast<size_t>(max_features) && f < d; ++f) {
      const auto j = static_cast<Eigen::Index>(features[f]);
      for (size_t k = begin; k < end; ++k) {
        column[k - begin] = {x(static_cast<Eigen::Index>(rows[k]), j), y[rows[k]]};
      }
      std::sort(column.begin(), column.end());
      double left_n = 0, left_pos = 0;
      for (size_t k = 0; k + 1 < column.size(); ++k) {
        left_n += 1;
        left_pos += column[k].second;
        if (column[k].first == column[k + 1].first) continue;
        const double right_n = n - left_n;
        const double child = (left_n * Gini(left_pos, left_n) +
                              right_n * Gini(pos - left_pos, right_n)) / n;
        const double gain = parent - child;
        if (gain > best_gain + 1e-15) {
          best_gain = gain;
          best_feature = static_cast<int>(j);
          best_threshold = 0.5 * (column[k].first + column[k + 1].first);
        }
      }
    }
    if (best_feature < 0) return id;

    (*importance)[static_cast<size_t>(best_feature)] += n / root_size * best_gain;
    auto mid = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                              rows.begin() + static_cast<std::ptrdiff_t>(end), [&](size_t r) {
                                return x(static_cast<Eigen::Index>(r), best_feature) <=
                                       best_threshold;
                              });
    const auto split = static_cast<size_t>(mid - rows.begin());
    const int left = Build(rows, begin, split, depth + 1);
    const int right = Build(rows, split, end, depth + 1);
    auto& node = (*tree)[static_cast<size_t>(id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = left;
    node.right = right;
    return id;
  }
};

}  // namespace

RandomForest RandomForest::Fit(const Matrix& x, const std::vector<int>& y,
                               const ForestOptions& options, uint64_t seed) {
  VFL_ENFORCE(x.rows() > 0 && static_cast<size_t>(x.rows()) == y.size(),
              ErrorCode::kLengthMismatch, "forest needs one label per row");
  VFL_ENFORCE(options.trees > 0, ErrorCode::kInvalidArgument, "forest needs trees");
  const auto d = static_cast<size_t>(x.cols());
  int max_features = options.max_features;
  if (max_features <= 0) {
    max_features = std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(d)))));
  }
  RandomForest forest;
  forest.importance_.assign(d, 0.0);
  Rng rng(seed);
  const auto n = static_cast<size_t>(x.rows());
  for (int t = 0; t < options.trees; ++t) {
    std::vector<size_t> rows(n);
    for (auto& r : rows) r = UniformIndex(rng, n);
    Tree tree;
    std::vector<double> imp(d, 0.0);
    Builder builder{x, y, options, max_features, rng, &tree, &imp, static_cast<double>(n)};
    builder.Build(rows, 0, n, 0);
    const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (total > 0) {
      for (size_t j = 0; j < d; ++j) forest.importance_[j] += imp[j] / total;
    }
    forest.trees_.push_back(std::move(tree));
  }
  for (auto& v : forest.importance_) v /= options.trees;
  return forest;
}

double RandomForest::PredictTree(const Tree& tree, const Matrix& x, Eigen::Index row) {
  size_t node = 0;
  while (tree[node].feature >= 0) {
    node = static_cast<size_t>(x(row, tree[node].feature) <= tree[node].threshold
                                   ? tree[node].left
                                   : tree[node].right);
  }
  return tree[node].value;
}

std::vector<double> RandomForest::PredictProba(const Matrix& x) const {
  std::vector<double> out(static_cast<size_t>(x.rows()), 0.0);
  for (const auto& tree : trees_) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      out[static_cast<size_t>(i)] += PredictTree(tree, x, i);
    }
  }
  for (auto& v : out) v /= static_cast<double>(trees_.size());
  return out;
}

}  // namespace vfl::features
