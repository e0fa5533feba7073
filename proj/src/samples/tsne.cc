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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "vfl/common/error.h"
#include "vfl/common/random.h"
#include "vfl/samples/embedding.h"

namespace vfl::samples {
namespace {

// Symmetric sparse affinities in CSR form.
struct SparseP {
  std::vector<size_t> row_start;
  std::vector<size_t> col;
  std::vector<double> val;
};

SparseP InputAffinities(const Matrix& x, double perplexity) {
  const auto n = static_cast<size_t>(x.rows());
  const size_t k = std::min(n - 1, static_cast<size_t>(3.0 * perplexity));
  const double target = std::log(std::min(perplexity, static_cast<double>(k)));

  std::vector<std::vector<std::pair<size_t, double>>> cond(n);
  std::vector<std::pair<double, size_t>> dist(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      dist[j] = {(x.row(static_cast<Eigen::Index>(i)) - x.row(static_cast<Eigen::Index>(j)))
                     .squaredNorm(),
                 j};
    }
    dist[i].first = std::numeric_limits<double>::infinity();
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());

    // Binary search on the precision beta for the target entropy.
    double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
    std::vector<double> p(k);
    for (int step = 0; step < 200; ++step) {
      double sum = 0;
      for (size_t m = 0; m < k; ++m) {
        p[m] = std::exp(-beta * (dist[m].first - dist[0].first));
        sum += p[m];
      }
      double entropy = 0;
      for (size_t m = 0; m < k; ++m) {
        p[m] /= sum;
        if (p[m] > 1e-300) entropy -= p[m] * std::log(p[m]);
      }
      if (std::abs(entropy - target) < 1e-5) break;
      if (entropy > target) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
    for (size_t m = 0; m < k; ++m) cond[i].push_back({dist[m].second, p[m]});
  }

  // P = (P_cond + P_cond^T) / (2n)
  std::vector<std::vector<std::pair<size_t, double>>> sym(n);
  for (size_t i = 0; i < n; ++i) {
    for (auto [j, v] : cond[i]) {
      sym[i].push_back({j, v});
      sym[j].push_back({i, v});
    }
  }
  SparseP out;
  out.row_start.push_back(0);
  for (size_t i = 0; i < n; ++i) {
    auto& row = sym[i];
    std::sort(row.begin(), row.end());
    for (size_t m = 0; m < row.size();) {
      size_t j = row[m].first;
      double v = 0;
      for (; m < row.size() && row[m].first == j; ++m) v += row[m].second;
      out.col.push_back(j);
      out.val.push_back(v / (2.0 * static_cast<double>(n)));
    }
    out.row_start.push_back(out.col.size());
  }
  return out;
}

class QuadTree {
 public:
  explicit QuadTree(const Matrix& y) : y_(y) {
    double min_x = y.col(0).minCoeff(), max_x = y.col(0).maxCoeff();
    double min_y = y.col(1).minCoeff(), max_y = y.col(1).maxCoeff();
    const double half = std::max({max_x - min_x, max_y - min_y, 1e-9}) * 0.5 + 1e-5;
    nodes_.push_back(Node{0.5 * (min_x + max_x), 0.5 * (min_y + max_y), half});
    for (Eigen::Index i = 0; i < y.rows(); ++i) Insert(0, i, 0);
  }

  // Adds sum over other points of q^2 (y_i - y_j) to `force` and returns the
  // sum of q including the self term q = 1.
  double Repulsion(Eigen::Index i, double theta, double force[2]) const {
    return Visit(0, i, theta * theta, force);
  }

 private:
  struct Node {
    double cx, cy, half;
    double com_x = 0, com_y = 0;
    int count = 0;
    int children = -1;  // index of the first of four children
    Eigen::Index point = -1;
  };

  static constexpr int kMaxDepth = 48;

  int Quadrant(const Node& node, double px, double py) const {
    return (px > node.cx ? 1 : 0) + (py > node.cy ? 2 : 0);
  }

  void Split(size_t idx) {
    const Node parent = nodes_[idx];
    const double h = parent.half * 0.5;
    nodes_[idx].children = static_cast<int>(nodes_.size());
    for (int q = 0; q < 4; ++q) {
      nodes_.push_back(Node{parent.cx + ((q & 1) ? h : -h), parent.cy + ((q & 2) ? h : -h), h});
    }
  }

  void Insert(size_t idx, Eigen::Index i, int depth) {
    const double px = y_(i, 0), py = y_(i, 1);
    for (;;) {
      Node& node = nodes_[idx];
      node.com_x = (node.com_x * node.count + px) / (node.count + 1);
      node.com_y = (node.com_y * node.count + py) / (node.count + 1);
      ++node.count;
      if (node.count == 1) {
        node.point = i;
        return;
      }
      if (node.children < 0) {
        // Coincident points at the depth cap simply pile up in the leaf.
        if (depth >= kMaxDepth) return;
        const Eigen::Index prev = node.point;
        nodes_[idx].point = -1;
        Split(idx);
        if (prev >= 0) {
          const Node& n2 = nodes_[idx];
          const size_t child =
              static_cast<size_t>(n2.children + Quadrant(n2, y_(prev, 0), y_(prev, 1)));
          Node& c = nodes_[child];
          c.com_x = y_(prev, 0);
          c.com_y = y_(prev, 1);
          c.count = 1;
          c.point = prev;
        }
      }
      const Node& cur = nodes_[idx];
      idx = static_cast<size_t>(cur.children + Quadrant(cur, px, py));
      ++depth;
    }
  }

  double Visit(size_t idx, Eigen::Index i, double theta2, double force[2]) const {
    const Node& node = nodes_[idx];
    if (node.count == 0) return 0.0;
    const double dx = y_(i, 0) - node.com_x;
    const double dy = y_(i, 1) - node.com_y;
    const double d2 = dx * dx + dy * dy;
    const double width = 2.0 * node.half;
    if (node.children < 0 || width * width < theta2 * d2) {
      const double q = 1.0 / (1.0 + d2);
      const double mult = node.count * q;
      force[0] += mult * q * dx;
      force[1] += mult * q * dy;
      return mult;
    }
    double sum = 0;
    for (int c = 0; c < 4; ++c) sum += Visit(static_cast<size_t>(node.children + c), i, theta2, force);
    return sum;
  }

  const Matrix& y_;
  std::vector<Node> nodes_;
};

}  // namespace

Matrix BarnesHutTsne(const Matrix& x, uint64_t seed, const TsneOptions& options) {
  const auto n = static_cast<size_t>(x.rows());
  VFL_ENFORCE(n >= 3, ErrorCode::kTooFewRows, "t-SNE needs at least 3 rows");
  VFL_ENFORCE(options.perplexity > 0 && options.iterations >= 0, ErrorCode::kInvalidArgument,
              "bad t-SNE options");
  const SparseP p = InputAffinities(x, options.perplexity);

  Rng rng(seed);
  Matrix y(n, 2);
  for (size_t i = 0; i < n; ++i) {
    y(static_cast<Eigen::Index>(i), 0) = 1e-2 * StandardNormal(rng);
    y(static_cast<Eigen::Index>(i), 1) = 1e-2 * StandardNormal(rng);
  }
  Matrix velocity = Matrix::Zero(n, 2);
  Matrix gains = Matrix::Ones(n, 2);
  Matrix grad(n, 2);
  Matrix attract(n, 2);
  Matrix repulse(n, 2);

  for (int it = 0; it < options.iterations; ++it) {
    const double exaggeration =
        it < options.exaggeration_iterations ? options.early_exaggeration : 1.0;
    const double momentum = it < options.exaggeration_iterations ? 0.5 : 0.8;

    attract.setZero();
    for (size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      for (size_t m = p.row_start[i]; m < p.row_start[i + 1]; ++m) {
        const auto j = static_cast<Eigen::Index>(p.col[m]);
        const double dx = y(ii, 0) - y(j, 0);
        const double dy = y(ii, 1) - y(j, 1);
        const double q = 1.0 / (1.0 + dx * dx + dy * dy);
        attract(ii, 0) += p.val[m] * q * dx;
        attract(ii, 1) += p.val[m] * q * dy;
      }
    }
    QuadTree tree(y);
    double sum_q = 0;
    for (size_t i = 0; i < n; ++i) {
      double f[2] = {0, 0};
      sum_q += tree.Repulsion(static_cast<Eigen::Index>(i), options.theta, f) - 1.0;
      repulse(static_cast<Eigen::Index>(i), 0) = f[0];
      repulse(static_cast<Eigen::Index>(i), 1) = f[1];
    }
    sum_q = std::max(sum_q, 1e-300);
    grad = 4.0 * (exaggeration * attract - repulse / sum_q);

    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      for (Eigen::Index c = 0; c < 2; ++c) {
        const bool same_sign = (grad(i, c) > 0) == (velocity(i, c) > 0);
        gains(i, c) = same_sign ? std::max(gains(i, c) * 0.8, 0.01) : gains(i, c) + 0.2;
        velocity(i, c) = momentum * velocity(i, c) - options.learning_rate * gains(i, c) * grad(i, c);
        y(i, c) += velocity(i, c);
      }
    }
    y = y.rowwise() - y.colwise().mean();
    VFL_ENFORCE(y.allFinite(), ErrorCode::kDivergedLoss, "t-SNE diverged");
  }
  return y;
}

}  // namespace vfl::samples
