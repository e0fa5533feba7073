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

#include "vfl/samples/cluster_model.h"

#include <algorithm>
#include <numeric>
#include <cmath>

#include <nlohmann/json.hpp>

#include "vfl/common/error.h"
#include "vfl/samples/kmeans.h"

namespace vfl::samples {

double Wasserstein1D(std::vector<double> a, std::vector<double> b) {
  VFL_ENFORCE(!a.empty() && !b.empty(), ErrorCode::kInvalidArgument,
              "Wasserstein distance needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<double> all(a);
  all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double total = 0;
  size_t ia = 0, ib = 0;
  for (size_t k = 0; k + 1 < all.size(); ++k) {
    const double x = all[k];
    while (ia < a.size() && a[ia] <= x) ++ia;
    while (ib < b.size() && b[ib] <= x) ++ib;
    total += std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb) *
             (all[k + 1] - x);
  }
  return total;
}

std::vector<std::vector<std::vector<size_t>>> ClusterModel::RingMembers() const {
  std::vector<std::vector<std::vector<size_t>>> out;
  for (const auto& c : clusters) out.push_back(c.rings);
  return out;
}

ClusterModel BuildClusterModel(const Matrix& coords, const Matrix& features,
                               const std::vector<int>& labels, int k, uint64_t seed,
                               const RingSpec& ring_spec) {
  VFL_ENFORCE(coords.cols() == 2, ErrorCode::kInvalidArgument, "coords must be n x 2");
  VFL_ENFORCE(features.rows() == coords.rows() &&
                  (labels.empty() || labels.size() == static_cast<size_t>(coords.rows())),
              ErrorCode::kLengthMismatch, "coords, features and labels must align");
  ring_spec.Validate();
  const KMeansResult km = KMeans(coords, k, seed);

  ClusterModel model;
  model.k = k;
  model.seed = seed;
  model.wcss = km.wcss;
  model.ring_spec = ring_spec;
  model.assignment = km.assignment;
  model.centroids = km.centroids;
  model.clusters.resize(static_cast<size_t>(k));
  for (int c = 0; c < k; ++c) {
    auto& info = model.clusters[static_cast<size_t>(c)];
    info.id = c;
    info.centroid = km.centroids.row(c).transpose();
    info.rings.assign(static_cast<size_t>(ring_spec.n_rings), {});
  }
  for (size_t i = 0; i < km.assignment.size(); ++i) {
    auto& info = model.clusters[static_cast<size_t>(km.assignment[i])];
    info.members.push_back(i);
    if (!labels.empty()) ++info.label_hist[labels[i]];
  }

  std::vector<std::vector<double>> global(static_cast<size_t>(features.cols()));
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
      global[static_cast<size_t>(j)].push_back(features(i, j));
    }
  }
  for (auto& info : model.clusters) {
    info.member_rings = RingPartition(coords, info.members, info.centroid, ring_spec);
    for (size_t m = 0; m < info.members.size(); ++m) {
      info.rings[static_cast<size_t>(info.member_rings[m])].push_back(info.members[m]);
    }
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      std::vector<double> local;
      for (size_t row : info.members) local.push_back(features(static_cast<Eigen::Index>(row), j));
      info.emd_profile.push_back(
          local.empty() ? 0.0 : Wasserstein1D(local, global[static_cast<size_t>(j)]));
    }
  }
  return model;
}

nlohmann::json ClusterModelToJson(const ClusterModel& model, const std::vector<std::string>& ids,
                                  const std::vector<std::string>& feature_names) {
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& info : model.clusters) {
    nlohmann::json hist = nlohmann::json::object();
    for (const auto& [label, count] : info.label_hist) hist[std::to_string(label)] = count;
    nlohmann::json rings = nlohmann::json::object();
    for (size_t r = 0; r < info.rings.size(); ++r) {
      nlohmann::json members = nlohmann::json::array();
      for (size_t row : info.rings[r]) members.push_back(ids.at(row));
      rings[std::to_string(r)] = members;
    }
    clusters.push_back({{"id", info.id},
                        {"size", info.members.size()},
                        {"centroid", {info.centroid(0), info.centroid(1)}},
                        {"label_hist", hist},
                        {"emd_profile", info.emd_profile},
                        {"rings", rings}});
  }
  return {{"k", model.k},
          {"seed", model.seed},
          {"wcss", model.wcss},
          {"ring_spec", model.ring_spec},
          {"feature_names", feature_names},
          {"clusters", clusters}};
}

SamplePlan PlanForTarget(const ClusterModel& model, size_t target, uint64_t seed) {
  const size_t total = model.assignment.size();
  VFL_ENFORCE(target <= total, ErrorCode::kInvalidArgument, "target exceeds the population");
  struct Cell {
    int cluster;
    int ring;
    size_t size;
    size_t take;
    double remainder;
  };
  std::vector<Cell> cells;
  size_t taken = 0;
  for (const auto& c : model.clusters) {
    for (size_t i = 0; i < c.rings.size(); ++i) {
      const size_t n = c.rings[i].size();
      const double exact = static_cast<double>(n) * static_cast<double>(target) /
                           static_cast<double>(total);
      const auto take = static_cast<size_t>(std::floor(exact));
      cells.push_back({c.id, static_cast<int>(i), n, take, exact - static_cast<double>(take)});
      taken += take;
    }
  }
  std::vector<size_t> order(cells.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return cells[a].remainder > cells[b].remainder;
  });
  for (size_t i = 0; taken < target && i < order.size(); ++i) {
    auto& cell = cells[order[i]];
    if (cell.take < cell.size) {
      ++cell.take;
      ++taken;
    }
  }
  SamplePlan plan;
  plan.seed = seed;
  for (const auto& c : model.clusters) {
    plan.rates[c.id] = std::vector<double>(static_cast<size_t>(model.ring_spec.n_rings), 0.0);
  }
  for (const auto& cell : cells) {
    plan.rates[cell.cluster][static_cast<size_t>(cell.ring)] =
        cell.size == 0 ? 0.0 : static_cast<double>(cell.take) / static_cast<double>(cell.size);
  }
  return plan;
}

}  // namespace vfl::samples
