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

#include "vfl/models/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <nlohmann/json.hpp>

#include "vfl/common/error.h"

namespace vfl::models {
namespace {

void CheckInputs(std::span<const double> scores, std::span<const int> labels,
                 bool need_both_classes) {
  VFL_ENFORCE(scores.size() == labels.size(), ErrorCode::kLengthMismatch,
              "scores and labels differ in length");
  VFL_ENFORCE(!scores.empty(), ErrorCode::kLengthMismatch, "no scores");
  size_t positives = 0;
  for (int y : labels) {
    VFL_ENFORCE(y == 0 || y == 1, ErrorCode::kInvalidArgument, "labels must be 0/1");
    positives += static_cast<size_t>(y);
  }
  if (need_both_classes) {
    VFL_ENFORCE(positives > 0 && positives < labels.size(),
                ErrorCode::kSingleClassLabels, "AUC/KS need both classes");
  }
}

}  // namespace

double Auc(std::span<const double> scores, std::span<const int> labels) {
  CheckInputs(scores, labels, true);
  const size_t n = scores.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  // Mann-Whitney U with average ranks for ties.
  double positive_rank_sum = 0.0;
  double positives = 0.0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + j) + 2.0) / 2.0;
    for (size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) {
        positive_rank_sum += avg_rank;
        positives += 1.0;
      }
    }
    i = j + 1;
  }
  const double negatives = static_cast<double>(n) - positives;
  return (positive_rank_sum - positives * (positives + 1.0) / 2.0) /
         (positives * negatives);
}

double KsStatistic(std::span<const double> scores, std::span<const int> labels) {
  CheckInputs(scores, labels, true);
  const size_t n = scores.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  double positives = 0;
  for (int y : labels) positives += y;
  const double negatives = static_cast<double>(n) - positives;
  double cdf_pos = 0.0;
  double cdf_neg = 0.0;
  double best = 0.0;
  size_t i = 0;
  while (i < n) {
    // Step over a whole group of tied scores before comparing.
    size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] == 1) {
        cdf_pos += 1.0 / positives;
      } else {
        cdf_neg += 1.0 / negatives;
      }
      ++j;
    }
    best = std::max(best, std::fabs(cdf_pos - cdf_neg));
    i = j;
  }
  return best;
}

Metrics Evaluate(std::span<const double> scores, std::span<const int> labels) {
  CheckInputs(scores, labels, true);
  Metrics m;
  double correct = 0.0;
  double loss = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    correct += PredictLabel(scores[i]) == labels[i] ? 1.0 : 0.0;
    const double p = std::clamp(scores[i], 1e-12, 1.0 - 1e-12);
    loss -= labels[i] == 1 ? std::log(p) : std::log(1.0 - p);
  }
  const auto n = static_cast<double>(scores.size());
  m.accuracy = correct / n;
  m.loss = loss / n;
  m.auc = Auc(scores, labels);
  m.ks = KsStatistic(scores, labels);
  return m;
}

void to_json(nlohmann::json& j, const Metrics& m) {
  j = nlohmann::json{{"accuracy", m.accuracy}, {"loss", m.loss}, {"ks", m.ks}, {"auc", m.auc}};
}

void from_json(const nlohmann::json& j, Metrics& m) {
  j.at("accuracy").get_to(m.accuracy);
  j.at("loss").get_to(m.loss);
  j.at("ks").get_to(m.ks);
  j.at("auc").get_to(m.auc);
}

}  // namespace vfl::models
