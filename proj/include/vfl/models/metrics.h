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

#include <span>

#include <nlohmann/json_fwd.hpp>

namespace vfl::models {

struct Metrics {
  double accuracy = 0.0;
  double loss = 0.0;  // log-loss
  double ks = 0.0;
  double auc = 0.0;
};

// Accuracy at threshold 0.5 (a score of exactly 0.5 predicts 0), log-loss
// with scores clipped to [1e-12, 1 - 1e-12], rank-statistic AUC with tied
// ranks averaged, and KS as the largest gap between the class score CDFs.
// Throws kLengthMismatch, or kSingleClassLabels when AUC/KS are undefined.
Metrics Evaluate(std::span<const double> scores, std::span<const int> labels);

double Auc(std::span<const double> scores, std::span<const int> labels);
double KsStatistic(std::span<const double> scores, std::span<const int> labels);

inline int PredictLabel(double score) { return score > 0.5 ? 1 : 0; }

void to_json(nlohmann::json& j, const Metrics& m);
void from_json(const nlohmann::json& j, Metrics& m);

}  // namespace vfl::models
