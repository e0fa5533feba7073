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

#include <string>
#include <vector>

#include "vfl/common/matrix.h"
#include "vfl/models/model_record.h"
#include "vfl/party_data/party_table.h"

namespace vfl::models {

struct LocalTrainConfig {
  double learning_rate = 0.1;
  int max_iterations = 2000;
  double tolerance = 1e-5;
  bool fit_intercept = true;
  bool standardize = true;
};

// Mean log-loss of sigmoid(x w) and its exact gradient. `x` already holds the
// intercept column when there is one.
double LogLoss(const Matrix& x, const std::vector<int>& y, const Vector& w);
Vector LogLossGradient(const Matrix& x, const std::vector<int>& y, const Vector& w);

// Host-only logistic regression by full-batch gradient descent on the exact
// logistic loss. Weights start at zero, so training is deterministic.
class LocalModel {
 public:
  static LocalModel Fit(const party_data::PartyTable& host,
                        const std::vector<std::string>& features,
                        const std::vector<std::string>& train_ids,
                        const LocalTrainConfig& config,
                        std::vector<IterationRecord>* log = nullptr);
  // Rebuilds a model from a local ModelRecord.
  static LocalModel FromRecord(const ModelRecord& record);

  std::vector<double> Predict(const party_data::PartyTable& host,
                              const std::vector<std::string>& ids) const;

  const std::vector<std::string>& features() const { return features_; }
  const Vector& weights() const { return weights_; }
  const Standardizer& standardizer() const { return standardizer_; }
  bool fit_intercept() const { return fit_intercept_; }

 private:
  Matrix Design(const party_data::PartyTable& host, const std::vector<std::string>& ids) const;

  std::vector<std::string> features_;
  Standardizer standardizer_;
  Vector weights_;
  bool fit_intercept_ = true;
};

// Fits, evaluates on `validation_ids` (when non-empty) and packages a record.
// Throws kSingleClassLabels when the training labels hold one class.
ModelRecord TrainLocal(const party_data::PartyTable& host,
                       const std::vector<std::string>& features,
                       const std::vector<std::string>& train_ids,
                       const std::vector<std::string>& validation_ids,
                       const LocalTrainConfig& config);

}  // namespace vfl::models
