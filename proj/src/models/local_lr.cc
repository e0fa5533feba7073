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

#include "vfl/models/local_lr.h"

#include <chrono>
#include <cmath>

#include "vfl/common/error.h"
#include "vfl/models/metrics.h"

namespace vfl::models {
namespace {

Vector Sigmoid(const Vector& z) {
  Vector p(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) p(i) = 1.0 / (1.0 + std::exp(-z(i)));
  return p;
}

std::vector<size_t> RowsFor(const party_data::PartyTable& host,
                            const std::vector<std::string>& ids) {
  std::vector<size_t> rows;
  rows.reserve(ids.size());
  for (const auto& id : ids) {
    auto row = host.RowOf(id);
    VFL_ENFORCE(row.has_value(), ErrorCode::kInvalidArgument,
                "id '" + id + "' unknown to the host");
    rows.push_back(*row);
  }
  return rows;
}

std::vector<size_t> ColumnsFor(const party_data::PartyTable& host,
                               const std::vector<std::string>& features) {
  std::vector<size_t> cols;
  for (const auto& f : features) cols.push_back(host.ColumnOf(f));
  return cols;
}

std::vector<int> LabelsFor(const party_data::PartyTable& host, const std::vector<size_t>& rows) {
  VFL_ENFORCE(host.labels().has_value(), ErrorCode::kInvalidArgument, "host has no labels");
  std::vector<int> y;
  y.reserve(rows.size());
  for (size_t r : rows) y.push_back((*host.labels())[r]);
  return y;
}

}  // namespace

double LogLoss(const Matrix& x, const std::vector<int>& y, const Vector& w) {
  const Vector z = x * w;
  double total = 0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    // log(1 + e^{-s}) with s = +-z, evaluated without overflow.
    const double s = y[static_cast<size_t>(i)] ? z(i) : -z(i);
    total += s > 0 ? std::log1p(std::exp(-s)) : -s + std::log1p(std::exp(s));
  }
  return total / static_cast<double>(z.size());
}

Vector LogLossGradient(const Matrix& x, const std::vector<int>& y, const Vector& w) {
  Vector r = Sigmoid(x * w);
  for (Eigen::Index i = 0; i < r.size(); ++i) r(i) -= y[static_cast<size_t>(i)];
  return x.transpose() * r / static_cast<double>(r.size());
}

Matrix LocalModel::Design(const party_data::PartyTable& host,
                          const std::vector<std::string>& ids) const {
  Matrix x = SelectColumns(SelectRows(host.features(), RowsFor(host, ids)),
                           ColumnsFor(host, features_));
  if (standardizer_.mean.size() == x.cols()) x = standardizer_.Apply(x);
  if (fit_intercept_) {
    x.conservativeResize(Eigen::NoChange, x.cols() + 1);
    x.col(x.cols() - 1).setOnes();
  }
  return x;
}

LocalModel LocalModel::Fit(const party_data::PartyTable& host,
                           const std::vector<std::string>& features,
                           const std::vector<std::string>& train_ids,
                           const LocalTrainConfig& config, std::vector<IterationRecord>* log) {
  VFL_ENFORCE(config.learning_rate > 0, ErrorCode::kInvalidArgument,
              "learning_rate must be positive");
  VFL_ENFORCE(config.max_iterations >= 0, ErrorCode::kInvalidArgument,
              "max_iterations must be non-negative");
  const auto rows = RowsFor(host, train_ids);
  const auto y = LabelsFor(host, rows);
  VFL_ENFORCE(!y.empty(), ErrorCode::kInvalidArgument, "no training ids");
  size_t positives = 0;
  for (int v : y) positives += static_cast<size_t>(v);
  VFL_ENFORCE(positives > 0 && positives < y.size(), ErrorCode::kSingleClassLabels,
              "training labels hold a single class");

  LocalModel model;
  model.features_ = features;
  model.fit_intercept_ = config.fit_intercept;
  if (config.standardize) {
    model.standardizer_ = Standardizer::Fit(
        SelectColumns(SelectRows(host.features(), rows), ColumnsFor(host, features)));
  }
  const Matrix x = model.Design(host, train_ids);
  model.weights_ = Vector::Zero(x.cols());
  for (int it = 0; it < config.max_iterations; ++it) {
    const auto start = std::chrono::steady_clock::now();
    const Vector g = LogLossGradient(x, y, model.weights_);
    const double loss = LogLoss(x, y, model.weights_);
    model.weights_ -= config.learning_rate * g;
    VFL_ENFORCE(model.weights_.allFinite() && std::isfinite(loss), ErrorCode::kDivergedLoss,
                "local training diverged");
    const double norm = g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
    if (log) {
      const auto elapsed = std::chrono::steady_clock::now() - start;
      log->push_back({it, loss, norm,
                      std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count(), 0});
    }
    if (norm < config.tolerance) break;
  }
  return model;
}

LocalModel LocalModel::FromRecord(const ModelRecord& record) {
  VFL_ENFORCE(record.kind == ModelKind::kLocal, ErrorCode::kInvalidArgument,
              "not a local model record");
  LocalModel model;
  model.features_ = record.host_features;
  model.fit_intercept_ = record.fit_intercept;
  model.weights_ = FromStdVector(record.weights);
  const auto& std_json = record.config.value("standardizer", nlohmann::json());
  if (!std_json.is_null()) {
    model.standardizer_.mean = FromStdVector(std_json.at("mean").get<std::vector<double>>());
    model.standardizer_.scale = FromStdVector(std_json.at("scale").get<std::vector<double>>());
  }
  return model;
}

std::vector<double> LocalModel::Predict(const party_data::PartyTable& host,
                                        const std::vector<std::string>& ids) const {
  if (ids.empty()) return {};
  const Matrix x = Design(host, ids);
  VFL_ENFORCE(x.cols() == weights_.size(), ErrorCode::kFeatureSpaceMismatch,
              "model and table feature spaces differ");
  return ToStdVector(Sigmoid(x * weights_));
}

ModelRecord TrainLocal(const party_data::PartyTable& host,
                       const std::vector<std::string>& features,
                       const std::vector<std::string>& train_ids,
                       const std::vector<std::string>& validation_ids,
                       const LocalTrainConfig& config) {
  ModelRecord record;
  record.kind = ModelKind::kLocal;
  const LocalModel model = LocalModel::Fit(host, features, train_ids, config,
                                           &record.iteration_log);
  record.host_features = features;
  record.weights = ToStdVector(model.weights());
  record.fit_intercept = config.fit_intercept;
  record.config = {{"learning_rate", config.learning_rate},
                   {"max_iterations", config.max_iterations},
                   {"tolerance", config.tolerance},
                   {"standardize", config.standardize},
                   {"training_rows", train_ids.size()},
                   {"standardizer", nullptr}};
  if (config.standardize) {
    record.config["standardizer"] = {{"mean", ToStdVector(model.standardizer().mean)},
                                     {"scale", ToStdVector(model.standardizer().scale)}};
  }
  if (!validation_ids.empty()) {
    const auto scores = model.Predict(host, validation_ids);
    std::vector<int> labels;
    for (const auto& id : validation_ids) labels.push_back((*host.labels())[*host.RowOf(id)]);
    record.metrics = Evaluate(scores, labels);
  }
  return record;
}

}  // namespace vfl::models
