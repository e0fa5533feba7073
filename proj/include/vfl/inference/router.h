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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vfl/common/matrix.h"
#include "vfl/models/local_lr.h"
#include "vfl/party_data/party_table.h"
#include "vfl/protocol/session.h"

namespace vfl::inference {

struct TrainAnnotation {
  std::string id;
  int ground_truth = 0;
  int local_pred = 0;
  int vfl_pred = 0;
  int combo = 0;
};

void to_json(nlohmann::json& j, const TrainAnnotation& a);

// 4 * gt + 2 * local + vfl.
int ComboIndex(int ground_truth, int local_pred, int vfl_pred);

std::vector<TrainAnnotation> Annotate(const std::vector<std::string>& ids,
                                      const std::vector<int>& ground_truth,
                                      const std::vector<double>& local_scores,
                                      const std::vector<double>& vfl_scores);

// Scores every training id with both models. Throws kModelMissing when the
// VFL session has not been trained.
std::vector<TrainAnnotation> AnnotateTraining(const party_data::PartyTable& host,
                                              const std::vector<std::string>& train_ids,
                                              const models::LocalModel& local,
                                              protocol::VflSession& session);

enum class Decision { kTrustLocal, kSendToVfl };
std::string_view DecisionName(Decision d);

struct RoutingDecision {
  std::string id;
  int local_pred = 0;
  std::string nn_id;
  double distance = 0.0;
  Decision decision = Decision::kSendToVfl;
};

struct SankeyFlow {
  std::string from;
  std::string to;
  double weight = 0.0;
};

struct RoutingReport {
  std::vector<RoutingDecision> decisions;
  size_t trust_local = 0;
  size_t send_to_vfl = 0;
  std::vector<SankeyFlow> sankey;
};

void to_json(nlohmann::json& j, const RoutingReport& r);

// Core rule on prepared matrices. Rows of `train_z` align with
// `annotations`; distances are plain Euclidean on these rows, ties go to the
// lexicographically smallest training id. Throws kFeatureSpaceMismatch when
// the column counts differ.
RoutingReport RouteStandardized(const Matrix& train_z,
                                const std::vector<TrainAnnotation>& annotations,
                                const Matrix& pred_z, const std::vector<std::string>& pred_ids,
                                const std::vector<int>& pred_local);

// Standardizes the local model's host features on the annotated training
// rows, predicts locally, then applies RouteStandardized.
RoutingReport Route(const party_data::PartyTable& host, const std::vector<std::string>& pred_ids,
                    const std::vector<TrainAnnotation>& annotations,
                    const models::LocalModel& local);

// combo:c -> train:k -> pred:k' -> decision:d, weights = sample counts,
// sorted by (from, to). Throws kClusterModelMissing when an id has no
// cluster.
std::vector<SankeyFlow> SankeyFlows(const RoutingReport& report,
                                    const std::vector<TrainAnnotation>& annotations,
                                    const std::map<std::string, int>& train_cluster,
                                    const std::map<std::string, int>& pred_cluster);

struct RoutingEvaluation {
  std::optional<double> trust_local_agreement;
  std::optional<double> vfl_route_agreement;
  size_t trust_local_count = 0;
  size_t vfl_route_count = 0;
};

void to_json(nlohmann::json& j, const RoutingEvaluation& e);

// Agreement of the VFL prediction with the local one inside each subset;
// an empty subset leaves its value empty.
RoutingEvaluation EvaluateAgreement(const RoutingReport& report,
                                    const std::map<std::string, int>& vfl_pred);

// Runs the joint model over every prediction id, then EvaluateAgreement.
RoutingEvaluation EvaluateRouting(const RoutingReport& report, protocol::VflSession& session);

}  // namespace vfl::inference
