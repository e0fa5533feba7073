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

#include "vfl/inference/router.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include <nlohmann/json.hpp>

#include "vfl/common/error.h"
#include "vfl/models/metrics.h"

namespace vfl::inference {

int ComboIndex(int ground_truth, int local_pred, int vfl_pred) {
  VFL_ENFORCE((ground_truth | local_pred | vfl_pred) <= 1 && ground_truth >= 0 &&
                  local_pred >= 0 && vfl_pred >= 0,
              ErrorCode::kInvalidArgument, "combo inputs must be 0/1");
  return 4 * ground_truth + 2 * local_pred + vfl_pred;
}

std::vector<TrainAnnotation> Annotate(const std::vector<std::string>& ids,
                                      const std::vector<int>& ground_truth,
                                      const std::vector<double>& local_scores,
                                      const std::vector<double>& vfl_scores) {
  VFL_ENFORCE(ids.size() == ground_truth.size() && ids.size() == local_scores.size() &&
                  ids.size() == vfl_scores.size(),
              ErrorCode::kLengthMismatch, "annotation inputs differ in length");
  std::vector<TrainAnnotation> out;
  out.reserve(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) {
    TrainAnnotation a;
    a.id = ids[i];
    a.ground_truth = ground_truth[i];
    a.local_pred = models::PredictLabel(local_scores[i]);
    a.vfl_pred = models::PredictLabel(vfl_scores[i]);
    a.combo = ComboIndex(a.ground_truth, a.local_pred, a.vfl_pred);
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<TrainAnnotation> AnnotateTraining(const party_data::PartyTable& host,
                                              const std::vector<std::string>& train_ids,
                                              const models::LocalModel& local,
                                              protocol::VflSession& session) {
  VFL_ENFORCE(local.weights().size() > 0, ErrorCode::kModelMissing, "local model is missing");
  VFL_ENFORCE(session.training_prepared(), ErrorCode::kModelMissing, "VFL model is missing");
  VFL_ENFORCE(host.labels().has_value(), ErrorCode::kInvalidArgument, "host has no labels");
  std::vector<int> gt;
  for (const auto& id : train_ids) {
    auto row = host.RowOf(id);
    VFL_ENFORCE(row.has_value(), ErrorCode::kInvalidArgument, "training id unknown to the host");
    gt.push_back((*host.labels())[*row]);
  }
  return Annotate(train_ids, gt, local.Predict(host, train_ids),
                  protocol::PredictJoint(session, train_ids));
}

std::string_view DecisionName(Decision d) {
  return d == Decision::kTrustLocal ? "trust_local" : "send_to_vfl";
}

RoutingReport RouteStandardized(const Matrix& train_z,
                                const std::vector<TrainAnnotation>& annotations,
                                const Matrix& pred_z, const std::vector<std::string>& pred_ids,
                                const std::vector<int>& pred_local) {
  VFL_ENFORCE(!annotations.empty(), ErrorCode::kInvalidArgument, "no training annotations");
  VFL_ENFORCE(static_cast<size_t>(train_z.rows()) == annotations.size(),
              ErrorCode::kLengthMismatch, "one training row per annotation");
  VFL_ENFORCE(static_cast<size_t>(pred_z.rows()) == pred_ids.size() &&
                  pred_ids.size() == pred_local.size(),
              ErrorCode::kLengthMismatch, "prediction inputs differ in length");
  VFL_ENFORCE(train_z.cols() == pred_z.cols(), ErrorCode::kFeatureSpaceMismatch,
              "training and prediction feature spaces differ");
  RoutingReport report;
  report.decisions.reserve(pred_ids.size());
  for (Eigen::Index p = 0; p < pred_z.rows(); ++p) {
    size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < train_z.rows(); ++t) {
      const double d2 = (pred_z.row(p) - train_z.row(t)).squaredNorm();
      const auto ti = static_cast<size_t>(t);
      if (d2 < best_d2 || (d2 == best_d2 && annotations[ti].id < annotations[best].id)) {
        best_d2 = d2;
        best = ti;
      }
    }
    const auto& nn = annotations[best];
    RoutingDecision d;
    d.id = pred_ids[static_cast<size_t>(p)];
    d.local_pred = pred_local[static_cast<size_t>(p)];
    d.nn_id = nn.id;
    d.distance = std::sqrt(best_d2);
    const bool agree = nn.ground_truth == nn.local_pred && nn.local_pred == nn.vfl_pred &&
                       nn.vfl_pred == d.local_pred;
    d.decision = agree ? Decision::kTrustLocal : Decision::kSendToVfl;
    ++(agree ? report.trust_local : report.send_to_vfl);
    report.decisions.push_back(std::move(d));
  }
  return report;
}

RoutingReport Route(const party_data::PartyTable& host, const std::vector<std::string>& pred_ids,
                    const std::vector<TrainAnnotation>& input_annotations,
                    const models::LocalModel& local) {
  // Id order makes the fitted scaler, and so every distance, independent of
  // how the caller ordered the training set.
  std::vector<TrainAnnotation> annotations = input_annotations;
  std::sort(annotations.begin(), annotations.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  std::vector<size_t> cols;
  for (const auto& f : local.features()) {
    const auto& names = host.feature_names();
    auto it = std::find(names.begin(), names.end(), f);
    VFL_ENFORCE(it != names.end(), ErrorCode::kFeatureSpaceMismatch,
                "host table lacks model feature '" + f + "'");
    cols.push_back(static_cast<size_t>(it - names.begin()));
  }
  auto rows_of = [&](const auto& ids) {
    std::vector<size_t> rows;
    for (const auto& id : ids) {
      auto row = host.RowOf(id);
      VFL_ENFORCE(row.has_value(), ErrorCode::kInvalidArgument, "id unknown to the host");
      rows.push_back(*row);
    }
    return rows;
  };
  std::vector<std::string> train_ids;
  for (const auto& a : annotations) train_ids.push_back(a.id);
  const Matrix train_raw = SelectColumns(SelectRows(host.features(), rows_of(train_ids)), cols);
  const Matrix pred_raw = SelectColumns(SelectRows(host.features(), rows_of(pred_ids)), cols);
  const Standardizer z = Standardizer::Fit(train_raw);
  std::vector<int> pred_local;
  for (double s : local.Predict(host, pred_ids)) pred_local.push_back(models::PredictLabel(s));
  return RouteStandardized(z.Apply(train_raw), annotations, z.Apply(pred_raw), pred_ids,
                           pred_local);
}

std::vector<SankeyFlow> SankeyFlows(const RoutingReport& report,
                                    const std::vector<TrainAnnotation>& annotations,
                                    const std::map<std::string, int>& train_cluster,
                                    const std::map<std::string, int>& pred_cluster) {
  VFL_ENFORCE(!train_cluster.empty() && !pred_cluster.empty(), ErrorCode::kClusterModelMissing,
              "cluster models are required for the flow view");
  std::map<std::string, int> combo_of;
  for (const auto& a : annotations) combo_of[a.id] = a.combo;
  std::map<std::pair<std::string, std::string>, double> weights;
  for (const auto& d : report.decisions) {
    auto tc = train_cluster.find(d.nn_id);
    auto pc = pred_cluster.find(d.id);
    VFL_ENFORCE(tc != train_cluster.end() && pc != pred_cluster.end(),
                ErrorCode::kClusterModelMissing, "sample without a cluster");
    const std::string combo = "combo:" + std::to_string(combo_of.at(d.nn_id));
    const std::string train = "train:" + std::to_string(tc->second);
    const std::string pred = "pred:" + std::to_string(pc->second);
    const std::string decision = "decision:" + std::string(DecisionName(d.decision));
    weights[{combo, train}] += 1;
    weights[{train, pred}] += 1;
    weights[{pred, decision}] += 1;
  }
  std::vector<SankeyFlow> flows;
  for (const auto& [key, w] : weights) flows.push_back({key.first, key.second, w});
  return flows;
}

void to_json(nlohmann::json& j, const TrainAnnotation& a) {
  j = nlohmann::json{{"id", a.id},
                     {"ground_truth", a.ground_truth},
                     {"local_pred", a.local_pred},
                     {"vfl_pred", a.vfl_pred},
                     {"combo", a.combo}};
}

void to_json(nlohmann::json& j, const RoutingReport& r) {
  nlohmann::json decisions = nlohmann::json::array();
  for (const auto& d : r.decisions) {
    decisions.push_back({{"id", d.id},
                         {"local_pred", d.local_pred},
                         {"nn_id", d.nn_id},
                         {"distance", d.distance},
                         {"decision", DecisionName(d.decision)}});
  }
  nlohmann::json sankey = nlohmann::json::array();
  for (const auto& f : r.sankey) {
    sankey.push_back({{"from", f.from}, {"to", f.to}, {"weight", f.weight}});
  }
  j = nlohmann::json{{"decisions", decisions},
                     {"summary", {{"trust_local", r.trust_local}, {"send_to_vfl", r.send_to_vfl}}},
                     {"sankey", sankey}};
}

void to_json(nlohmann::json& j, const RoutingEvaluation& e) {
  j = nlohmann::json{{"trust_local_agreement", nullptr},
                     {"vfl_route_agreement", nullptr},
                     {"trust_local_count", e.trust_local_count},
                     {"vfl_route_count", e.vfl_route_count}};
  if (e.trust_local_agreement) j["trust_local_agreement"] = *e.trust_local_agreement;
  if (e.vfl_route_agreement) j["vfl_route_agreement"] = *e.vfl_route_agreement;
}

RoutingEvaluation EvaluateAgreement(const RoutingReport& report,
                                    const std::map<std::string, int>& vfl_pred) {
  size_t agree[2] = {0, 0};
  size_t count[2] = {0, 0};
  for (const auto& d : report.decisions) {
    auto it = vfl_pred.find(d.id);
    VFL_ENFORCE(it != vfl_pred.end(), ErrorCode::kInvalidArgument,
                "no VFL prediction for '" + d.id + "'");
    const int k = d.decision == Decision::kTrustLocal ? 0 : 1;
    ++count[k];
    agree[k] += it->second == d.local_pred;
  }
  RoutingEvaluation e;
  e.trust_local_count = count[0];
  e.vfl_route_count = count[1];
  if (count[0]) e.trust_local_agreement = static_cast<double>(agree[0]) / static_cast<double>(count[0]);
  if (count[1]) e.vfl_route_agreement = static_cast<double>(agree[1]) / static_cast<double>(count[1]);
  return e;
}

RoutingEvaluation EvaluateRouting(const RoutingReport& report, protocol::VflSession& session) {
  std::vector<std::string> ids;
  for (const auto& d : report.decisions) ids.push_back(d.id);
  const auto scores = protocol::PredictJoint(session, ids);
  std::map<std::string, int> vfl_pred;
  for (size_t i = 0; i < ids.size(); ++i) vfl_pred[ids[i]] = models::PredictLabel(scores[i]);
  return EvaluateAgreement(report, vfl_pred);
}

}  // namespace vfl::inference
