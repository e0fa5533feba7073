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

#include "vfl/models/model_record.h"

#include "vfl/common/error.h"

namespace vfl::models {

std::string_view ModelKindName(ModelKind kind) {
  return kind == ModelKind::kLocal ? "local" : "vfl";
}

ModelKind ParseModelKind(std::string_view name) {
  if (name == "local") return ModelKind::kLocal;
  if (name == "vfl") return ModelKind::kVfl;
  throw Error(ErrorCode::kInvalidArgument, "model kind must be local or vfl");
}

void to_json(nlohmann::json& j, const IterationRecord& r) {
  j = nlohmann::json{{"iteration", r.iteration},
                     {"loss", r.loss},
                     {"gradient_norm", r.gradient_norm},
                     {"wall_time_ms", r.wall_time_ms},
                     {"bytes_exchanged", r.bytes_exchanged}};
}

void from_json(const nlohmann::json& j, IterationRecord& r) {
  j.at("iteration").get_to(r.iteration);
  j.at("loss").get_to(r.loss);
  j.at("gradient_norm").get_to(r.gradient_norm);
  j.at("wall_time_ms").get_to(r.wall_time_ms);
  j.at("bytes_exchanged").get_to(r.bytes_exchanged);
}

void to_json(nlohmann::json& j, const ModelRecord& r) {
  j = nlohmann::json{{"model_id", r.model_id},
                     {"kind", ModelKindName(r.kind)},
                     {"host_features", r.host_features},
                     {"guest_features", r.guest_features},
                     {"weights", r.weights},
                     {"fit_intercept", r.fit_intercept},
                     {"guest_share_ref", r.guest_share_ref},
                     {"metrics", nullptr},
                     {"config", r.config},
                     {"iteration_log", r.iteration_log}};
  if (r.metrics) j["metrics"] = *r.metrics;
}

void from_json(const nlohmann::json& j, ModelRecord& r) {
  j.at("model_id").get_to(r.model_id);
  r.kind = ParseModelKind(j.at("kind").get<std::string>());
  j.at("host_features").get_to(r.host_features);
  j.at("guest_features").get_to(r.guest_features);
  j.at("weights").get_to(r.weights);
  j.at("fit_intercept").get_to(r.fit_intercept);
  j.at("guest_share_ref").get_to(r.guest_share_ref);
  if (j.at("metrics").is_null()) {
    r.metrics.reset();
  } else {
    r.metrics = j.at("metrics").get<Metrics>();
  }
  r.config = j.at("config");
  j.at("iteration_log").get_to(r.iteration_log);
}

}  // namespace vfl::models
