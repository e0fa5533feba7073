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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vfl/models/metrics.h"

namespace vfl::models {

enum class ModelKind { kLocal, kVfl };

std::string_view ModelKindName(ModelKind kind);
ModelKind ParseModelKind(std::string_view name);

struct IterationRecord {
  int iteration = 0;
  double loss = 0.0;
  double gradient_norm = 0.0;
  int64_t wall_time_ms = 0;
  int64_t bytes_exchanged = 0;
};

void to_json(nlohmann::json& j, const IterationRecord& r);
void from_json(const nlohmann::json& j, IterationRecord& r);

struct ModelRecord {
  std::string model_id;
  ModelKind kind = ModelKind::kLocal;
  std::vector<std::string> host_features;
  // Anonymous guest feature ids; empty for local models.
  std::vector<std::string> guest_features;
  // Local model: all weights. VFL model: the host's share only. The last
  // entry is the intercept when fit_intercept is set.
  std::vector<double> weights;
  bool fit_intercept = true;
  // Opaque handle to the guest's share, which stays with the guest.
  std::string guest_share_ref;
  std::optional<Metrics> metrics;
  nlohmann::json config = nlohmann::json::object();
  std::vector<IterationRecord> iteration_log;
};

void to_json(nlohmann::json& j, const ModelRecord& r);
void from_json(const nlohmann::json& j, ModelRecord& r);

}  // namespace vfl::models
