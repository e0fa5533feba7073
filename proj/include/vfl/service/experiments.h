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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vfl/service/workbench.h"

namespace vfl::service {

// One table row: the top local features by average importance, the top
// external features by IV, and the training-sample budget. nullopt = all.
struct ExperimentSpec {
  std::string name;
  std::string kind = "vfl";  // local | vfl
  std::optional<size_t> local_features;
  std::optional<size_t> external_features;
  std::optional<size_t> samples;
};

// Mirrors the API bodies: "data" is the POST .../data body, "clusters" the
// POST .../clusters body, "train_local" / "train_vfl" the POST .../train
// bodies without "kind".
struct ExperimentConfig {
  json data;
  json clusters = json::object();
  json train_local = json::object();
  json train_vfl = json::object();
  std::vector<ExperimentSpec> experiments;
};

ExperimentConfig ParseExperimentConfig(const json& j);
json ToJson(const ExperimentConfig& c);

// The five credit configurations over the raw columns: local-only with every
// local feature, VFL with everything, 9 of 14 local + all external, 9 of 14
// local + 6 of 9 external, and the last with 2100 sampled rows. Throws
// kDatasetMissing when the data cannot be located.
ExperimentConfig DefaultCreditConfig(const std::filesystem::path& data_dir);

struct ExperimentRow {
  std::string name;
  std::string kind;
  size_t local_features = 0;
  size_t external_features = 0;
  size_t samples = 0;
  std::string model_id;
  std::optional<double> auc;
  std::optional<double> accuracy;
  double seconds = 0.0;
};

struct ExperimentRun {
  std::string session_id;
  std::vector<ExperimentRow> rows;
};

// Runs every experiment in one session, in order. Throws the first job
// failure as the module error it carried.
ExperimentRun RunExperiments(Workbench& workbench, const ExperimentConfig& config);

// name,kind,local_features,external_features,samples,model_id,auc,acc,seconds
std::string RowsToCsv(const std::vector<ExperimentRow>& rows);

}  // namespace vfl::service
