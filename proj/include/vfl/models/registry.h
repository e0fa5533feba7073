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
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "vfl/models/model_record.h"

namespace vfl::models {

// Produces the timestamp stored with each record.
using Clock = std::function<std::string()>;

// UTC wall clock, ISO 8601 with seconds.
Clock SystemClock();
// "t000001", "t000002", ... Runs that replay the same steps write identical
// registries.
Clock LogicalClock();

struct ModelSummary {
  std::string model_id;
  ModelKind kind = ModelKind::kLocal;
  std::string timestamp;
  std::optional<Metrics> metrics;
  // Metric change against the previous record of the same kind.
  std::optional<Metrics> delta;
  size_t iterations = 0;
};

void to_json(nlohmann::json& j, const ModelSummary& s);

// Append-only model history. Each append writes one JSON line when a file is
// attached.
class ModelRegistry {
 public:
  explicit ModelRegistry(Clock clock = LogicalClock());

  // Reads an existing JSON-lines file and keeps appending to it.
  static ModelRegistry Open(const std::filesystem::path& path, Clock clock = LogicalClock());

  // Assigns a model id when the record has none. Returns the id.
  std::string Append(ModelRecord record);
  std::vector<ModelSummary> List() const;
  std::optional<ModelRecord> Get(const std::string& model_id) const;
  std::vector<ModelRecord> Records() const;
  // Exactly the bytes an attached file would hold.
  std::string ToJsonLines() const;

  // The persisted line for one record, as written to disk.
  static nlohmann::json Line(const ModelRecord& record, const std::string& timestamp);

 private:
  struct Entry {
    ModelRecord record;
    std::string timestamp;
  };

  Clock clock_;
  std::optional<std::filesystem::path> path_;
  std::unique_ptr<std::mutex> mu_ = std::make_unique<std::mutex>();
  std::vector<Entry> entries_;
};

}  // namespace vfl::models
