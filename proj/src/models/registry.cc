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

#include "vfl/models/registry.h"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>

#include "vfl/common/error.h"

namespace vfl::models {

Clock SystemClock() {
  return [] {
    const std::time_t now =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return std::string(buf);
  };
}

Clock LogicalClock() {
  auto counter = std::make_shared<int>(0);
  return [counter] {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "t%06d", ++*counter);
    return std::string(buf);
  };
}

void to_json(nlohmann::json& j, const ModelSummary& s) {
  j = nlohmann::json{{"model_id", s.model_id},
                     {"kind", ModelKindName(s.kind)},
                     {"timestamp", s.timestamp},
                     {"metrics", nullptr},
                     {"delta", nullptr},
                     {"iterations", s.iterations}};
  if (s.metrics) j["metrics"] = *s.metrics;
  if (s.delta) j["delta"] = *s.delta;
}

ModelRegistry::ModelRegistry(Clock clock) : clock_(std::move(clock)) {}

ModelRegistry ModelRegistry::Open(const std::filesystem::path& path, Clock clock) {
  ModelRegistry reg(std::move(clock));
  std::ifstream in(path);
  std::string line;
  size_t line_no = 0;
  while (in && std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      reg.entries_.push_back({j.get<ModelRecord>(), j.at("timestamp").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError,
                  "registry line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  // Keep the logical clock ahead of what is already on disk.
  for (size_t i = 0; i < reg.entries_.size(); ++i) reg.clock_();
  reg.path_ = path;
  return reg;
}

nlohmann::json ModelRegistry::Line(const ModelRecord& record, const std::string& timestamp) {
  nlohmann::json j = record;
  j["timestamp"] = timestamp;
  return j;
}

std::string ModelRegistry::Append(ModelRecord record) {
  std::lock_guard lock(*mu_);
  if (record.model_id.empty()) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s-%04zu", std::string(ModelKindName(record.kind)).c_str(),
                  entries_.size() + 1);
    record.model_id = buf;
  }
  for (const auto& e : entries_) {
    VFL_ENFORCE(e.record.model_id != record.model_id, ErrorCode::kConflict,
                "model id '" + record.model_id + "' already registered");
  }
  const std::string timestamp = clock_();
  if (path_) {
    std::ofstream out(*path_, std::ios::app);
    VFL_ENFORCE(out.good(), ErrorCode::kIoError, "cannot append to " + path_->string());
    out << Line(record, timestamp).dump() << '\n';
  }
  entries_.push_back({std::move(record), timestamp});
  return entries_.back().record.model_id;
}

std::string ModelRegistry::ToJsonLines() const {
  std::lock_guard lock(*mu_);
  std::string out;
  for (const auto& e : entries_) out += Line(e.record, e.timestamp).dump() + '\n';
  return out;
}

std::vector<ModelSummary> ModelRegistry::List() const {
  std::lock_guard lock(*mu_);
  std::vector<ModelSummary> out;
  std::optional<Metrics> last[2];
  for (const auto& e : entries_) {
    ModelSummary s;
    s.model_id = e.record.model_id;
    s.kind = e.record.kind;
    s.timestamp = e.timestamp;
    s.metrics = e.record.metrics;
    s.iterations = e.record.iteration_log.size();
    auto& prev = last[static_cast<int>(e.record.kind)];
    if (prev && s.metrics) {
      s.delta = Metrics{s.metrics->accuracy - prev->accuracy, s.metrics->loss - prev->loss,
                        s.metrics->ks - prev->ks, s.metrics->auc - prev->auc};
    }
    if (s.metrics) prev = s.metrics;
    out.push_back(std::move(s));
  }
  return out;
}

std::optional<ModelRecord> ModelRegistry::Get(const std::string& model_id) const {
  std::lock_guard lock(*mu_);
  for (const auto& e : entries_) {
    if (e.record.model_id == model_id) return e.record;
  }
  return std::nullopt;
}

std::vector<ModelRecord> ModelRegistry::Records() const {
  std::lock_guard lock(*mu_);
  std::vector<ModelRecord> out;
  for (const auto& e : entries_) out.push_back(e.record);
  return out;
}

}  // namespace vfl::models
