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
#include <map>
#include <memory>
#include <functional>
#include <mutex>
#include <string>

#include <nlohmann/json.hpp>

#include "vfl/common/error.h"

namespace vfl::service {

using nlohmann::json;

struct WorkbenchOptions {
  // Relative host_path / guest_path values resolve against this directory.
  std::filesystem::path data_dir = ".";
  unsigned default_key_bits = 1024;
};

// 404 for unknown sessions and jobs, 409 for job conflicts, 422 otherwise.
int HttpStatus(ErrorCode code);

// Every endpoint of the service as a JSON-in, JSON-out call. The HTTP server
// and the CLI both drive this class, so a scripted API run and a CLI run over
// the same inputs execute identical code.
//
// Each mutating call is appended to the session's event log. A snapshot is
// that log plus the derived artifacts; reloading replays the log into a fresh
// session and compares the regenerated artifacts byte for byte.
class Workbench {
 public:
  explicit Workbench(WorkbenchOptions options = {});
  ~Workbench();
  Workbench(const Workbench&) = delete;
  Workbench& operator=(const Workbench&) = delete;

  json CreateSession();
  json LoadData(const std::string& sid, const json& body);
  // Importance matrix and external IV; computed on first access.
  json Features(const std::string& sid);
  json SetSelection(const std::string& sid, const json& body);
  // Starts the embed + cluster job. Returns {job_id}.
  json StartClusters(const std::string& sid, const json& body);
  json Clusters(const std::string& sid);
  json SetSampling(const std::string& sid, int cluster_id, const json& body);
  // Replaces the whole plan so the pool holds exactly body.target samples; a
  // null target drops the plan and trains on the full training split.
  json SampleToTarget(const std::string& sid, const json& body);
  // Starts a local or VFL training job. Returns {job_id}.
  json StartTraining(const std::string& sid, const json& body);
  json JobProgress(const std::string& sid, const std::string& job_id);
  json Models(const std::string& sid);
  json Route(const std::string& sid, const json& body);
  json PredictRouted(const std::string& sid);
  json EvaluateRouted(const std::string& sid);

  // Blocks until the session has no running job.
  void WaitIdle(const std::string& sid);

  // Artifact file name -> exact bytes.
  std::map<std::string, std::string> Artifacts(const std::string& sid);
  std::string RegistryJsonLines(const std::string& sid);
  json Snapshot(const std::string& sid, const std::filesystem::path& dir);
  // Throws kConflict when a regenerated artifact differs from the stored one.
  json Reload(const std::filesystem::path& dir);

 private:
  struct Session;
  struct Job;

  std::shared_ptr<Session> Find(const std::string& sid);
  json StartJob(const std::shared_ptr<Session>& s, const std::string& kind, const json& event,
                std::function<json(const std::shared_ptr<Job>&)> work);
  void Replay(const std::string& sid, const json& event);

  WorkbenchOptions options_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  size_t next_session_ = 1;
};

}  // namespace vfl::service
