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

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "vfl/models/metrics.h"
#include "vfl/models/model_record.h"
#include "vfl/protocol/parties.h"
#include "vfl/protocol/transport.h"

namespace vfl::protocol {

// Three parties wired to one transport. Every protocol phase runs each party
// on its own thread; the parties only talk through the transport.
class VflSession {
 public:
  // Uses an in-memory loopback when `transport` is null.
  VflSession(std::shared_ptr<const party_data::PartyTable> host_table,
             std::shared_ptr<const party_data::PartyTable> guest_table, std::string salt,
             ProtocolConfig config, std::unique_ptr<Transport> transport = nullptr);
  ~VflSession();

  VflSession(const VflSession&) = delete;
  VflSession& operator=(const VflSession&) = delete;

  GuestParty& guest() { return guest_; }
  HostParty& host() { return host_; }
  Collaborator& collaborator() { return collaborator_; }
  const GuestParty& guest() const { return guest_; }
  const HostParty& host() const { return host_; }
  const Collaborator& collaborator() const { return collaborator_; }
  MessageLog& log() { return log_; }
  const ProtocolConfig& config() const { return config_; }

  void DistributeKeys();
  // Throws kGuestMissingIds when the guest cannot serve every id.
  void PrepareTraining(const std::vector<std::string>& train_ids);
  bool training_prepared() const { return host_.training_rows() > 0; }

  // One full gradient step of both parties.
  models::IterationRecord RunIteration(double learning_rate);
  int iterations_run() const { return next_iteration_; }

  std::vector<double> Predict(const std::vector<std::string>& ids);

 private:
  void RunParties(const std::function<void(Endpoint&)>& guest_fn,
                  const std::function<void(Endpoint&)>& host_fn,
                  const std::function<void(Endpoint&)>& collaborator_fn);

  ProtocolConfig config_;
  std::unique_ptr<Transport> transport_;
  MessageLog log_;
  GuestParty guest_;
  HostParty host_;
  Collaborator collaborator_;
  int next_iteration_ = 0;
  bool broken_ = false;
};

struct TrainConfig {
  double learning_rate = 0.1;
  int max_iterations = 2000;
  // Stops once the largest gradient entry across both parties falls below.
  double tolerance = 1e-5;
  std::function<void(const models::IterationRecord&)> on_iteration;
  // Checked between iterations.
  std::function<bool()> cancelled;
};

// Runs keys/ids setup if it has not happened yet, then trains.
models::ModelRecord TrainVfl(VflSession& session, const std::vector<std::string>& train_ids,
                             const TrainConfig& config);

std::vector<double> PredictJoint(VflSession& session, const std::vector<std::string>& ids);
models::Metrics VerifyJoint(VflSession& session, const std::vector<std::string>& ids);

}  // namespace vfl::protocol
