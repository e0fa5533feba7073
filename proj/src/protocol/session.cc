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

#include "vfl/protocol/session.h"

#include <array>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "vfl/common/error.h"

namespace vfl::protocol {
namespace {

// Aborts that both sides agreed on; nobody is left waiting on the transport.
bool IsOrderlyAbort(ErrorCode code) {
  return code == ErrorCode::kGuestMissingIds || code == ErrorCode::kModelMissing;
}

}  // namespace

VflSession::VflSession(std::shared_ptr<const party_data::PartyTable> host_table,
                       std::shared_ptr<const party_data::PartyTable> guest_table,
                       std::string salt, ProtocolConfig config,
                       std::unique_ptr<Transport> transport)
    : config_(config),
      transport_(transport ? std::move(transport) : std::make_unique<LoopbackTransport>()),
      guest_(std::move(guest_table), salt, config),
      host_(std::move(host_table), salt, config),
      collaborator_(config) {}

VflSession::~VflSession() { transport_->Shutdown(); }

void VflSession::RunParties(const std::function<void(Endpoint&)>& guest_fn,
                            const std::function<void(Endpoint&)>& host_fn,
                            const std::function<void(Endpoint&)>& collaborator_fn) {
  VFL_ENFORCE(!broken_, ErrorCode::kTransportClosed,
              "session transport was shut down by an earlier failure");
  std::array<std::exception_ptr, 3> errors;
  std::array<Role, 3> roles{Role::kGuest, Role::kHost, Role::kCollaborator};
  std::array<const std::function<void(Endpoint&)>*, 3> fns{&guest_fn, &host_fn,
                                                            &collaborator_fn};
  std::vector<std::thread> threads;
  for (size_t k = 0; k < 3; ++k) {
    if (!*fns[k]) continue;
    threads.emplace_back([&, k] {
      Endpoint ep(roles[k], *transport_, log_);
      try {
        (*fns[k])(ep);
      } catch (const Error& e) {
        errors[k] = std::current_exception();
        if (!IsOrderlyAbort(e.code())) transport_->Shutdown();
      } catch (...) {
        errors[k] = std::current_exception();
        transport_->Shutdown();
      }
    });
  }
  for (auto& t : threads) t.join();

  // Report the root cause, not the TransportClosed it caused elsewhere.
  std::exception_ptr first;
  std::exception_ptr root;
  for (auto& e : errors) {
    if (!e) continue;
    if (!first) first = e;
    try {
      std::rethrow_exception(e);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::kTransportClosed && !root) root = e;
    } catch (...) {
      if (!root) root = e;
    }
  }
  if (!first) return;
  try {
    std::rethrow_exception(first);
  } catch (const Error& err) {
    if (!IsOrderlyAbort(err.code())) broken_ = true;
  } catch (...) {
    broken_ = true;
  }
  std::rethrow_exception(root ? root : first);
}

void VflSession::DistributeKeys() {
  RunParties([this](Endpoint& ep) { guest_.ReceivePublicKey(ep); },
             [this](Endpoint& ep) { host_.ReceivePublicKey(ep); },
             [this](Endpoint& ep) { collaborator_.DistributeKeys(ep); });
}

void VflSession::PrepareTraining(const std::vector<std::string>& train_ids) {
  RunParties([this](Endpoint& ep) { guest_.PrepareTraining(ep); },
             [this, &train_ids](Endpoint& ep) { host_.PrepareTraining(ep, train_ids); },
             nullptr);
  next_iteration_ = 0;
}

models::IterationRecord VflSession::RunIteration(double learning_rate) {
  VFL_ENFORCE(collaborator_.has_keys() && guest_.has_public_key() && host_.has_public_key(),
              ErrorCode::kKeyNotDistributed, "public key has not been distributed");
  VFL_ENFORCE(training_prepared(), ErrorCode::kInvalidArgument,
              "training ids have not been exchanged");
  const int it = next_iteration_;
  const int64_t bytes_before = log_.total_bytes();
  const auto start = std::chrono::steady_clock::now();
  PartyIterationSummary guest_summary;
  PartyIterationSummary host_summary;
  RunParties(
      [&](Endpoint& ep) { guest_summary = guest_.RunIteration(ep, it, learning_rate); },
      [&](Endpoint& ep) { host_summary = host_.RunIteration(ep, it, learning_rate); },
      [&](Endpoint& ep) { collaborator_.RunIteration(ep, it); });
  const auto elapsed = std::chrono::steady_clock::now() - start;
  ++next_iteration_;

  models::IterationRecord record;
  record.iteration = it;
  // Without compute_loss the host has no loss to report; 0 stands in.
  record.loss = host_summary.loss.value_or(0.0);
  record.gradient_norm =
      std::max(guest_summary.gradient_inf_norm, host_summary.gradient_inf_norm);
  record.wall_time_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
  record.bytes_exchanged = log_.total_bytes() - bytes_before;
  VFL_ENFORCE(std::isfinite(record.loss) && std::isfinite(record.gradient_norm),
              ErrorCode::kDivergedLoss, "training diverged");
  return record;
}

std::vector<double> VflSession::Predict(const std::vector<std::string>& ids) {
  if (ids.empty()) return {};
  std::vector<double> scores;
  RunParties([this](Endpoint& ep) { guest_.AnswerScoreRequest(ep); },
             [this, &ids, &scores](Endpoint& ep) { scores = host_.RequestScores(ep, ids); },
             nullptr);
  return scores;
}

models::ModelRecord TrainVfl(VflSession& session, const std::vector<std::string>& train_ids,
                             const TrainConfig& config) {
  VFL_ENFORCE(config.max_iterations >= 0, ErrorCode::kInvalidArgument,
              "max_iterations must be non-negative");
  VFL_ENFORCE(config.learning_rate > 0 && std::isfinite(config.learning_rate),
              ErrorCode::kInvalidArgument, "learning_rate must be positive");
  if (!session.collaborator().has_keys()) session.DistributeKeys();
  session.PrepareTraining(train_ids);

  models::ModelRecord record;
  record.kind = models::ModelKind::kVfl;
  for (int i = 0; i < config.max_iterations; ++i) {
    if (config.cancelled && config.cancelled()) break;
    models::IterationRecord it = session.RunIteration(config.learning_rate);
    record.iteration_log.push_back(it);
    if (config.on_iteration) config.on_iteration(it);
    if (it.gradient_norm < config.tolerance) break;
  }
  record.host_features = session.host().SelectedFeatureNames();
  record.guest_features = session.guest().SelectedAnonymousIds();
  record.weights = ToStdVector(session.host().weights());
  record.fit_intercept = session.config().fit_intercept;
  record.guest_share_ref = "guest-share@" + std::to_string(session.iterations_run());
  record.config = {{"learning_rate", config.learning_rate},
                   {"max_iterations", config.max_iterations},
                   {"tolerance", config.tolerance},
                   {"key_bits", session.config().key_bits},
                   {"scale_bits", session.config().scale_bits},
                   {"training_rows", train_ids.size()}};
  return record;
}

std::vector<double> PredictJoint(VflSession& session, const std::vector<std::string>& ids) {
  return session.Predict(ids);
}

models::Metrics VerifyJoint(VflSession& session, const std::vector<std::string>& ids) {
  const auto scores = session.Predict(ids);
  const auto& table = session.host().table();
  VFL_ENFORCE(table.labels().has_value(), ErrorCode::kInvalidArgument, "host has no labels");
  std::vector<int> labels;
  labels.reserve(ids.size());
  for (const auto& id : ids) labels.push_back((*table.labels())[*table.RowOf(id)]);
  return models::Evaluate(scores, labels);
}

}  // namespace vfl::protocol
