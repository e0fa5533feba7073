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

#include <gmpxx.h>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "vfl/common/matrix.h"
#include "vfl/he/fixed_point.h"
#include "vfl/he/mask.h"
#include "vfl/he/paillier.h"
#include "vfl/party_data/party_table.h"
#include "vfl/protocol/transport.h"

namespace vfl::protocol {

struct ProtocolConfig {
  unsigned key_bits = 1024;
  // Deterministic keys, encryption randomness and masks. Tests only.
  std::optional<uint64_t> test_seed;
  int scale_bits = he::kDefaultScaleBits;
  he::MaskConfig mask;
  // Host-side intercept column.
  bool fit_intercept = true;
  // Each party z-scores its own selected features on the training rows.
  bool standardize = true;
  // Guest also sends encrypted squared scores so the host can evaluate the
  // Taylor loss.
  bool compute_loss = true;
};

// What one party reports to its own job controller after an iteration.
struct PartyIterationSummary {
  double gradient_inf_norm = 0.0;
  std::optional<double> loss;
};

// Shared machinery of the two data-holding parties.
class DataParty {
 public:
  DataParty(Role role, std::shared_ptr<const party_data::PartyTable> table,
            std::string salt, const ProtocolConfig& config);
  virtual ~DataParty() = default;

  Role role() const { return role_; }
  const party_data::PartyTable& table() const { return *table_; }

  void SelectColumns(std::vector<size_t> columns);
  const std::vector<size_t>& selected_columns() const { return columns_; }

  // Weights over the selected features (+ intercept on the host).
  const Vector& weights() const { return weights_; }
  void set_weights(Vector w);

  bool has_public_key() const { return public_key_.has_value(); }
  void ReceivePublicKey(Endpoint& ep);

  // Per-iteration mask store and the unmasked integer gradients (ring form)
  // the party recovered. Kept for the collaborator-view audit.
  const std::map<int, std::vector<he::Mask>>& mask_store() const { return masks_; }
  const std::map<int, std::vector<mpz_class>>& unmasked_store() const { return unmasked_; }

  // Training rows, in the order agreed through ids_request.
  size_t training_rows() const { return static_cast<size_t>(train_x_.rows()); }

 protected:
  // Rows for the given tokens, selected columns, standardized, plus the
  // intercept column when present. Missing tokens are reported via `missing`.
  Matrix Design(const std::vector<std::string>& tokens, size_t* missing) const;
  void FitTraining(const std::vector<std::string>& tokens);
  bool intercept() const { return with_intercept_; }

  // sum_i [[residual_i]] * x_ij for every column j, each masked.
  std::vector<he::Ciphertext> MaskedGradients(const std::vector<he::Ciphertext>& residuals,
                                              int iteration);
  // Unmask the collaborator's reply and turn it into real gradients.
  Vector UnmaskGradients(const std::vector<mpz_class>& values, int iteration,
                         size_t count);

  Role role_;
  std::shared_ptr<const party_data::PartyTable> table_;
  std::string salt_;
  ProtocolConfig config_;
  std::unordered_map<std::string, size_t> token_row_;
  std::vector<size_t> columns_;
  bool with_intercept_ = false;
  Standardizer standardizer_;
  Vector weights_;
  std::optional<he::PublicKey> public_key_;
  std::unique_ptr<he::RandomSource> rng_;
  Matrix train_x_;
  // Fixed-point training matrix, column-major: train_x_int_[j][i].
  std::vector<std::vector<mpz_class>> train_x_int_;
  std::map<int, std::vector<he::Mask>> masks_;
  std::map<int, std::vector<mpz_class>> unmasked_;
};

// Party A: contributes features, never sees labels.
class GuestParty final : public DataParty {
 public:
  GuestParty(std::shared_ptr<const party_data::PartyTable> table, std::string salt,
             const ProtocolConfig& config);

  // The only handle the host ever gets on guest features.
  std::vector<std::string> AnonymousFeatureIds() const;
  void SelectAnonymous(const std::vector<std::string>& anon_ids);
  std::vector<std::string> SelectedAnonymousIds() const;

  // Answers the host's ids_request for the training set.
  void PrepareTraining(Endpoint& ep);
  PartyIterationSummary RunIteration(Endpoint& ep, int iteration, double learning_rate);
  // Answers one ids_request with a score_share or an abort.
  void AnswerScoreRequest(Endpoint& ep);
};

// Party B: holds the labels, drives the exchange.
class HostParty final : public DataParty {
 public:
  HostParty(std::shared_ptr<const party_data::PartyTable> table, std::string salt,
            const ProtocolConfig& config);

  void SelectFeatures(const std::vector<std::string>& names);
  std::vector<std::string> SelectedFeatureNames() const;

  // Sends the de-identified training IDs; throws kGuestMissingIds on abort.
  void PrepareTraining(Endpoint& ep, const std::vector<std::string>& train_ids);
  PartyIterationSummary RunIteration(Endpoint& ep, int iteration, double learning_rate);
  // Logistic scores of the joint model for `ids`.
  std::vector<double> RequestScores(Endpoint& ep, const std::vector<std::string>& ids);

  const std::vector<std::string>& training_ids() const { return train_ids_; }

 private:
  std::vector<std::string> train_ids_;
  std::vector<int> train_y_pm_;  // labels in {-1, +1}
};

struct DecryptionRecord {
  int iteration = 0;
  Role sender = Role::kHost;
  std::vector<mpz_class> values;
};

// Party C: owns the private key, sees only masked values.
class Collaborator {
 public:
  explicit Collaborator(const ProtocolConfig& config);

  void DistributeKeys(Endpoint& ep);
  void RunIteration(Endpoint& ep, int iteration);

  bool has_keys() const { return keys_.has_value(); }
  const he::PublicKey& public_key() const;
  const std::vector<DecryptionRecord>& decryption_log() const { return log_; }

 private:
  ProtocolConfig config_;
  std::optional<he::KeyPair> keys_;
  std::vector<DecryptionRecord> log_;
};

}  // namespace vfl::protocol
