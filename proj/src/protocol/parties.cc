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

#include "vfl/protocol/parties.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vfl/common/error.h"
#include "vfl/common/random.h"
#include "vfl/party_data/alignment.h"

namespace vfl::protocol {
namespace {

nlohmann::json CiphertextArray(const std::vector<he::Ciphertext>& cts) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cts) arr.push_back(he::MpzToBase64(c.value()));
  return arr;
}

std::vector<he::Ciphertext> ParseCiphertexts(const nlohmann::json& arr,
                                             const he::PublicKey& pk) {
  std::vector<he::Ciphertext> out;
  out.reserve(arr.size());
  for (const auto& item : arr) {
    he::Ciphertext c(he::MpzFromBase64(item.get<std::string>()), pk.key_id());
    VFL_ENFORCE(c.value() < pk.n_squared(), ErrorCode::kParseError,
                "ciphertext outside [0, n^2)");
    out.push_back(std::move(c));
  }
  return out;
}

nlohmann::json MpzArray(const std::vector<mpz_class>& values) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : values) arr.push_back(he::MpzToBase64(v));
  return arr;
}

std::vector<mpz_class> ParseMpzArray(const nlohmann::json& arr) {
  std::vector<mpz_class> out;
  out.reserve(arr.size());
  for (const auto& item : arr) out.push_back(he::MpzFromBase64(item.get<std::string>()));
  return out;
}

void CheckKeyId(const nlohmann::json& payload, const he::PublicKey& pk) {
  VFL_ENFORCE(payload.at("key_id").get<std::string>() == pk.key_id(),
              ErrorCode::kKeyMismatch, "payload encrypted under a different key");
}

ProtocolMessage Expect(Endpoint& ep, Role from, MsgType type) {
  ProtocolMessage msg = ep.Receive(from);
  if (msg.type == MsgType::kAbort) {
    const std::string reason = msg.payload.value("reason", "unspecified");
    if (reason == "guest_missing_ids") {
      throw Error(ErrorCode::kGuestMissingIds,
                  "guest lacks " + std::to_string(msg.payload.value("missing", 0)) +
                      " of the requested ids");
    }
    if (reason == "guest_model_missing") {
      throw Error(ErrorCode::kModelMissing, "guest share is not trained");
    }
    throw Error(ErrorCode::kTransportClosed, "peer aborted: " + reason);
  }
  VFL_ENFORCE(msg.type == type, ErrorCode::kParseError,
              "expected " + std::string(MsgTypeName(type)) + ", got " +
                  std::string(MsgTypeName(msg.type)));
  return msg;
}

mpz_class EncodeRing(const he::PublicKey& pk, double x, int scale_bits) {
  return pk.ToRing(he::FixedPoint::Encode(x, scale_bits).mantissa);
}

double Sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

uint64_t RoleSalt(Role role) { return static_cast<uint64_t>(role) + 1; }

}  // namespace

DataParty::DataParty(Role role, std::shared_ptr<const party_data::PartyTable> table,
                     std::string salt, const ProtocolConfig& config)
    : role_(role), table_(std::move(table)), salt_(std::move(salt)), config_(config) {
  VFL_ENFORCE(table_ != nullptr, ErrorCode::kInvalidArgument, "missing party table");
  VFL_ENFORCE(!salt_.empty(), ErrorCode::kEmptySalt, "salt is empty");
  rng_ = he::MakeRandom(config.test_seed
                            ? std::optional<uint64_t>(DeriveSeed(*config.test_seed, RoleSalt(role)))
                            : std::nullopt);
  token_row_.reserve(table_->rows());
  for (size_t i = 0; i < table_->rows(); ++i) {
    token_row_.emplace(party_data::DeidentifyId(salt_, table_->sample_ids()[i]), i);
  }
  columns_.resize(table_->feature_names().size());
  for (size_t j = 0; j < columns_.size(); ++j) columns_[j] = j;
}

void DataParty::SelectColumns(std::vector<size_t> columns) {
  for (size_t c : columns) {
    VFL_ENFORCE(c < table_->feature_names().size(), ErrorCode::kInvalidArgument,
                "feature column out of range");
  }
  columns_ = std::move(columns);
  train_x_.resize(0, 0);
  train_x_int_.clear();
  weights_.resize(0);
}

void DataParty::set_weights(Vector w) {
  VFL_ENFORCE(w.size() == train_x_.cols(), ErrorCode::kInvalidArgument,
              "weight vector does not match the design width");
  weights_ = std::move(w);
}

void DataParty::ReceivePublicKey(Endpoint& ep) {
  ProtocolMessage msg = Expect(ep, Role::kCollaborator, MsgType::kPubKey);
  he::PublicKey pk = he::PublicKeyFromJson(msg.payload.at("public_key"));
  he::ValidateMaskConfig(pk, config_.mask);
  public_key_ = std::move(pk);
}

Matrix DataParty::Design(const std::vector<std::string>& tokens, size_t* missing) const {
  std::vector<size_t> rows;
  rows.reserve(tokens.size());
  size_t absent = 0;
  for (const auto& token : tokens) {
    auto it = token_row_.find(token);
    if (it == token_row_.end()) {
      ++absent;
    } else {
      rows.push_back(it->second);
    }
  }
  if (missing) *missing = absent;
  Matrix x = ::vfl::SelectColumns(SelectRows(table_->features(), rows), columns_);
  if (config_.standardize && standardizer_.mean.size() == x.cols()) {
    x = standardizer_.Apply(x);
  }
  if (with_intercept_) {
    x.conservativeResize(Eigen::NoChange, x.cols() + 1);
    x.col(x.cols() - 1).setOnes();
  }
  return x;
}

void DataParty::FitTraining(const std::vector<std::string>& tokens) {
  std::vector<size_t> rows;
  rows.reserve(tokens.size());
  for (const auto& token : tokens) rows.push_back(token_row_.at(token));
  const Matrix raw = ::vfl::SelectColumns(SelectRows(table_->features(), rows), columns_);
  standardizer_ = config_.standardize ? Standardizer::Fit(raw) : Standardizer{};
  train_x_ = Design(tokens, nullptr);
  train_x_int_.assign(static_cast<size_t>(train_x_.cols()), {});
  for (Eigen::Index j = 0; j < train_x_.cols(); ++j) {
    auto& column = train_x_int_[static_cast<size_t>(j)];
    column.reserve(static_cast<size_t>(train_x_.rows()));
    for (Eigen::Index i = 0; i < train_x_.rows(); ++i) {
      column.push_back(he::FixedPoint::Encode(train_x_(i, j), config_.scale_bits).mantissa);
    }
  }
  weights_ = Vector::Zero(train_x_.cols());
  masks_.clear();
  unmasked_.clear();
}

std::vector<he::Ciphertext> DataParty::MaskedGradients(
    const std::vector<he::Ciphertext>& residuals, int iteration) {
  const he::PublicKey& pk = *public_key_;
  VFL_ENFORCE(residuals.size() == static_cast<size_t>(train_x_.rows()),
              ErrorCode::kParseError, "residual count != training rows");
  std::vector<he::Ciphertext> out;
  auto& masks = masks_[iteration];
  masks.clear();
  for (const auto& column : train_x_int_) {
    he::Ciphertext acc = pk.EncryptDeterministic(0);
    for (size_t i = 0; i < residuals.size(); ++i) {
      if (column[i] == 0) continue;
      acc = pk.Add(acc, pk.Scale(residuals[i], column[i]));
    }
    auto [masked, mask] = he::MaskAdd(pk, acc, *rng_, config_.mask, role_);
    out.push_back(std::move(masked));
    masks.push_back(std::move(mask));
  }
  return out;
}

Vector DataParty::UnmaskGradients(const std::vector<mpz_class>& values, int iteration,
                                  size_t count) {
  const he::PublicKey& pk = *public_key_;
  const auto& masks = masks_.at(iteration);
  VFL_ENFORCE(values.size() >= count && masks.size() >= count, ErrorCode::kParseError,
              "collaborator reply has too few values");
  auto& store = unmasked_[iteration];
  store.clear();
  const mpz_class limit = mpz_class(1) << config_.mask.plaintext_bits;
  // Encoded residuals carry 4 * d at scale s, features carry scale s.
  const double denom = 4.0 * static_cast<double>(train_x_.rows());
  Vector g(static_cast<Eigen::Index>(count));
  for (size_t j = 0; j < count; ++j) {
    mpz_class ring = he::Unmask(pk, values[j], masks[j]);
    mpz_class signed_value = pk.SignedDecode(ring);
    VFL_ENFORCE(abs(signed_value) < limit, ErrorCode::kDivergedLoss,
                "gradient left the plaintext range");
    store.push_back(std::move(ring));
    g(static_cast<Eigen::Index>(j)) =
        he::DecodeScaled(signed_value, 2 * config_.scale_bits) / denom;
  }
  return g;
}

GuestParty::GuestParty(std::shared_ptr<const party_data::PartyTable> table,
                       std::string salt, const ProtocolConfig& config)
    : DataParty(Role::kGuest, std::move(table), std::move(salt), config) {
  VFL_ENFORCE(table_->role() == Role::kGuest, ErrorCode::kInvalidArgument,
              "guest party needs a guest table");
}

std::vector<std::string> GuestParty::AnonymousFeatureIds() const {
  std::vector<std::string> ids;
  for (size_t j = 0; j < table_->feature_names().size(); ++j) {
    ids.push_back(party_data::AnonymousFeatureId(j));
  }
  return ids;
}

void GuestParty::SelectAnonymous(const std::vector<std::string>& anon_ids) {
  const auto all = AnonymousFeatureIds();
  std::vector<size_t> cols;
  for (const auto& id : anon_ids) {
    auto it = std::find(all.begin(), all.end(), id);
    VFL_ENFORCE(it != all.end(), ErrorCode::kInvalidArgument,
                "unknown external feature '" + id + "'");
    cols.push_back(static_cast<size_t>(it - all.begin()));
  }
  SelectColumns(std::move(cols));
}

std::vector<std::string> GuestParty::SelectedAnonymousIds() const {
  const auto all = AnonymousFeatureIds();
  std::vector<std::string> out;
  for (size_t c : columns_) out.push_back(all[c]);
  return out;
}

void GuestParty::PrepareTraining(Endpoint& ep) {
  ProtocolMessage msg = Expect(ep, Role::kHost, MsgType::kIdsRequest);
  const auto tokens = msg.payload.at("tokens").get<std::vector<std::string>>();
  size_t missing = 0;
  for (const auto& t : tokens) missing += token_row_.count(t) ? 0 : 1;
  if (missing > 0) {
    ep.Send(Role::kHost, MsgType::kAbort, kSetupIteration,
            {{"reason", "guest_missing_ids"}, {"missing", missing}});
    return;
  }
  FitTraining(tokens);
  ep.Send(Role::kHost, MsgType::kIdsRequest, kSetupIteration,
          {{"purpose", "train"}, {"accepted", tokens.size()}});
}

PartyIterationSummary GuestParty::RunIteration(Endpoint& ep, int iteration,
                                               double learning_rate) {
  VFL_ENFORCE(public_key_.has_value(), ErrorCode::kKeyNotDistributed,
              "guest has no public key");
  const he::PublicKey& pk = *public_key_;
  const int s = config_.scale_bits;

  // (a) [[u_A,i]] to the host.
  const Vector u = train_x_ * weights_;
  std::vector<he::Ciphertext> scores;
  std::vector<he::Ciphertext> squares;
  scores.reserve(static_cast<size_t>(u.size()));
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    scores.push_back(pk.Encrypt(EncodeRing(pk, u(i), s), *rng_));
    if (config_.compute_loss) {
      squares.push_back(pk.Encrypt(EncodeRing(pk, u(i) * u(i), 2 * s), *rng_));
    }
  }
  nlohmann::json payload{{"key_id", pk.key_id()}, {"scores", CiphertextArray(scores)}};
  if (config_.compute_loss) payload["squares"] = CiphertextArray(squares);
  ep.Send(Role::kHost, MsgType::kEncPartialScore, iteration, std::move(payload));

  // (b) encrypted residuals back from the host.
  ProtocolMessage reply = Expect(ep, Role::kHost, MsgType::kEncPartialScore);
  CheckKeyId(reply.payload, pk);
  const auto residuals = ParseCiphertexts(reply.payload.at("residuals"), pk);

  // (c) masked encrypted gradient to the collaborator.
  const auto masked = MaskedGradients(residuals, iteration);
  ep.Send(Role::kCollaborator, MsgType::kEncGradientMasked, iteration,
          {{"key_id", pk.key_id()}, {"gradients", CiphertextArray(masked)}});

  // (d) unmask and step.
  ProtocolMessage dec = Expect(ep, Role::kCollaborator, MsgType::kDecGradientMasked);
  const Vector g = UnmaskGradients(ParseMpzArray(dec.payload.at("gradients")), iteration,
                                   static_cast<size_t>(weights_.size()));
  weights_ -= learning_rate * g;
  VFL_ENFORCE(weights_.allFinite(), ErrorCode::kDivergedLoss, "guest weights diverged");
  return {g.size() ? g.cwiseAbs().maxCoeff() : 0.0, std::nullopt};
}

void GuestParty::AnswerScoreRequest(Endpoint& ep) {
  ProtocolMessage msg = Expect(ep, Role::kHost, MsgType::kIdsRequest);
  const auto tokens = msg.payload.at("tokens").get<std::vector<std::string>>();
  size_t missing = 0;
  const Matrix x = Design(tokens, &missing);
  if (missing > 0) {
    ep.Send(Role::kHost, MsgType::kAbort, kSetupIteration,
            {{"reason", "guest_missing_ids"}, {"missing", missing}});
    return;
  }
  if (weights_.size() != x.cols()) {
    ep.Send(Role::kHost, MsgType::kAbort, kSetupIteration, {{"reason", "guest_model_missing"}});
    return;
  }
  const Vector u = x * weights_;
  ep.Send(Role::kHost, MsgType::kScoreShare, kSetupIteration,
          {{"scores", ToStdVector(u)}});
}

HostParty::HostParty(std::shared_ptr<const party_data::PartyTable> table,
                     std::string salt, const ProtocolConfig& config)
    : DataParty(Role::kHost, std::move(table), std::move(salt), config) {
  VFL_ENFORCE(table_->role() == Role::kHost && table_->labels().has_value(),
              ErrorCode::kInvalidArgument, "host party needs a labelled host table");
  with_intercept_ = config.fit_intercept;
}

void HostParty::SelectFeatures(const std::vector<std::string>& names) {
  std::vector<size_t> cols;
  for (const auto& name : names) cols.push_back(table_->ColumnOf(name));
  SelectColumns(std::move(cols));
}

std::vector<std::string> HostParty::SelectedFeatureNames() const {
  std::vector<std::string> names;
  for (size_t c : columns_) names.push_back(table_->feature_names()[c]);
  return names;
}

void HostParty::PrepareTraining(Endpoint& ep, const std::vector<std::string>& train_ids) {
  VFL_ENFORCE(!train_ids.empty(), ErrorCode::kInvalidArgument, "no training ids");
  std::vector<std::string> tokens;
  std::vector<int> y_pm;
  tokens.reserve(train_ids.size());
  for (const auto& id : train_ids) {
    auto row = table_->RowOf(id);
    VFL_ENFORCE(row.has_value(), ErrorCode::kInvalidArgument,
                "training id '" + id + "' unknown to the host");
    tokens.push_back(party_data::DeidentifyId(salt_, id));
    y_pm.push_back(2 * (*table_->labels())[*row] - 1);
  }
  ep.Send(Role::kGuest, MsgType::kIdsRequest, kSetupIteration,
          {{"purpose", "train"}, {"tokens", tokens}});
  Expect(ep, Role::kGuest, MsgType::kIdsRequest);
  FitTraining(tokens);
  train_ids_ = train_ids;
  train_y_pm_ = std::move(y_pm);
}

PartyIterationSummary HostParty::RunIteration(Endpoint& ep, int iteration,
                                              double learning_rate) {
  VFL_ENFORCE(public_key_.has_value(), ErrorCode::kKeyNotDistributed,
              "host has no public key");
  const he::PublicKey& pk = *public_key_;
  const int s = config_.scale_bits;
  const auto m = static_cast<size_t>(train_x_.rows());

  ProtocolMessage msg = Expect(ep, Role::kGuest, MsgType::kEncPartialScore);
  CheckKeyId(msg.payload, pk);
  const auto scores = ParseCiphertexts(msg.payload.at("scores"), pk);
  VFL_ENFORCE(scores.size() == m, ErrorCode::kParseError, "score count != training rows");
  const Vector u = train_x_ * weights_;

  // [[4 d_i]] = [[u_A,i]] + (u_B,i - 2 y_i); read at scale s + 2 it is
  // d_i = (u_A,i + u_B,i) / 4 - y_i / 2. Rerandomized, otherwise the guest
  // could divide out its own ciphertext and read u_B,i - 2 y_i.
  std::vector<he::Ciphertext> residuals;
  residuals.reserve(m);
  for (size_t i = 0; i < m; ++i) {
    const double shift = u(static_cast<Eigen::Index>(i)) - 2.0 * train_y_pm_[i];
    residuals.push_back(
        pk.Rerandomize(pk.AddPlain(scores[i], EncodeRing(pk, shift, s)), *rng_));
  }
  ep.Send(Role::kGuest, MsgType::kEncPartialScore, iteration,
          {{"key_id", pk.key_id()}, {"residuals", CiphertextArray(residuals)}});

  auto masked = MaskedGradients(residuals, iteration);
  nlohmann::json payload{{"key_id", pk.key_id()}, {"gradients", CiphertextArray(masked)}};

  // 8 * sum_i (z_i^2 / 8 - y_i z_i / 2) with z = u_A + u_B, at scale 2s.
  const bool with_loss = msg.payload.contains("squares");
  if (with_loss) {
    const auto squares = ParseCiphertexts(msg.payload.at("squares"), pk);
    VFL_ENFORCE(squares.size() == m, ErrorCode::kParseError, "square count != rows");
    he::Ciphertext acc = pk.EncryptDeterministic(0);
    mpz_class plain = 0;
    for (size_t i = 0; i < m; ++i) {
      const double ub = u(static_cast<Eigen::Index>(i));
      const double y = train_y_pm_[i];
      acc = pk.Add(acc, squares[i]);
      acc = pk.Add(acc, pk.Scale(scores[i],
                                 he::FixedPoint::Encode(2.0 * ub - 4.0 * y, s).mantissa));
      plain += he::FixedPoint::Encode(ub * ub - 4.0 * y * ub, 2 * s).mantissa;
    }
    acc = pk.AddPlain(acc, pk.ToRing(plain));
    auto [masked_loss, mask] = he::MaskAdd(pk, acc, *rng_, config_.mask, role_);
    masks_[iteration].push_back(std::move(mask));
    payload["loss"] = he::MpzToBase64(masked_loss.value());
  }
  ep.Send(Role::kCollaborator, MsgType::kEncGradientMasked, iteration, std::move(payload));

  ProtocolMessage dec = Expect(ep, Role::kCollaborator, MsgType::kDecGradientMasked);
  std::vector<mpz_class> values = ParseMpzArray(dec.payload.at("gradients"));
  const auto n_grad = values.size();
  if (with_loss) values.push_back(he::MpzFromBase64(dec.payload.at("loss").get<std::string>()));
  const Vector g = UnmaskGradients(values, iteration, n_grad);

  PartyIterationSummary summary;
  summary.gradient_inf_norm = g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
  if (with_loss) {
    mpz_class ring = he::Unmask(pk, values.back(), masks_[iteration].back());
    unmasked_[iteration].push_back(ring);
    const double scaled = he::DecodeScaled(pk.SignedDecode(ring), 2 * s);
    summary.loss = std::numbers::ln2 + scaled / (8.0 * static_cast<double>(m));
  }
  weights_ -= learning_rate * g;
  VFL_ENFORCE(weights_.allFinite(), ErrorCode::kDivergedLoss, "host weights diverged");
  return summary;
}

std::vector<double> HostParty::RequestScores(Endpoint& ep,
                                             const std::vector<std::string>& ids) {
  std::vector<std::string> tokens;
  tokens.reserve(ids.size());
  for (const auto& id : ids) tokens.push_back(party_data::DeidentifyId(salt_, id));
  size_t missing = 0;
  const Matrix x = Design(tokens, &missing);
  VFL_ENFORCE(missing == 0, ErrorCode::kInvalidArgument, "ids unknown to the host");
  VFL_ENFORCE(weights_.size() == x.cols(), ErrorCode::kModelMissing,
              "host share is not trained");
  ep.Send(Role::kGuest, MsgType::kIdsRequest, kSetupIteration,
          {{"purpose", "score"}, {"tokens", tokens}});
  ProtocolMessage reply = Expect(ep, Role::kGuest, MsgType::kScoreShare);
  const auto guest_scores = reply.payload.at("scores").get<std::vector<double>>();
  VFL_ENFORCE(guest_scores.size() == ids.size(), ErrorCode::kParseError,
              "score_share size mismatch");
  const Vector u = x * weights_;
  std::vector<double> out(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) {
    out[i] = Sigmoid(u(static_cast<Eigen::Index>(i)) + guest_scores[i]);
  }
  return out;
}

Collaborator::Collaborator(const ProtocolConfig& config) : config_(config) {}

const he::PublicKey& Collaborator::public_key() const {
  VFL_ENFORCE(keys_.has_value(), ErrorCode::kKeyNotDistributed, "no key pair yet");
  return keys_->public_key;
}

void Collaborator::DistributeKeys(Endpoint& ep) {
  keys_ = he::Keygen(config_.key_bits,
                     config_.test_seed
                         ? std::optional<uint64_t>(DeriveSeed(*config_.test_seed, 99))
                         : std::nullopt);
  const nlohmann::json payload{{"public_key", he::PublicKeyToJson(keys_->public_key)}};
  ep.Send(Role::kGuest, MsgType::kPubKey, kSetupIteration, payload);
  ep.Send(Role::kHost, MsgType::kPubKey, kSetupIteration, payload);
}

void Collaborator::RunIteration(Endpoint& ep, int iteration) {
  VFL_ENFORCE(keys_.has_value(), ErrorCode::kKeyNotDistributed, "no key pair yet");
  const he::PublicKey& pk = keys_->public_key;
  for (Role sender : {Role::kGuest, Role::kHost}) {
    ProtocolMessage msg = Expect(ep, sender, MsgType::kEncGradientMasked);
    CheckKeyId(msg.payload, pk);
    DecryptionRecord record{iteration, sender, {}};
    std::vector<mpz_class> grads;
    for (const auto& c : ParseCiphertexts(msg.payload.at("gradients"), pk)) {
      grads.push_back(keys_->private_key.Decrypt(c));
    }
    record.values = grads;
    nlohmann::json reply{{"gradients", MpzArray(grads)}};
    if (msg.payload.contains("loss")) {
      he::Ciphertext c(he::MpzFromBase64(msg.payload.at("loss").get<std::string>()),
                       pk.key_id());
      mpz_class v = keys_->private_key.Decrypt(c);
      reply["loss"] = he::MpzToBase64(v);
      record.values.push_back(std::move(v));
    }
    log_.push_back(std::move(record));
    ep.Send(sender, MsgType::kDecGradientMasked, iteration, std::move(reply));
  }
}

}  // namespace vfl::protocol
