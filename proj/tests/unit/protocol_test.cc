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

#include <cmath>
#include <map>

#include "audit.h"
#include "gtest/gtest.h"
#include "synthetic.h"
#include "vfl/common/error.h"
#include "vfl/protocol/session.h"

namespace vfl::protocol {
namespace {

using testing::MakeVerticalData;
using testing::SyntheticSpec;
using testing::TaylorOracle;

template <typename Fn>
ErrorCode CodeOf(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected vfl::Error";
  return ErrorCode::kInvalidArgument;
}

ProtocolConfig TestConfig(uint64_t seed = 11) {
  ProtocolConfig c;
  c.key_bits = 512;
  c.test_seed = seed;
  return c;
}

std::vector<std::string> Head(const std::vector<std::string>& ids, size_t n) {
  return {ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n)};
}

TEST(ProtocolTest, SingleSampleTaylorStep) {
  auto host = std::make_shared<party_data::PartyTable>(party_data::PartyTable::Create(
      Role::kHost, {"a"}, {}, Matrix(1, 0), std::vector<int>{1}));
  Matrix xa(1, 1);
  xa << 1.0;
  auto guest = std::make_shared<party_data::PartyTable>(
      party_data::PartyTable::Create(Role::kGuest, {"a"}, {"x"}, xa, std::nullopt));
  ProtocolConfig config = TestConfig();
  config.fit_intercept = false;
  config.standardize = false;
  VflSession session(host, guest, "salt", config);
  session.DistributeKeys();
  session.PrepareTraining({"a"});
  const auto record = session.RunIteration(1.0);
  ASSERT_EQ(session.guest().weights().size(), 1);
  EXPECT_DOUBLE_EQ(session.guest().weights()(0), 0.5);
  EXPECT_DOUBLE_EQ(record.gradient_norm, 0.5);
  EXPECT_NEAR(record.loss, std::log(2.0), 1e-12);
  EXPECT_GT(record.bytes_exchanged, 0);
}

TEST(ProtocolTest, StationaryPointLeavesWeightsUnchanged) {
  // z_i = 2 y_i makes every residual z/4 - y/2 vanish.
  const std::vector<int> labels = {1, 0, 1, 0};
  Matrix xa(4, 1), xb(4, 1);
  xa << 1, -1, 1, -1;
  xb << 0.5, 0.5, -0.5, 2;
  const std::vector<std::string> ids = {"a", "b", "c", "d"};
  auto host = std::make_shared<party_data::PartyTable>(
      party_data::PartyTable::Create(Role::kHost, ids, {"hb"}, xb, labels));
  auto guest = std::make_shared<party_data::PartyTable>(
      party_data::PartyTable::Create(Role::kGuest, ids, {"ga"}, xa, std::nullopt));
  ProtocolConfig config = TestConfig();
  config.fit_intercept = false;
  config.standardize = false;
  VflSession session(host, guest, "salt", config);
  session.DistributeKeys();
  session.PrepareTraining(ids);
  session.guest().set_weights(Vector::Constant(1, 2.0));
  session.host().set_weights(Vector::Zero(1));
  const auto record = session.RunIteration(0.7);
  EXPECT_EQ(session.guest().weights()(0), 2.0);
  EXPECT_EQ(session.host().weights()(0), 0.0);
  EXPECT_EQ(record.gradient_norm, 0.0);
}

TEST(ProtocolTest, MatchesPlaintextOracleAndMessageSchedule) {
  SyntheticSpec spec;
  spec.rows = 200;
  spec.host_features = 3;
  spec.guest_features = 3;
  auto data = MakeVerticalData(spec);
  VflSession session(data.host, data.guest, "salt", TestConfig());
  TrainConfig train;
  train.max_iterations = 25;
  train.tolerance = 0;
  const auto model = TrainVfl(session, data.ids, train);

  TaylorOracle oracle(*data.host, *data.guest, data.ids, true, true);
  ASSERT_EQ(model.iteration_log.size(), 25u);
  for (int i = 0; i < 25; ++i) {
    const double loss = oracle.Step(0.1);
    EXPECT_NEAR(model.iteration_log[static_cast<size_t>(i)].loss, loss, 1e-8) << i;
  }
  EXPECT_LE((session.host().weights() - oracle.host_w).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE((session.guest().weights() - oracle.guest_w).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_EQ(model.weights.size(), 4u);  // host share only, intercept last
  EXPECT_EQ(model.guest_features, (std::vector<std::string>{"ext_00", "ext_01", "ext_02"}));

  std::map<int, std::map<MsgType, int>> counts;
  for (const auto& m : session.log().Snapshot()) counts[m.message.iteration][m.message.type]++;
  for (int i = 0; i < 25; ++i) {
    EXPECT_EQ(counts[i][MsgType::kEncPartialScore], 2);
    EXPECT_EQ(counts[i][MsgType::kEncGradientMasked], 2);
    EXPECT_EQ(counts[i][MsgType::kDecGradientMasked], 2);
    int total = 0;
    for (auto& [type, c] : counts[i]) total += c;
    EXPECT_EQ(total, 6);
  }
  for (const auto& rec : model.iteration_log) {
    EXPECT_GT(rec.bytes_exchanged, 0);
    EXPECT_TRUE(std::isfinite(rec.loss));
  }
}

TEST(ProtocolTest, TranscriptCarriesNoPlaintextSecrets) {
  SyntheticSpec spec;
  spec.rows = 60;
  spec.host_features = 2;
  spec.guest_features = 2;
  auto data = MakeVerticalData(spec);
  VflSession session(data.host, data.guest, "salt", TestConfig());
  TrainConfig train;
  train.max_iterations = 4;
  train.tolerance = 0;
  TrainVfl(session, data.ids, train);

  testing::TranscriptSecrets secrets;
  for (const auto* t : {data.host.get(), data.guest.get()}) {
    for (Eigen::Index i = 0; i < t->features().size(); ++i) {
      secrets.values.push_back(t->features().data()[i]);
    }
  }
  secrets.strings = data.ids;
  for (const auto* p : std::initializer_list<const DataParty*>{&session.guest(), &session.host()}) {
    for (const auto& [it, vals] : p->unmasked_store()) {
      secrets.integers.insert(secrets.integers.end(), vals.begin(), vals.end());
    }
  }
  const auto findings = testing::ScanTranscript(session.log().Snapshot(), secrets);
  EXPECT_TRUE(findings.empty()) << findings.front();

  // The scanner itself must notice a leak.
  auto leaked = session.log().Snapshot();
  leaked[0].message.payload["oops"] = data.ids[3];
  EXPECT_FALSE(testing::ScanTranscript(leaked, secrets).empty());
}

TEST(ProtocolTest, CollaboratorSeesTrueGradientPlusMask) {
  auto data = MakeVerticalData({.rows = 40, .host_features = 2, .guest_features = 2});
  VflSession session(data.host, data.guest, "salt", TestConfig());
  TrainConfig train;
  train.max_iterations = 3;
  train.tolerance = 0;
  TrainVfl(session, data.ids, train);
  const mpz_class& n = session.collaborator().public_key().n();
  ASSERT_EQ(session.collaborator().decryption_log().size(), 6u);
  for (const auto& rec : session.collaborator().decryption_log()) {
    const DataParty& p = rec.sender == Role::kGuest ? static_cast<const DataParty&>(session.guest())
                                                    : session.host();
    const auto& masks = p.mask_store().at(rec.iteration);
    const auto& truth = p.unmasked_store().at(rec.iteration);
    ASSERT_EQ(rec.values.size(), masks.size());
    ASSERT_EQ(rec.values.size(), truth.size());
    for (size_t j = 0; j < rec.values.size(); ++j) {
      mpz_class expect = (truth[j] + masks[j].value) % n;
      EXPECT_EQ(rec.values[j], expect);
      EXPECT_NE(masks[j].value, 0);
      EXPECT_EQ(masks[j].owner, rec.sender);
    }
  }
}

TEST(ProtocolTest, TcpMeshMatchesLoopback) {
  auto data = MakeVerticalData({.rows = 50, .host_features = 2, .guest_features = 3});
  TrainConfig train;
  train.max_iterations = 3;
  train.tolerance = 0;
  VflSession loop(data.host, data.guest, "salt", TestConfig(5));
  TrainVfl(loop, data.ids, train);
  VflSession tcp(data.host, data.guest, "salt", TestConfig(5), TcpTransport::CreateLocalMesh());
  TrainVfl(tcp, data.ids, train);
  EXPECT_EQ(loop.host().weights(), tcp.host().weights());
  EXPECT_EQ(loop.guest().weights(), tcp.guest().weights());
  EXPECT_EQ(loop.log().total_bytes(), tcp.log().total_bytes());
}

TEST(ProtocolTest, IterationWithoutKeysFails) {
  auto data = MakeVerticalData({.rows = 10, .host_features = 1, .guest_features = 1});
  VflSession session(data.host, data.guest, "salt", TestConfig());
  session.PrepareTraining(data.ids);
  EXPECT_EQ(CodeOf([&] { session.RunIteration(0.1); }), ErrorCode::kKeyNotDistributed);
}

TEST(ProtocolTest, GuestMissingIdsEndsTrainingVerificationAndPrediction) {
  auto data = MakeVerticalData({.rows = 30, .host_features = 2, .guest_features = 2});
  auto partial = MakeVerticalData({.rows = 30, .host_features = 2, .guest_features = 2});
  // Guest table without the last id.
  std::vector<std::string> guest_ids = Head(data.ids, 29);
  auto guest = std::make_shared<party_data::PartyTable>(party_data::PartyTable::Create(
      Role::kGuest, guest_ids, data.guest->feature_names(),
      data.guest->features().topRows(29), std::nullopt));
  VflSession session(data.host, guest, "salt", TestConfig());
  EXPECT_EQ(CodeOf([&] { TrainVfl(session, data.ids, {}); }), ErrorCode::kGuestMissingIds);

  TrainConfig train;
  train.max_iterations = 2;
  TrainVfl(session, guest_ids, train);
  EXPECT_EQ(CodeOf([&] { VerifyJoint(session, data.ids); }), ErrorCode::kGuestMissingIds);
  EXPECT_EQ(CodeOf([&] { PredictJoint(session, {data.ids.back()}); }),
            ErrorCode::kGuestMissingIds);
  // The abort is orderly: the session keeps working.
  EXPECT_EQ(PredictJoint(session, Head(guest_ids, 5)).size(), 5u);
  EXPECT_TRUE(PredictJoint(session, {}).empty());
}

TEST(ProtocolTest, ZeroIterationsKeepsInitialWeights) {
  auto data = MakeVerticalData({.rows = 40, .host_features = 2, .guest_features = 2});
  VflSession session(data.host, data.guest, "salt", TestConfig());
  TrainConfig train;
  train.max_iterations = 0;
  const auto model = TrainVfl(session, data.ids, train);
  EXPECT_TRUE(model.iteration_log.empty());
  for (double w : model.weights) EXPECT_EQ(w, 0.0);

  // Balanced labels: four ids, two of each class.
  std::vector<std::string> pos, neg;
  for (size_t i = 0; i < data.ids.size(); ++i) {
    (data.labels[i] ? pos : neg).push_back(data.ids[i]);
  }
  ASSERT_GE(pos.size(), 2u);
  ASSERT_GE(neg.size(), 2u);
  const std::vector<std::string> ids = {pos[0], neg[0], pos[1], neg[1]};
  for (double s : PredictJoint(session, ids)) EXPECT_EQ(s, 0.5);
  const auto metrics = VerifyJoint(session, ids);
  EXPECT_EQ(metrics.auc, 0.5);
  EXPECT_EQ(metrics.accuracy, 0.5);
}

TEST(ProtocolTest, SeparableSetIsLearned) {
  auto data = MakeVerticalData(
      {.rows = 160, .host_features = 2, .guest_features = 2, .seed = 3, .separable = true,
       .margin = 1.0});
  const auto train_ids = Head(data.ids, 100);
  const std::vector<std::string> holdout(data.ids.begin() + 100, data.ids.end());
  VflSession session(data.host, data.guest, "salt", TestConfig());
  TrainConfig train;
  train.max_iterations = 300;
  TrainVfl(session, train_ids, train);
  EXPECT_GE(VerifyJoint(session, train_ids).accuracy, 0.95);
  EXPECT_EQ(VerifyJoint(session, holdout).auc, 1.0);
}

TEST(ProtocolTest, PredictionsMatchPlaintextScoring) {
  auto data = MakeVerticalData({.rows = 300, .host_features = 3, .guest_features = 2});
  const auto train_ids = Head(data.ids, 100);
  const std::vector<std::string> ids(data.ids.begin() + 100, data.ids.end());
  ASSERT_EQ(ids.size(), 200u);
  VflSession session(data.host, data.guest, "salt", TestConfig());
  TrainConfig train;
  train.max_iterations = 5;
  TrainVfl(session, train_ids, train);
  const auto scores = PredictJoint(session, ids);
  const auto oracle = testing::OracleScores(*data.host, *data.guest, train_ids, ids,
                                            session.host().weights(),
                                            session.guest().weights(), true);
  ASSERT_EQ(scores.size(), oracle.size());
  for (size_t i = 0; i < scores.size(); ++i) EXPECT_NEAR(scores[i], oracle[i], 1e-6);
}

TEST(ProtocolTest, HugeStepIsReportedAsDivergence) {
  auto data = MakeVerticalData({.rows = 30, .host_features = 2, .guest_features = 2});
  VflSession session(data.host, data.guest, "salt", TestConfig());
  TrainConfig train;
  train.learning_rate = 1e30;
  train.max_iterations = 5;
  train.tolerance = 0;
  EXPECT_EQ(CodeOf([&] { TrainVfl(session, data.ids, train); }), ErrorCode::kDivergedLoss);
  // The transport was torn down; later calls fail fast instead of hanging.
  EXPECT_EQ(CodeOf([&] { session.RunIteration(0.1); }), ErrorCode::kTransportClosed);
}

}  // namespace
}  // namespace vfl::protocol
