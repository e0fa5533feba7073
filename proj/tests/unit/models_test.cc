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
#include <filesystem>
#include <fstream>

#include "gtest/gtest.h"
#include "synthetic.h"
#include "vfl/common/error.h"
#include "vfl/common/random.h"
#include "vfl/models/local_lr.h"
#include "vfl/models/metrics.h"
#include "vfl/models/registry.h"

namespace vfl::models {
namespace {

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

// Fraction of (positive, negative) pairs ranked correctly, ties counting 1/2.
double PairwiseAuc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0;
  double pairs = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    for (size_t j = 0; j < s.size(); ++j) {
      if (y[i] != 1 || y[j] != 0) continue;
      pairs += 1;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

// max over every observed threshold t of |TPR(t) - FPR(t)|, scores >= t positive.
double BruteKs(const std::vector<double>& s, const std::vector<int>& y) {
  double pos = 0, neg = 0;
  for (int v : y) (v ? pos : neg) += 1;
  double best = 0;
  for (double t : s) {
    double tp = 0, fp = 0;
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= t) (y[i] ? tp : fp) += 1;
    }
    best = std::max(best, std::abs(tp / pos - fp / neg));
  }
  return best;
}

TEST(MetricsTest, PerfectSeparation) {
  const Metrics m = Evaluate(std::vector<double>{.9, .8, .2, .1}, std::vector<int>{1, 1, 0, 0});
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.auc, 1.0);
  EXPECT_EQ(m.ks, 1.0);
  EXPECT_NEAR(m.loss, -(2 * std::log(0.9) + 2 * std::log(0.8)) / 4, 1e-15);
}

TEST(MetricsTest, ConstantHalfScores) {
  const Metrics m =
      Evaluate(std::vector<double>(4, 0.5), std::vector<int>{1, 0, 1, 0});
  EXPECT_EQ(m.accuracy, 0.5);
  EXPECT_EQ(m.auc, 0.5);
  EXPECT_EQ(m.ks, 0.0);
  EXPECT_NEAR(m.loss, std::log(2.0), 1e-15);
}

TEST(MetricsTest, LogLossIsClipped) {
  const Metrics m = Evaluate(std::vector<double>{0.0, 1.0}, std::vector<int>{1, 0});
  // The upper clip 1 - 1e-12 is not exact in binary, so compute it the same way.
  const double expected = -(std::log(1e-12) + std::log(1.0 - (1.0 - 1e-12))) / 2;
  EXPECT_NEAR(m.loss, expected, 1e-12);
}

TEST(MetricsTest, AucMatchesPairwiseOracleExactly) {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t n = 2 + UniformIndex(rng, 199);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (size_t i = 0; i < n; ++i) {
      // Coarse grid so ties are common.
      s[i] = static_cast<double>(UniformIndex(rng, trial % 2 ? 10 : 1000)) / 10.0;
      y[i] = static_cast<int>(UniformIndex(rng, 2));
    }
    y[0] = 1;
    y[1] = 0;
    EXPECT_EQ(Auc(s, y), PairwiseAuc(s, y)) << "trial " << trial;
    EXPECT_NEAR(KsStatistic(s, y), BruteKs(s, y), 1e-12) << "trial " << trial;
  }
}

TEST(MetricsTest, Errors) {
  EXPECT_EQ(CodeOf([] { Evaluate(std::vector<double>{0.1}, std::vector<int>{1, 0}); }),
            ErrorCode::kLengthMismatch);
  EXPECT_EQ(CodeOf([] { Auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}); }),
            ErrorCode::kSingleClassLabels);
  EXPECT_EQ(CodeOf([] { KsStatistic(std::vector<double>{0.1, 0.2}, std::vector<int>{0, 0}); }),
            ErrorCode::kSingleClassLabels);
}

TEST(LocalLrTest, GradientMatchesFiniteDifferences) {
  auto data = testing::MakeVerticalData({.rows = 80, .host_features = 4, .guest_features = 1});
  Matrix x = data.host->features();
  x.conservativeResize(Eigen::NoChange, x.cols() + 1);
  x.col(x.cols() - 1).setOnes();
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    Vector w(x.cols());
    for (Eigen::Index j = 0; j < w.size(); ++j) w(j) = StandardNormal(rng);
    const Vector g = LogLossGradient(x, data.labels, w);
    for (Eigen::Index j = 0; j < w.size(); ++j) {
      const double h = 1e-5;
      Vector up = w, down = w;
      up(j) += h;
      down(j) -= h;
      const double fd = (LogLoss(x, data.labels, up) - LogLoss(x, data.labels, down)) / (2 * h);
      EXPECT_LE(std::abs(fd - g(j)), 1e-6 * std::max(1e-3, std::abs(g(j)))) << j;
    }
  }
}

TEST(LocalLrTest, SeparableSetValidatesPerfectly) {
  auto data = testing::MakeVerticalData({.rows = 200, .host_features = 2, .guest_features = 0,
                                         .seed = 9, .separable = true, .margin = 0.5});
  const std::vector<std::string> train(data.ids.begin(), data.ids.begin() + 120);
  const std::vector<std::string> val(data.ids.begin() + 120, data.ids.end());
  const auto record = TrainLocal(*data.host, {"h0", "h1"}, train, val, {});
  ASSERT_TRUE(record.metrics.has_value());
  EXPECT_EQ(record.metrics->accuracy, 1.0);
  EXPECT_EQ(record.metrics->auc, 1.0);
  EXPECT_EQ(record.kind, ModelKind::kLocal);
  EXPECT_FALSE(record.iteration_log.empty());
  // Predictions survive a trip through the record.
  const auto model = LocalModel::Fit(*data.host, {"h0", "h1"}, train, {});
  const auto again = LocalModel::FromRecord(record);
  EXPECT_EQ(model.Predict(*data.host, val), again.Predict(*data.host, val));
}

TEST(LocalLrTest, ZeroIterationsGivesCoinFlip) {
  auto data = testing::MakeVerticalData({.rows = 60, .host_features = 3, .guest_features = 0});
  LocalTrainConfig config;
  config.max_iterations = 0;
  const auto record = TrainLocal(*data.host, {"h0", "h1", "h2"}, data.ids, data.ids, config);
  for (double w : record.weights) EXPECT_EQ(w, 0.0);
  EXPECT_EQ(record.metrics->auc, 0.5);
  EXPECT_TRUE(record.iteration_log.empty());
}

TEST(LocalLrTest, SingleClassIsRejected) {
  const std::vector<std::string> ids = {"a", "b", "c"};
  Matrix x(3, 1);
  x << 1, 2, 3;
  auto t = party_data::PartyTable::Create(Role::kHost, ids, {"f"}, x, std::vector<int>{1, 1, 1});
  EXPECT_EQ(CodeOf([&] { TrainLocal(t, {"f"}, ids, {}, {}); }), ErrorCode::kSingleClassLabels);
}

ModelRecord RecordWithAuc(ModelKind kind, double auc) {
  ModelRecord r;
  r.kind = kind;
  r.metrics = Metrics{0.7, 0.5, 0.3, auc};
  r.weights = {0.25, -1.5};
  r.config = {{"learning_rate", 0.1}};
  r.iteration_log = {{0, 0.69, 0.1, 3, 1024}};
  return r;
}

TEST(RegistryTest, AppendAndList) {
  ModelRegistry reg;
  const auto id = reg.Append(RecordWithAuc(ModelKind::kLocal, 0.68));
  const auto list = reg.List();
  ASSERT_EQ(list.size(), 1u);
  EXPECT_EQ(list[0].model_id, id);
  EXPECT_EQ(list[0].timestamp, "t000001");
  EXPECT_FALSE(list[0].delta.has_value());
}

TEST(RegistryTest, DeltaAgainstPreviousOfSameKind) {
  ModelRegistry reg;
  reg.Append(RecordWithAuc(ModelKind::kVfl, 0.70));
  reg.Append(RecordWithAuc(ModelKind::kLocal, 0.60));
  reg.Append(RecordWithAuc(ModelKind::kVfl, 0.78));
  const auto list = reg.List();
  ASSERT_EQ(list.size(), 3u);
  EXPECT_FALSE(list[1].delta.has_value());
  ASSERT_TRUE(list[2].delta.has_value());
  EXPECT_NEAR(list[2].delta->auc, 0.08, 1e-12);
  EXPECT_EQ(list[2].delta->accuracy, 0.0);
}

TEST(RegistryTest, PersistedAndReloaded) {
  const auto path = std::filesystem::temp_directory_path() / "vfl_registry_test.jsonl";
  std::filesystem::remove(path);
  {
    auto reg = ModelRegistry::Open(path);
    reg.Append(RecordWithAuc(ModelKind::kLocal, 0.61));
    reg.Append(RecordWithAuc(ModelKind::kVfl, 0.72));
  }
  auto reloaded = ModelRegistry::Open(path);
  ASSERT_EQ(reloaded.List().size(), 2u);
  ModelRegistry fresh;
  fresh.Append(RecordWithAuc(ModelKind::kLocal, 0.61));
  fresh.Append(RecordWithAuc(ModelKind::kVfl, 0.72));
  EXPECT_EQ(nlohmann::json(reloaded.List()), nlohmann::json(fresh.List()));
  EXPECT_EQ(nlohmann::json(reloaded.Records()), nlohmann::json(fresh.Records()));

  // Each line carries the documented keys.
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  const auto j = nlohmann::json::parse(line);
  for (const char* key : {"model_id", "kind", "metrics", "config", "timestamp"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  // Appends continue after the existing lines.
  reloaded.Append(RecordWithAuc(ModelKind::kVfl, 0.75));
  EXPECT_EQ(reloaded.List().back().timestamp, "t000003");
  EXPECT_EQ(ModelRegistry::Open(path).List().size(), 3u);
  EXPECT_EQ(CodeOf([&] {
              auto r = RecordWithAuc(ModelKind::kVfl, 0.1);
              r.model_id = reloaded.List()[0].model_id;
              reloaded.Append(r);
            }),
            ErrorCode::kConflict);
}

}  // namespace
}  // namespace vfl::models
