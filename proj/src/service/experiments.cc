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

#include "vfl/service/experiments.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>

#include "vfl/service/credit.h"

namespace vfl::service {
namespace {

std::optional<size_t> Budget(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null() || j.at(key) == "all") return std::nullopt;
  return j.at(key).get<size_t>();
}

json BudgetJson(const std::optional<size_t>& b) { return b ? json(*b) : json("all"); }

// Names ordered by descending score, ties by original position.
std::vector<std::string> TopK(const std::vector<std::string>& names,
                              const std::vector<double>& scores, std::optional<size_t> k) {
  std::vector<size_t> order(names.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  const size_t n = std::min(k.value_or(names.size()), names.size());
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) out.push_back(names[order[i]]);
  return out;
}

ErrorCode CodeNamed(const std::string& name) {
  for (int c = 0; c <= static_cast<int>(ErrorCode::kDatasetMissing); ++c) {
    if (ErrorCodeName(static_cast<ErrorCode>(c)) == name) return static_cast<ErrorCode>(c);
  }
  return ErrorCode::kInvalidArgument;
}

std::string Fixed(std::optional<double> v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", *v);
  return buf;
}

}  // namespace

ExperimentConfig ParseExperimentConfig(const json& j) {
  ExperimentConfig c;
  c.data = j.at("data");
  c.clusters = j.value("clusters", json::object());
  c.train_local = j.value("train_local", json::object());
  c.train_vfl = j.value("train_vfl", json::object());
  for (const auto& e : j.at("experiments")) {
    ExperimentSpec spec;
    spec.name = e.at("name");
    spec.kind = e.value("kind", std::string("vfl"));
    VFL_ENFORCE(spec.kind == "local" || spec.kind == "vfl", ErrorCode::kInvalidArgument,
                "experiment kind must be local or vfl");
    spec.local_features = Budget(e, "local_features");
    spec.external_features = Budget(e, "external_features");
    spec.samples = Budget(e, "samples");
    c.experiments.push_back(std::move(spec));
  }
  return c;
}

json ToJson(const ExperimentConfig& c) {
  json experiments = json::array();
  for (const auto& e : c.experiments) {
    experiments.push_back({{"name", e.name},
                           {"kind", e.kind},
                           {"local_features", BudgetJson(e.local_features)},
                           {"external_features", BudgetJson(e.external_features)},
                           {"samples", BudgetJson(e.samples)}});
  }
  return {{"data", c.data},
          {"clusters", c.clusters},
          {"train_local", c.train_local},
          {"train_vfl", c.train_vfl},
          {"experiments", experiments}};
}

ExperimentConfig DefaultCreditConfig(const std::filesystem::path& data_dir) {
  const CreditFiles files = LocateCredit(data_dir);
  ExperimentConfig c;
  // 30,000 rows: 12,000 train + 3,000 validation model, 15,000 are predicted.
  c.data = {{"host_path", std::filesystem::absolute(files.host).string()},
            {"guest_path", std::filesystem::absolute(files.guest).string()},
            {"salt", "credit-demo"},
            {"train_fraction", 0.4},
            {"validation_fraction", 0.1},
            {"seed", 2023},
            {"key_bits", 1024}};
  c.clusters = {{"method", "pca"}, {"k_max", 10}, {"include_prediction", false}};
  c.train_local = {{"learning_rate", 0.1}, {"max_iterations", 2000}};
  c.train_vfl = {{"learning_rate", 0.1}, {"max_iterations", 200}};
  c.experiments = {{"exp1", "local", std::nullopt, 0, std::nullopt},
                   {"exp2", "vfl", std::nullopt, std::nullopt, std::nullopt},
                   {"exp3", "vfl", 9, std::nullopt, std::nullopt},
                   {"exp4", "vfl", 9, 6, std::nullopt},
                   {"exp5", "vfl", 9, 6, 2100}};
  return c;
}

ExperimentRun RunExperiments(Workbench& wb, const ExperimentConfig& config) {
  ExperimentRun run;
  run.session_id = wb.CreateSession().at("session_id");
  const std::string& sid = run.session_id;
  const json loaded = wb.LoadData(sid, config.data);
  const json features = wb.Features(sid);
  const auto& importance = features.at("importance");
  const auto& external = features.at("external");
  bool clustered = false;
  bool sampled = false;

  for (const auto& e : config.experiments) {
    const auto local = TopK(importance.at("feature_names"), importance.at("average"),
                            e.local_features);
    const auto ext = e.kind == "local"
                         ? std::vector<std::string>{}
                         : TopK(external.at("anonymous_feature_ids"), external.at("iv"),
                                e.external_features);
    wb.SetSelection(sid, {{"local", local}, {"external", ext}});

    size_t samples = loaded.at("train").get<size_t>();
    if (e.samples) {
      if (!clustered) {
        wb.StartClusters(sid, config.clusters);
        wb.WaitIdle(sid);
        clustered = true;
      }
      samples = wb.SampleToTarget(sid, {{"target", *e.samples}}).at("sample_count");
      sampled = true;
    } else if (sampled) {
      wb.SampleToTarget(sid, {{"target", nullptr}});
      sampled = false;
    }

    json body = e.kind == "local" ? config.train_local : config.train_vfl;
    body["kind"] = e.kind;
    const auto start = std::chrono::steady_clock::now();
    const std::string job = wb.StartTraining(sid, body).at("job_id");
    wb.WaitIdle(sid);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const json progress = wb.JobProgress(sid, job);
    if (progress.at("state") != "succeeded") {
      const auto& err = progress.at("error");
      throw Error(CodeNamed(err.at("code")),
                  e.name + " failed: " + err.at("message").get<std::string>());
    }
    ExperimentRow row;
    row.name = e.name;
    row.kind = e.kind;
    row.local_features = local.size();
    row.external_features = ext.size();
    row.samples = samples;
    row.model_id = progress.at("result").at("model_id");
    const auto& metrics = progress.at("result").at("metrics");
    if (!metrics.is_null()) {
      row.auc = metrics.at("auc").get<double>();
      row.accuracy = metrics.at("accuracy").get<double>();
    }
    row.seconds = seconds;
    run.rows.push_back(std::move(row));
  }
  return run;
}

std::string RowsToCsv(const std::vector<ExperimentRow>& rows) {
  std::string out = "name,kind,local_features,external_features,samples,model_id,auc,acc,seconds\n";
  for (const auto& r : rows) {
    char secs[32];
    std::snprintf(secs, sizeof(secs), "%.3f", r.seconds);
    out += r.name + ',' + r.kind + ',' + std::to_string(r.local_features) + ',' +
           std::to_string(r.external_features) + ',' + std::to_string(r.samples) + ',' +
           r.model_id + ',' + Fixed(r.auc) + ',' + Fixed(r.accuracy) + ',' + secs + '\n';
  }
  return out;
}

}  // namespace vfl::service
