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

// Credit-data acceptance: the local-vs-VFL gap and routing efficacy on the
// default-of-credit-card-clients table. The data is looked up in
// $VFL_DATA_DIR (default ./data); without it both criteria report FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "vfl/common/error.h"
#include "vfl/service/credit.h"
#include "vfl/service/experiments.h"
#include "vfl/service/workbench.h"

namespace vfl::acceptance {
namespace {

using nlohmann::json;

constexpr double kMinAucGain = 0.03;
constexpr double kMaxSeconds = 30 * 60;
constexpr double kMinTrustAgreement = 0.85;
constexpr int kKeyBits = 512;
constexpr int kLocalIterations = 500;
constexpr int kVflIterations = 60;

void Report(bool pass, int id, const char* what, const std::string& detail) {
  std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id, what, detail.c_str());
  std::fflush(stdout);
}

struct Table {
  std::vector<std::string> header;
  std::map<std::string, std::vector<double>> rows;  // id -> all columns after id
};

Table ReadCsv(const std::string& path) {
  std::ifstream in(path);
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell, id;
    std::getline(ss, id, ',');
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      t.header = cells;
      first = false;
      continue;
    }
    std::vector<double> v;
    for (const auto& c : cells) v.push_back(std::stod(c));
    t.rows[id] = std::move(v);
  }
  return t;
}

struct OracleDecision {
  std::string nn_id;
  double distance;
  bool trust_local;
};

// Brute-force nearest neighbour over population z-scores fitted on the
// training rows; ties break toward the smaller id.
std::vector<OracleDecision> OracleRoute(const Table& host, const std::vector<size_t>& cols,
                                        const json& annotations, const json& decisions) {
  std::vector<std::string> train_ids;
  std::map<std::string, int> combo, train_local;
  for (const auto& a : annotations) {
    const std::string id = a.at("id");
    train_ids.push_back(id);
    combo[id] = a.at("combo");
  }
  std::sort(train_ids.begin(), train_ids.end());
  const size_t d = cols.size();
  std::vector<double> mean(d, 0), sd(d, 0);
  for (const auto& id : train_ids) {
    for (size_t c = 0; c < d; ++c) mean[c] += host.rows.at(id)[cols[c]];
  }
  for (auto& m : mean) m /= static_cast<double>(train_ids.size());
  for (const auto& id : train_ids) {
    for (size_t c = 0; c < d; ++c) {
      const double e = host.rows.at(id)[cols[c]] - mean[c];
      sd[c] += e * e;
    }
  }
  for (auto& s : sd) {
    s = std::sqrt(s / static_cast<double>(train_ids.size()));
    if (s == 0) s = 1;
  }
  auto z = [&](const std::string& id) {
    std::vector<double> out(d);
    for (size_t c = 0; c < d; ++c) out[c] = (host.rows.at(id)[cols[c]] - mean[c]) / sd[c];
    return out;
  };
  std::vector<std::vector<double>> train;
  for (const auto& id : train_ids) train.push_back(z(id));

  std::vector<OracleDecision> out;
  for (const auto& dec : decisions) {
    const auto p = z(dec.at("id").get<std::string>());
    double best = INFINITY;
    size_t arg = 0;
    for (size_t t = 0; t < train.size(); ++t) {
      double s = 0;
      for (size_t c = 0; c < d; ++c) s += (p[c] - train[t][c]) * (p[c] - train[t][c]);
      if (s < best) {
        best = s;
        arg = t;
      }
    }
    const int local = dec.at("local_pred");
    const int c = combo.at(train_ids[arg]);
    out.push_back({train_ids[arg], std::sqrt(best), c == 7 * local});
  }
  return out;
}

int Run() {
  const auto start = std::chrono::steady_clock::now();
  service::CreditFiles files;
  try {
    files = service::LocateCredit(service::DataDir());
  } catch (const Error& e) {
    const std::string why = e.what();
    Report(false, 8, "credit data: VFL AUC exceeds local-only AUC", why);
    Report(false, 9, "credit data: routing efficacy", why);
    return 1;
  }

  auto config = service::DefaultCreditConfig(service::DataDir());
  config.data["key_bits"] = kKeyBits;
  config.train_local["max_iterations"] = kLocalIterations;
  config.train_vfl["max_iterations"] = kVflIterations;
  config.experiments.resize(2);  // local-only and full VFL

  service::Workbench wb;
  bool ok8 = false;
  std::string sid;
  try {
    const auto run = service::RunExperiments(wb, config);
    sid = run.session_id;
    const double local_auc = run.rows.at(0).auc.value_or(NAN);
    const double vfl_auc = run.rows.at(1).auc.value_or(NAN);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ok8 = vfl_auc - local_auc >= kMinAucGain && secs <= kMaxSeconds;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "local AUC %.4f, VFL AUC %.4f, gain %.4f, %.0f s", local_auc,
                  vfl_auc, vfl_auc - local_auc, secs);
    Report(ok8, 8, "credit data: VFL AUC exceeds local-only AUC", buf);
  } catch (const std::exception& e) {
    Report(false, 8, "credit data: VFL AUC exceeds local-only AUC", e.what());
    Report(false, 9, "credit data: routing efficacy", "no models to route with");
    return 1;
  }

  bool ok9 = false;
  try {
    const json route = wb.Route(sid, {{"sankey", false}, {"annotations", true}});
    const json eval = wb.EvaluateRouted(sid);

    std::string local_id;
    std::vector<std::string> features;
    std::stringstream lines(wb.RegistryJsonLines(sid));
    for (std::string line; std::getline(lines, line);) {
      const auto rec = json::parse(line);
      if (rec.at("kind") == "local") rec.at("host_features").get_to(features);
    }
    const Table host = ReadCsv(files.host.string());
    std::vector<size_t> cols;
    for (const auto& f : features) {
      cols.push_back(static_cast<size_t>(
          std::find(host.header.begin(), host.header.end(), f) - host.header.begin()));
    }
    const auto oracle = OracleRoute(host, cols, route.at("annotations"), route.at("decisions"));
    size_t same = 0;
    const auto& decisions = route.at("decisions");
    for (size_t i = 0; i < oracle.size(); ++i) {
      const auto& d = decisions[i];
      same += d.at("nn_id") == oracle[i].nn_id &&
              (d.at("decision") == "trust_local") == oracle[i].trust_local;
    }
    const bool have_both =
        !eval.at("trust_local_agreement").is_null() && !eval.at("vfl_route_agreement").is_null();
    const double trust = have_both ? eval.at("trust_local_agreement").get<double>() : NAN;
    const double vfl = have_both ? eval.at("vfl_route_agreement").get<double>() : NAN;
    ok9 = have_both && trust >= vfl && trust >= kMinTrustAgreement && same == oracle.size();
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "trust_local agreement %.4f, send_to_vfl agreement %.4f, "
                  "%zu / %zu decisions match the brute-force oracle",
                  trust, vfl, same, oracle.size());
    Report(ok9, 9, "credit data: routing efficacy", buf);
  } catch (const std::exception& e) {
    Report(false, 9, "credit data: routing efficacy", e.what());
  }
  return ok8 && ok9 ? 0 : 1;
}

}  // namespace
}  // namespace vfl::acceptance

int main() { return vfl::acceptance::Run(); }
