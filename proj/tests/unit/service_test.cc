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

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "gtest/gtest.h"
#include "synthetic.h"
#include "vfl/service/credit.h"
#include "vfl/service/experiments.h"
#include "vfl/service/http_server.h"
#include "vfl/service/workbench.h"

// After Eigen: <resolv.h>, pulled in here, defines an _res macro.
#include <httplib.h>

namespace vfl::service {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vfl_service_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json DataBody(size_t rows = 240, size_t host_features = 4, size_t guest_features = 3) {
  testing::SyntheticSpec spec;
  spec.rows = rows;
  spec.host_features = host_features;
  spec.guest_features = guest_features;
  spec.seed = 31;
  const auto data = testing::MakeVerticalData(spec);
  return {{"host_csv", party_data::TableToCsv(*data.host)},
          {"guest_csv", party_data::TableToCsv(*data.guest)},
          {"salt", "pepper"},
          {"train_fraction", 0.6},
          {"validation_fraction", 0.2},
          {"seed", 5},
          {"key_bits", 512}};
}

// A live server on a free port for the duration of a test.
class LiveServer {
 public:
  explicit LiveServer(Workbench& wb) : server_(wb) {
    port_ = server_.Bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_.Serve(); });
    server_.WaitUntilReady();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    client_->set_read_timeout(600, 0);
  }
  ~LiveServer() {
    server_.Stop();
    thread_.join();
  }

  std::pair<int, json> Call(const std::string& method, const std::string& path,
                            const json& body = json::object()) {
    httplib::Result r;
    const std::string text = body.dump();
    if (method == "GET") r = client_->Get(path);
    if (method == "POST") r = client_->Post(path, text, "application/json");
    if (method == "PUT") r = client_->Put(path, text, "application/json");
    EXPECT_TRUE(r) << method << " " << path;
    if (!r) return {0, nullptr};
    const bool is_json = r->get_header_value("Content-Type") == "application/json";
    json parsed = is_json ? json::parse(r->body) : json(r->body);
    return {r->status, parsed};
  }

  json Poll(const std::string& sid, const std::string& job) {
    for (;;) {
      auto [status, j] = Call("GET", "/sessions/" + sid + "/train/" + job + "/progress");
      EXPECT_EQ(status, 200);
      if (j.at("state") != "running") return j;
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
  }

 private:
  HttpServer server_;
  int port_ = -1;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

TEST(ServiceTest, StatusMapping) {
  EXPECT_EQ(HttpStatus(ErrorCode::kNotFound), 404);
  EXPECT_EQ(HttpStatus(ErrorCode::kConflict), 409);
  EXPECT_EQ(HttpStatus(ErrorCode::kRateOutOfRange), 422);
  EXPECT_EQ(HttpStatus(ErrorCode::kModelMissing), 422);
}

TEST(ServiceTest, EndToEndOverHttp) {
  Workbench wb;
  LiveServer http(wb);
  auto [created, session] = http.Call("POST", "/sessions");
  EXPECT_EQ(created, 201);
  const std::string sid = session.at("session_id");
  const std::string base = "/sessions/" + sid;

  EXPECT_EQ(http.Call("GET", "/sessions/missing/models").first, 404);
  EXPECT_EQ(http.Call("POST", base + "/inference/route").second["error"]["code"], "InvalidArgument");

  json bad = DataBody();
  bad["train_fraction"] = 0.9;
  auto [bad_status, bad_body] = http.Call("POST", base + "/data", bad);
  EXPECT_EQ(bad_status, 422);
  EXPECT_EQ(bad_body["error"]["code"], "FractionOutOfRange");
  bad = DataBody();
  bad.erase("host_csv");
  bad["host_path"] = "/nonexistent/host.csv";
  EXPECT_EQ(http.Call("POST", base + "/data", bad).second["error"]["code"], "DatasetMissing");

  auto [loaded_status, loaded] = http.Call("POST", base + "/data", DataBody());
  ASSERT_EQ(loaded_status, 200) << loaded.dump();
  EXPECT_EQ(loaded["aligned"], 240);
  EXPECT_EQ(loaded["train"], 144);
  EXPECT_EQ(loaded["validation"], 48);
  EXPECT_EQ(loaded["prediction"], 48);

  auto [fs_status, feats] = http.Call("GET", base + "/features");
  ASSERT_EQ(fs_status, 200) << feats.dump();
  EXPECT_EQ(feats["importance"]["feature_names"].size(), 4u);
  EXPECT_EQ(feats["external"]["anonymous_feature_ids"], json({"ext_00", "ext_01", "ext_02"}));
  EXPECT_EQ(http.Call("PUT", base + "/features/selection", {{"local", {"nope"}}}).first, 422);
  auto [sel_status, sel] = http.Call("PUT", base + "/features/selection",
                                     {{"local", {"h0", "h1", "h2"}}, {"external", {"ext_00", "ext_02"}}});
  EXPECT_EQ(sel_status, 200);
  EXPECT_EQ(http.Call("GET", base + "/features").second["importance"]["selected"],
            json({true, true, true, false}));

  EXPECT_EQ(http.Call("GET", base + "/clusters").second["error"]["code"], "ClusterModelMissing");
  auto [cl_status, cl_job] =
      http.Call("POST", base + "/clusters", {{"method", "pca"}, {"k_max", 6}, {"seed", 3}});
  EXPECT_EQ(cl_status, 202);
  EXPECT_EQ(http.Poll(sid, cl_job["job_id"])["state"], "succeeded");
  auto [g_status, clusters] = http.Call("GET", base + "/clusters");
  ASSERT_EQ(g_status, 200);
  const int k = clusters["train"]["k"];
  EXPECT_GE(k, 1);
  EXPECT_FALSE(clusters["prediction"].is_null());

  std::vector<double> rates(11, 1.2);
  auto [rate_status, rate_body] = http.Call("PUT", base + "/sampling/0", {{"rates", rates}});
  EXPECT_EQ(rate_status, 422);
  EXPECT_EQ(rate_body["error"]["code"], "RateOutOfRange");
  EXPECT_EQ(http.Call("PUT", base + "/sampling/99", {{"rates", std::vector<double>(11, 1.0)}}).first,
            404);
  // Zeroing every ring of cluster 0 removes exactly its members.
  auto [zero_status, zero] =
      http.Call("PUT", base + "/sampling/0", {{"rates", std::vector<double>(11, 0.0)}});
  ASSERT_EQ(zero_status, 200) << zero.dump();
  const size_t cluster0 = clusters["train"]["model"]["clusters"][0]["size"];
  EXPECT_EQ(zero["sample_count"].get<size_t>(), 144 - cluster0);
  EXPECT_TRUE(zero.contains("homogeneity"));
  EXPECT_TRUE(zero.contains("diversity"));
  EXPECT_EQ(http.Call("PUT", base + "/sampling/0", {{"rates", std::vector<double>(11, 1.0)}})
                .second["sample_count"],
            144);

  EXPECT_EQ(http.Call("POST", base + "/inference/route").second["error"]["code"], "ModelMissing");
  auto [lt_status, lt] = http.Call("POST", base + "/train", {{"kind", "local"}, {"max_iterations", 300}});
  EXPECT_EQ(lt_status, 202);
  const json local_job = http.Poll(sid, lt["job_id"]);
  ASSERT_EQ(local_job["state"], "succeeded") << local_job.dump();
  EXPECT_FALSE(local_job["progress"].empty());

  auto [vt_status, vt] = http.Call("POST", base + "/train",
                                   {{"kind", "vfl"}, {"max_iterations", 15}, {"learning_rate", 0.3}});
  EXPECT_EQ(vt_status, 202);
  // A second long job is refused while the first runs.
  auto [conflict_status, conflict] = http.Call("POST", base + "/train", {{"kind", "local"}});
  EXPECT_EQ(conflict_status, 409);
  EXPECT_EQ(conflict["error"]["code"], "Conflict");
  const json vfl_job = http.Poll(sid, vt["job_id"]);
  ASSERT_EQ(vfl_job["state"], "succeeded") << vfl_job.dump();
  ASSERT_EQ(vfl_job["progress"].size(), 15u);
  for (size_t i = 0; i < 15; ++i) EXPECT_EQ(vfl_job["progress"][i]["iteration"], i);
  EXPECT_EQ(http.Call("GET", base + "/train/job-9999/progress").first, 404);

  auto [m_status, models] = http.Call("GET", base + "/models");
  EXPECT_EQ(m_status, 200);
  ASSERT_EQ(models["models"].size(), 2u);
  EXPECT_EQ(models["models"][0]["kind"], "local");
  EXPECT_EQ(models["models"][1]["kind"], "vfl");

  auto [r_status, route] = http.Call("POST", base + "/inference/route");
  ASSERT_EQ(r_status, 200) << route.dump();
  const size_t trust = route["summary"]["trust_local"];
  const size_t send = route["summary"]["send_to_vfl"];
  EXPECT_EQ(trust + send, 48u);
  EXPECT_FALSE(route["sankey"].empty());
  size_t hist_total = 0;
  for (const auto& c : route["combo_histogram"]) hist_total += c.get<size_t>();
  EXPECT_EQ(hist_total, 144u);
  double decision_weight = 0;
  for (const auto& f : route["sankey"]) {
    if (f["to"].get<std::string>().rfind("decision:", 0) == 0) decision_weight += f["weight"].get<double>();
  }
  EXPECT_EQ(decision_weight, 48.0);

  auto [p_status, predicted] = http.Call("POST", base + "/inference/predict");
  EXPECT_EQ(p_status, 200);
  EXPECT_EQ(predicted["count"], send);
  auto [e_status, eval] = http.Call("POST", base + "/inference/evaluate");
  EXPECT_EQ(e_status, 200);
  EXPECT_EQ(eval["trust_local_count"], trust);
  EXPECT_EQ(eval["vfl_route_count"], send);
}

TEST(ServiceTest, SnapshotReloadIsByteIdentical) {
  Workbench wb;
  const std::string sid = wb.CreateSession().at("session_id");
  wb.LoadData(sid, DataBody(200));
  wb.Features(sid);
  wb.SetSelection(sid, {{"local", {"h0", "h1", "h3"}}});
  wb.StartClusters(sid, {{"method", "tsne"}, {"k_max", 5}, {"iterations", 300}, {"perplexity", 10}});
  wb.WaitIdle(sid);
  wb.SetSampling(sid, 0, {{"rates", std::vector<double>{1, 1, 0.5, 0.5, 0.2, 0.2, 0, 0, 1, 1, 1}}});
  wb.StartTraining(sid, {{"kind", "local"}, {"max_iterations", 100}});
  wb.WaitIdle(sid);
  wb.StartTraining(sid, {{"kind", "vfl"}, {"max_iterations", 5}});
  wb.WaitIdle(sid);
  wb.Route(sid, json::object());
  wb.EvaluateRouted(sid);

  const fs::path dir = TempDir("snapshot");
  const json manifest = wb.Snapshot(sid, dir);
  EXPECT_EQ(manifest["artifacts"].size(), 7u);
  const json reloaded = wb.Reload(dir);
  EXPECT_NE(reloaded["session_id"], sid);
  EXPECT_EQ(reloaded["artifacts_verified"].size(), 7u);
  const auto a = wb.Artifacts(sid);
  const auto b = wb.Artifacts(reloaded["session_id"]);
  ASSERT_EQ(a.size(), b.size());
  for (const auto& [name, bytes] : a) EXPECT_EQ(bytes, b.at(name)) << name;

  // A tampered artifact is caught.
  {
    std::ofstream out(dir / "sampling.json", std::ios::app);
    out << " ";
  }
  try {
    wb.Reload(dir);
    ADD_FAILURE() << "tampered snapshot reloaded";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConflict);
  }
}

// Writes a raw file in the public credit layout: caption row, header row,
// 23 features and the default flag.
fs::path WriteCreditLike(const fs::path& dir, size_t rows) {
  testing::SyntheticSpec spec;
  spec.rows = rows;
  spec.host_features = kCreditHostFeatures;
  spec.guest_features = kCreditFeatures - kCreditHostFeatures;
  spec.seed = 77;
  const auto data = testing::MakeVerticalData(spec);
  const fs::path raw = dir / kCreditRawFile;
  std::ofstream out(raw);
  out << ",X1,X2,X3,X4,X5,X6,X7,X8,X9,X10,X11,X12,X13,X14,X15,X16,X17,X18,X19,X20,X21,X22,X23,Y\n";
  out << "ID";
  for (size_t j = 1; j <= kCreditFeatures; ++j) out << ",F" << j;
  out << ",default payment next month\n";
  out.precision(17);
  for (size_t i = 0; i < rows; ++i) {
    out << (i + 1);
    for (Eigen::Index j = 0; j < 14; ++j) out << ',' << data.host->features()(static_cast<Eigen::Index>(i), j);
    for (Eigen::Index j = 0; j < 9; ++j) out << ',' << data.guest->features()(static_cast<Eigen::Index>(i), j);
    out << ',' << data.labels[i] << "\r\n";
  }
  return raw;
}

TEST(ServiceTest, CreditSplitLayout) {
  const fs::path dir = TempDir("credit_split");
  EXPECT_THROW(LocateCredit(dir), Error);
  try {
    LocateCredit(dir);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDatasetMissing);
  }
  WriteCreditLike(dir, 50);
  const auto files = LocateCredit(dir);
  const auto host = party_data::LoadTable(files.host, Role::kHost, std::string("label"));
  const auto guest = party_data::LoadTable(files.guest, Role::kGuest, std::nullopt);
  EXPECT_EQ(host.rows(), 50u);
  EXPECT_EQ(host.feature_names().size(), 14u);
  EXPECT_EQ(host.feature_names().front(), "F1");
  EXPECT_EQ(guest.feature_names().size(), 9u);
  EXPECT_EQ(guest.feature_names().front(), "F15");
  EXPECT_EQ(host.sample_ids(), guest.sample_ids());
}

TEST(ServiceTest, DefaultConfigTableShape) {
  const fs::path dir = TempDir("credit_table");
  WriteCreditLike(dir, 700);
  ExperimentConfig config = DefaultCreditConfig(dir);
  ASSERT_EQ(config.experiments.size(), 5u);
  const auto round = ParseExperimentConfig(ToJson(config));
  EXPECT_EQ(ToJson(round), ToJson(config));
  config.data["key_bits"] = 512;
  config.train_vfl["max_iterations"] = 5;
  config.train_local["max_iterations"] = 200;
  config.experiments[4].samples = 150;
  Workbench wb;
  const auto run = RunExperiments(wb, config);
  ASSERT_EQ(run.rows.size(), 5u);
  EXPECT_EQ(run.rows[0].kind, "local");
  EXPECT_EQ(run.rows[0].local_features, 14u);
  EXPECT_EQ(run.rows[0].external_features, 0u);
  EXPECT_EQ(run.rows[4].samples, 150u);
  for (size_t i = 2; i < 5; ++i) {
    EXPECT_LE(run.rows[i].local_features, run.rows[i - 1].local_features);
    EXPECT_LE(run.rows[i].external_features, run.rows[i - 1].external_features);
    EXPECT_LE(run.rows[i].samples, run.rows[i - 1].samples);
  }
  EXPECT_EQ(run.rows[3].local_features, 9u);
  EXPECT_EQ(run.rows[3].external_features, 6u);
  for (const auto& r : run.rows) EXPECT_TRUE(r.auc.has_value());
  const std::string csv = RowsToCsv(run.rows);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
}

TEST(ServiceTest, CliAndApiWriteTheSameRegistry) {
  const fs::path dir = TempDir("cli_api");
  const fs::path raw = WriteCreditLike(dir, 400);
  const auto files = SplitCredit(raw, dir);
  ExperimentConfig config = DefaultCreditConfig(dir);
  config.data["key_bits"] = 512;
  config.train_local["max_iterations"] = 150;
  config.train_vfl["max_iterations"] = 4;
  config.experiments[4].samples = 90;
  const fs::path config_path = dir / "exp.json";
  std::ofstream(config_path) << ToJson(config).dump(2);

  const fs::path registry_path = dir / "cli_registry.jsonl";
  const std::string cmd = std::string(VFL_WORKBENCH_BIN) + " run --config " +
                          config_path.string() + " --out " + (dir / "results.csv").string() +
                          " --registry " + registry_path.string() + " > /dev/null";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  const std::string cli_registry = Slurp(registry_path);
  EXPECT_EQ(std::count(cli_registry.begin(), cli_registry.end(), '\n'), 5);

  // The same run scripted step by step against the HTTP API.
  Workbench wb;
  LiveServer http(wb);
  const std::string sid = http.Call("POST", "/sessions").second["session_id"];
  const std::string base = "/sessions/" + sid;
  ASSERT_EQ(http.Call("POST", base + "/data", config.data).first, 200);
  const json feats = http.Call("GET", base + "/features").second;
  auto top = [](const json& names, const json& scores, std::optional<size_t> k) {
    std::vector<std::pair<double, size_t>> order;
    for (size_t i = 0; i < names.size(); ++i) order.push_back({-scores[i].get<double>(), i});
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    json out = json::array();
    for (size_t i = 0; i < std::min(k.value_or(names.size()), names.size()); ++i) {
      out.push_back(names[order[i].second]);
    }
    return out;
  };
  bool clustered = false, sampled = false;
  for (const auto& e : config.experiments) {
    json local = top(feats["importance"]["feature_names"], feats["importance"]["average"],
                     e.local_features);
    json ext = e.kind == "local" ? json::array()
                                 : top(feats["external"]["anonymous_feature_ids"],
                                       feats["external"]["iv"], e.external_features);
    ASSERT_EQ(http.Call("PUT", base + "/features/selection", {{"local", local}, {"external", ext}}).first,
              200);
    if (e.samples) {
      if (!clustered) {
        http.Poll(sid, http.Call("POST", base + "/clusters", config.clusters).second["job_id"]);
        clustered = true;
      }
      ASSERT_EQ(http.Call("PUT", base + "/sampling", {{"target", *e.samples}}).first, 200);
      sampled = true;
    } else if (sampled) {
      http.Call("PUT", base + "/sampling", {{"target", nullptr}});
      sampled = false;
    }
    json body = e.kind == "local" ? config.train_local : config.train_vfl;
    body["kind"] = e.kind;
    const json job = http.Poll(sid, http.Call("POST", base + "/train", body).second["job_id"]);
    ASSERT_EQ(job["state"], "succeeded") << job.dump();
  }
  const auto api_registry = http.Call("GET", base + "/registry").second.get<std::string>();
  EXPECT_EQ(api_registry, cli_registry);
  (void)files;
}

}  // namespace
}  // namespace vfl::service
