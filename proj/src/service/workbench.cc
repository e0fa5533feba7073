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

#include "vfl/service/workbench.h"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "vfl/common/random.h"
#include "vfl/features/external_iv.h"
#include "vfl/features/importance.h"
#include "vfl/he/paillier.h"
#include "vfl/inference/router.h"
#include "vfl/models/local_lr.h"
#include "vfl/models/registry.h"
#include "vfl/party_data/alignment.h"
#include "vfl/party_data/party_table.h"
#include "vfl/protocol/session.h"
#include "vfl/samples/cluster_model.h"
#include "vfl/samples/embedding.h"
#include "vfl/samples/kmeans.h"
#include "vfl/samples/quality.h"

namespace vfl::service {
namespace {

using party_data::PartyTable;

// Stream salts for the session seed.
constexpr uint64_t kImportanceStream = 0x1001;
constexpr uint64_t kIvKeyStream = 0x1002;
constexpr uint64_t kIvRandomStream = 0x1003;
constexpr uint64_t kPlanStream = 0x1004;
constexpr uint64_t kVflStream = 0x2000;

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  VFL_ENFORCE(in.good(), ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  VFL_ENFORCE(out.good(), ErrorCode::kIoError, "cannot write " + path.string());
  out << bytes;
}

std::string Pretty(const json& j) { return j.dump(2) + "\n"; }

std::string NumberedId(const char* prefix, size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%04zu", prefix, n);
  return buf;
}

std::vector<size_t> RowsOf(const PartyTable& table, const std::vector<std::string>& ids) {
  std::vector<size_t> rows;
  rows.reserve(ids.size());
  for (const auto& id : ids) {
    auto row = table.RowOf(id);
    VFL_ENFORCE(row.has_value(), ErrorCode::kInvalidArgument, "id '" + id + "' not in table");
    rows.push_back(*row);
  }
  return rows;
}

// Wall-clock durations are measurements, not derived state. They are
// reported live through job progress and dropped from stored records so
// that replays and reruns produce identical registries.
void DropTimings(models::ModelRecord& record) {
  for (auto& it : record.iteration_log) it.wall_time_ms = 0;
}

struct ClusterBundle {
  std::vector<std::string> ids;
  samples::Embedding2D embedding;
  samples::ElbowResult elbow;
  samples::ClusterModel model;

  json ToJson(const std::vector<std::string>& feature_names) const {
    json coords = json::array();
    for (Eigen::Index i = 0; i < embedding.coords.rows(); ++i) {
      coords.push_back({embedding.coords(i, 0), embedding.coords(i, 1)});
    }
    return {{"k", model.k},
            {"wcss_by_k", elbow.wcss},
            {"ids", ids},
            {"coords", coords},
            {"model", samples::ClusterModelToJson(model, ids, feature_names)}};
  }

  std::map<std::string, int> Assignment() const {
    std::map<std::string, int> out;
    for (size_t i = 0; i < ids.size(); ++i) out[ids[i]] = model.assignment[i];
    return out;
  }
};

}  // namespace

int HttpStatus(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kConflict:
      return 409;
    default:
      return 422;
  }
}

struct Workbench::Job {
  std::string id;
  std::string kind;
  std::mutex mu;
  std::string state = "running";
  std::vector<models::IterationRecord> progress;
  json result;
  std::optional<std::pair<std::string, std::string>> error;

  json ToJson() {
    std::lock_guard lock(mu);
    json j = {{"job_id", id}, {"kind", kind}, {"state", state}, {"progress", progress},
              {"result", result}, {"error", nullptr}};
    if (error) j["error"] = {{"code", error->first}, {"message", error->second}};
    return j;
  }
};

struct Workbench::Session {
  std::string id;
  std::mutex mu;
  std::condition_variable idle;
  bool busy = false;
  std::atomic<bool> stopping{false};
  std::vector<std::thread> threads;
  std::map<std::string, std::shared_ptr<Job>> jobs;
  size_t next_job = 1;
  size_t vfl_runs = 0;

  std::vector<json> events;

  // Data.
  uint64_t seed = 0;
  unsigned key_bits = 1024;
  std::string salt;
  std::shared_ptr<const PartyTable> host;
  std::shared_ptr<const PartyTable> guest;
  size_t aligned = 0;
  std::optional<party_data::SplitSpec> split;

  // Feature lab.
  std::optional<features::ImportanceMatrix> importance;
  std::optional<features::ExternalIvReport> iv;
  std::vector<std::string> local_selection;
  std::vector<std::string> external_selection;

  // Sample lab.
  json cluster_request;
  std::optional<ClusterBundle> train_clusters;
  std::optional<ClusterBundle> pred_clusters;
  samples::SamplePlan plan;
  std::vector<std::string> pool;
  std::optional<samples::PoolQuality> quality;

  // Models and inference.
  models::ModelRegistry registry{models::LogicalClock()};
  std::optional<models::LocalModel> local;
  std::shared_ptr<protocol::VflSession> vfl;
  std::vector<std::string> vfl_train_ids;
  std::optional<inference::RoutingReport> routing;
  std::vector<inference::TrainAnnotation> annotations;
  std::optional<inference::RoutingEvaluation> evaluation;

  void RequireData() const {
    VFL_ENFORCE(host && guest && split, ErrorCode::kInvalidArgument, "no data loaded");
  }

  void RequireIdle() const {
    VFL_ENFORCE(!busy, ErrorCode::kConflict, "a job is already running");
  }

  std::vector<size_t> LocalColumns() const {
    std::vector<size_t> cols;
    for (const auto& name : local_selection) cols.push_back(host->ColumnOf(name));
    return cols;
  }

  // Selected host features on the given ids; all columns when nothing is
  // selected.
  Matrix HostMatrix(const std::vector<std::string>& ids) const {
    const Matrix rows = SelectRows(host->features(), RowsOf(*host, ids));
    return local_selection.empty() ? rows : SelectColumns(rows, LocalColumns());
  }

  std::vector<int> Labels(const std::vector<std::string>& ids) const {
    std::vector<int> y;
    for (size_t r : RowsOf(*host, ids)) y.push_back((*host->labels())[r]);
    return y;
  }

  void SyncSelected() {
    if (!importance) return;
    auto& m = *importance;
    for (size_t i = 0; i < m.feature_names.size(); ++i) {
      m.selected[i] = std::find(local_selection.begin(), local_selection.end(),
                                m.feature_names[i]) != local_selection.end();
    }
  }

  const std::vector<std::string>& TrainingIds() const {
    return pool.empty() ? split->train_ids : pool;
  }

  json QualityJson(std::optional<int> cluster_id) const {
    json j = *quality;
    if (cluster_id) j["cluster_id"] = *cluster_id;
    return j;
  }

  void CommitPlan(samples::SamplePlan candidate) {
    const auto& bundle = *train_clusters;
    const auto kept = samples::ApplyPlan(bundle.model.RingMembers(), candidate,
                                         bundle.model.ring_spec.n_rings);
    std::vector<std::string> ids;
    for (size_t i : kept) ids.push_back(bundle.ids[i]);
    quality = samples::ComputeQuality(kept, Labels(bundle.ids), HostMatrix(bundle.ids));
    plan = std::move(candidate);
    pool = std::move(ids);
  }
};

Workbench::Workbench(WorkbenchOptions options) : options_(std::move(options)) {}

Workbench::~Workbench() {
  std::vector<std::shared_ptr<Session>> all;
  {
    std::lock_guard lock(mu_);
    for (auto& [id, s] : sessions_) all.push_back(s);
  }
  for (auto& s : all) {
    s->stopping = true;
    std::vector<std::thread> threads;
    {
      std::lock_guard lock(s->mu);
      threads.swap(s->threads);
    }
    for (auto& t : threads) t.join();
  }
}

std::shared_ptr<Workbench::Session> Workbench::Find(const std::string& sid) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(sid);
  VFL_ENFORCE(it != sessions_.end(), ErrorCode::kNotFound, "unknown session '" + sid + "'");
  return it->second;
}

json Workbench::CreateSession() {
  auto s = std::make_shared<Session>();
  std::lock_guard lock(mu_);
  s->id = NumberedId("session", next_session_++);
  s->key_bits = options_.default_key_bits;
  sessions_[s->id] = s;
  return {{"session_id", s->id}};
}

json Workbench::LoadData(const std::string& sid, const json& body) {
  auto s = Find(sid);
  std::lock_guard lock(s->mu);
  s->RequireIdle();

  json event = body;
  auto text_of = [&](const std::string& side) {
    if (body.contains(side + "_csv")) return body.at(side + "_csv").get<std::string>();
    VFL_ENFORCE(body.contains(side + "_path"), ErrorCode::kInvalidArgument,
                side + "_csv or " + side + "_path is required");
    std::filesystem::path path = body.at(side + "_path").get<std::string>();
    if (path.is_relative()) path = options_.data_dir / path;
    VFL_ENFORCE(std::filesystem::exists(path), ErrorCode::kDatasetMissing,
                "data file " + path.string() + " not found");
    event.erase(side + "_path");
    std::string text = ReadFile(path);
    event[side + "_csv"] = text;
    return text;
  };
  const std::string host_csv = text_of("host");
  const std::string guest_csv = text_of("guest");
  const std::string label = body.value("label_column", std::string("label"));
  const std::string salt = body.value("salt", std::string());
  const double train_fraction = body.value("train_fraction", 0.6);
  const double validation_fraction = body.value("validation_fraction", 0.2);
  const uint64_t seed = body.value("seed", uint64_t{0});
  const unsigned key_bits = body.value("key_bits", options_.default_key_bits);

  auto host = std::make_shared<PartyTable>(party_data::ParseTable(host_csv, Role::kHost, label));
  auto guest =
      std::make_shared<PartyTable>(party_data::ParseTable(guest_csv, Role::kGuest, std::nullopt));
  VFL_ENFORCE(host->labels().has_value(), ErrorCode::kInvalidArgument,
              "host table needs the label column");
  const auto aligned = party_data::AlignEntities(host->sample_ids(), guest->sample_ids(), salt);
  auto split = party_data::Split(aligned, train_fraction, validation_fraction, seed);

  // Start over: everything derived from the previous data is dropped.
  const std::string id = s->id;
  s->seed = seed;
  s->key_bits = key_bits;
  s->salt = salt;
  s->host = host;
  s->guest = guest;
  s->aligned = aligned.size();
  s->split = std::move(split);
  s->importance.reset();
  s->iv.reset();
  s->local_selection = host->feature_names();
  s->external_selection.clear();
  for (size_t c = 0; c < guest->feature_names().size(); ++c) {
    s->external_selection.push_back(party_data::AnonymousFeatureId(c));
  }
  s->cluster_request = nullptr;
  s->train_clusters.reset();
  s->pred_clusters.reset();
  s->plan = {};
  s->pool.clear();
  s->quality.reset();
  s->registry = models::ModelRegistry(models::LogicalClock());
  s->local.reset();
  s->vfl.reset();
  s->vfl_train_ids.clear();
  s->routing.reset();
  s->annotations.clear();
  s->evaluation.reset();
  s->vfl_runs = 0;
  s->events.push_back({{"op", "data"}, {"body", event}});

  return {{"session_id", id},
          {"host_rows", host->rows()},
          {"guest_rows", guest->rows()},
          {"dropped_rows", {{"host", host->dropped_rows()}, {"guest", guest->dropped_rows()}}},
          {"aligned", s->aligned},
          {"train", s->split->train_ids.size()},
          {"validation", s->split->validation_ids.size()},
          {"prediction", s->split->prediction_ids.size()},
          {"host_features", host->feature_names()},
          {"external_features", s->external_selection}};
}

json Workbench::Features(const std::string& sid) {
  auto s = Find(sid);
  std::lock_guard lock(s->mu);
  s->RequireData();
  if (!s->importance) {
    const auto& ids = s->split->train_ids;
    const Matrix x = SelectRows(s->host->features(), RowsOf(*s->host, ids));
    auto matrix = features::BuildMatrix(s->host->feature_names(), x, s->Labels(ids),
                                        DeriveSeed(s->seed, kImportanceStream));
    const auto keys = he::Keygen(s->key_bits, DeriveSeed(s->seed, kIvKeyStream));
    auto rng = he::MakeRandom(DeriveSeed(s->seed, kIvRandomStream));
    s->iv = features::ExternalIv(*s->host, *s->guest, s->salt, ids, 10, keys, *rng);
    s->importance = std::move(matrix);
    s->events.push_back({{"op", "features"}});
  }
  s->SyncSelected();
  return {{"importance", *s->importance},
          {"external", *s->iv},
          {"selection", {{"local", s->local_selection}, {"external", s->external_selection}}}};
}

json Workbench::SetSelection(const std::string& sid, const json& body) {
  auto s = Find(sid);
  std::lock_guard lock(s->mu);
  s->RequireData();
  auto local = body.value("local", s->local_selection);
  auto external = body.value("external", s->external_selection);
  for (const auto& name : local) s->host->ColumnOf(name);
  const size_t guest_cols = s->guest->feature_names().size();
  for (const auto& anon : external) {
    bool known = false;
    for (size_t c = 0; c < guest_cols; ++c) known |= party_data::AnonymousFeatureId(c) == anon;
    VFL_ENFORCE(known, ErrorCode::kInvalidArgument, "unknown external feature '" + anon + "'");
  }
  s->local_selection = std::move(local);
  s->external_selection = std::move(external);
  s->SyncSelected();
  s->events.push_back({{"op", "selection"}, {"body", body}});
  return {{"local", s->local_selection}, {"external", s->external_selection}};
}

json Workbench::StartJob(const std::shared_ptr<Session>& s, const std::string& kind,
                         const json& event,
                         std::function<json(const std::shared_ptr<Job>&)> work) {
  // Caller holds s->mu.
  s->RequireIdle();
  auto job = std::make_shared<Job>();
  job->id = NumberedId("job", s->next_job++);
  job->kind = kind;
  s->jobs[job->id] = job;
  s->busy = true;
  s->events.push_back(event);
  s->threads.emplace_back([s, job, work = std::move(work)] {
    json result;
    std::optional<std::pair<std::string, std::string>> error;
    try {
      result = work(job);
    } catch (const Error& e) {
      error = {std::string(ErrorCodeName(e.code())), e.what()};
    } catch (const std::exception& e) {
      error = {"Internal", e.what()};
    }
    {
      std::lock_guard jl(job->mu);
      job->state = error ? "failed" : "succeeded";
      job->result = std::move(result);
      job->error = std::move(error);
    }
    std::lock_guard lock(s->mu);
    s->busy = false;
    s->idle.notify_all();
  });
  return {{"job_id", job->id}};
}

json Workbench::StartClusters(const std::string& sid, const json& body) {
  auto s = Find(sid);
  std::lock_guard lock(s->mu);
  s->RequireData();
  const auto method = samples::ParseEmbedMethod(body.value("method", std::string("tsne")));
  const uint64_t seed = body.value("seed", s->seed);
  const int k_max = body.value("k_max", 10);
  const std::optional<int> fixed_k =
      body.contains("k") ? std::optional<int>(body.at("k").get<int>()) : std::nullopt;
  const bool with_prediction = body.value("include_prediction", true);
  samples::TsneOptions tsne;
  tsne.perplexity = body.value("perplexity", tsne.perplexity);
  tsne.iterations = body.value("iterations", tsne.iterations);
  samples::RingSpec rings;
  if (body.contains("ring_spec")) rings = body.at("ring_spec").get<samples::RingSpec>();
  rings.Validate();

  struct Input {
    std::vector<std::string> ids;
    Matrix x;
    std::vector<int> labels;
  };
  Input train{s->split->train_ids, s->HostMatrix(s->split->train_ids),
              s->Labels(s->split->train_ids)};
  std::optional<Input> pred;
  if (with_prediction && !s->split->prediction_ids.empty()) {
    pred = Input{s->split->prediction_ids, s->HostMatrix(s->split->prediction_ids), {}};
  }

  auto build = [=](const Input& in) {
    ClusterBundle b;
    b.ids = in.ids;
    b.embedding = samples::Embed2D(in.x, method, seed, tsne);
    const int cap = std::min<int>(k_max, static_cast<int>(in.ids.size()) - 1);
    b.elbow = samples::ChooseKElbow(b.embedding.coords, cap, seed);
    const int k = fixed_k.value_or(b.elbow.k);
    b.model = samples::BuildClusterModel(b.embedding.coords, in.x, in.labels, k, seed, rings);
    return b;
  };
  const json event = {{"op", "clusters"}, {"body", body}};
  return StartJob(s, "clusters", event,
                  [s, train = std::move(train), pred = std::move(pred), build, body](
                      const std::shared_ptr<Job>&) {
                    ClusterBundle t = build(train);
                    std::optional<ClusterBundle> p;
                    if (pred) p = build(*pred);
                    std::lock_guard lock(s->mu);
                    s->cluster_request = body;
                    s->train_clusters = std::move(t);
                    s->pred_clusters = std::move(p);
                    s->plan = {};
                    s->pool.clear();
                    s->quality.reset();
                    json r = {{"train_k", s->train_clusters->model.k}};
                    if (s->pred_clusters) r["prediction_k"] = s->pred_clusters->model.k;
                    return r;
                  });
}

json Workbench::Clusters(const std::string& sid) {
  auto s = Find(sid);
  std::lock_guard lock(s->mu);
  if (!s->train_clusters) {
    VFL_ENFORCE(!s->busy, ErrorCode::kConflict, "clustering is still running");
    throw Error(ErrorCode::kClusterModelMissing, "no cluster model yet");
  }
  const auto& names = s->local_selection;
  json j = {{"request", s->cluster_request},
            {"train", s->train_clusters->ToJson(names)},
            {"prediction", nullptr}};
  if (s->pred_clusters) j["prediction"] = s->pred_clusters->ToJson(names);
  return j;
}

json Workbench::SetSampling(const std::string& sid, int cluster_id, const json& body) {
  auto s = Find(sid);
  std::lock_guard lock(s->mu);
  VFL_ENFORCE(s->train_clusters.has_value(), ErrorCode::kClusterModelMissing,
              "cluster the training set first");
  const auto& model = s->train_clusters->model;
  VFL_ENFORCE(cluster_id >= 0 && cluster_id < model.k, ErrorCode::kNotFound,
              "unknown cluster " + std::to_string(cluster_id));
  auto rates = body.at("rates").get<std::vector<double>>();
  VFL_ENFORCE(rates.size() == static_cast<size_t>(model.ring_spec.n_rings),
              ErrorCode::kInvalidArgument, "one rate per ring is required");
  samples::SamplePlan candidate = s->plan;
  candidate.seed = DeriveSeed(s->seed, kPlanStream);
  candidate.rates[cluster_id] = std::move(rates);
  s->CommitPlan(std::move(candidate));
  s->events.push_back({{"op", "sampling"}, {"cluster_id", cluster_id}, {"body", body}});
  return s->QualityJson(cluster_id);
}

json Workbench::SampleToTarget(const std::string& sid, const json& body) {
  auto s = Find(sid);
  std::lock_guard lock(s->mu);
  VFL_ENFORCE(s->train_clusters.has_value(), ErrorCode::kClusterModelMissing,
              "cluster the training set first");
  if (body.at("target").is_null()) {
    s->plan = {};
    s->pool.clear();
    s->quality.reset();
    s->events.push_back({{"op", "sampling_target"}, {"body", body}});
    return {{"sample_count", s->split->train_ids.size()}, {"homogeneity", nullptr},
            {"diversity", nullptr}};
  }
  const auto target = body.at("target").get<size_t>();
  s->CommitPlan(samples::PlanForTarget(s->train_clusters->model, target,
                                       DeriveSeed(s->seed, kPlanStream)));
  s->events.push_back({{"op", "sampling_target"}, {"body", body}});
  return s->QualityJson(std::nullopt);
}

json Workbench::StartTraining(const std::string& sid, const json& body) {
  auto s = Find(sid);
  std::lock_guard lock(s->mu);
  s->RequireData();
  const auto kind = models::ParseModelKind(body.value("kind", std::string("local")));
  const double lr = body.value("learning_rate", 0.1);
  const int max_iterations = body.value("max_iterations", 2000);
  const double tolerance = body.value("tolerance", 1e-5);
  const bool fit_intercept = body.value("fit_intercept", true);
  VFL_ENFORCE(lr > 0 && max_iterations >= 0, ErrorCode::kInvalidArgument,
              "learning_rate must be positive and max_iterations non-negative");
  const std::vector<std::string> train_ids = s->TrainingIds();
  const std::vector<std::string> validation = s->split->validation_ids;
  const auto local_sel = s->local_selection;
  const json event = {{"op", "train"}, {"body", body}};

  if (kind == models::ModelKind::kLocal) {
    VFL_ENFORCE(!local_sel.empty(), ErrorCode::kInvalidArgument, "no local features selected");
    models::LocalTrainConfig config;
    config.learning_rate = lr;
    config.max_iterations = max_iterations;
    config.tolerance = tolerance;
    config.fit_intercept = fit_intercept;
    auto host = s->host;
    return StartJob(s, "train_local", event, [=](const std::shared_ptr<Job>& job) {
      auto record = models::TrainLocal(*host, local_sel, train_ids, validation, config);
      {
        std::lock_guard jl(job->mu);
        job->progress = record.iteration_log;
      }
      DropTimings(record);
      std::lock_guard lock(s->mu);
      const std::string id = s->registry.Append(record);
      s->local = models::LocalModel::FromRecord(*s->registry.Get(id));
      json r = {{"model_id", id}, {"metrics", nullptr}};
      if (record.metrics) r["metrics"] = *record.metrics;
      return r;
    });
  }

  protocol::ProtocolConfig pc;
  pc.key_bits = s->key_bits;
  pc.test_seed = DeriveSeed(s->seed, kVflStream + s->vfl_runs++);
  pc.fit_intercept = fit_intercept;
  auto vfl = std::make_shared<protocol::VflSession>(s->host, s->guest, s->salt, pc);
  vfl->host().SelectFeatures(local_sel);
  vfl->guest().SelectAnonymous(s->external_selection);
  return StartJob(s, "train_vfl", event, [=](const std::shared_ptr<Job>& job) {
    // Nothing else sees `vfl` until it is installed below.
    protocol::TrainConfig tc;
    tc.learning_rate = lr;
    tc.max_iterations = max_iterations;
    tc.tolerance = tolerance;
    tc.on_iteration = [&job](const models::IterationRecord& it) {
      std::lock_guard jl(job->mu);
      job->progress.push_back(it);
    };
    tc.cancelled = [&s] { return s->stopping.load(); };
    auto record = protocol::TrainVfl(*vfl, train_ids, tc);
    if (!validation.empty()) {
      try {
        record.metrics = protocol::VerifyJoint(*vfl, validation);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kSingleClassLabels) throw;
      }
    }
    DropTimings(record);
    std::lock_guard lock(s->mu);
    const std::string id = s->registry.Append(record);
    s->vfl = vfl;
    s->vfl_train_ids = train_ids;
    s->routing.reset();
    s->evaluation.reset();
    json r = {{"model_id", id}, {"metrics", nullptr}};
    if (record.metrics) r["metrics"] = *record.metrics;
    return r;
  });
}

json Workbench::JobProgress(const std::string& sid, const std::string& job_id) {
  auto s = Find(sid);
  std::shared_ptr<Job> job;
  {
    std::lock_guard lock(s->mu);
    auto it = s->jobs.find(job_id);
    VFL_ENFORCE(it != s->jobs.end(), ErrorCode::kNotFound, "unknown job '" + job_id + "'");
    job = it->second;
  }
  return job->ToJson();
}

json Workbench::Models(const std::string& sid) {
  auto s = Find(sid);
  std::lock_guard lock(s->mu);
  return {{"models", s->registry.List()}};
}

json Workbench::Route(const std::string& sid, const json& body) {
  auto s = Find(sid);
  std::lock_guard lock(s->mu);
  s->RequireData();
  VFL_ENFORCE(s->local.has_value(), ErrorCode::kModelMissing, "train a local model first");
  VFL_ENFORCE(s->vfl != nullptr, ErrorCode::kModelMissing, "train a VFL model first");
  const bool have_clusters = s->train_clusters && s->pred_clusters;
  const bool want_sankey = body.value("sankey", have_clusters);
  auto annotations =
      inference::AnnotateTraining(*s->host, s->vfl_train_ids, *s->local, *s->vfl);
  auto report = inference::Route(*s->host, s->split->prediction_ids, annotations, *s->local);
  if (want_sankey) {
    VFL_ENFORCE(have_clusters, ErrorCode::kClusterModelMissing,
                "the flow view needs cluster models of both populations");
    report.sankey = inference::SankeyFlows(report, annotations,
                                           s->train_clusters->Assignment(),
                                           s->pred_clusters->Assignment());
  }
  s->annotations = std::move(annotations);
  s->routing = std::move(report);
  s->evaluation.reset();
  s->events.push_back({{"op", "route"}, {"body", body}});
  std::vector<size_t> hist(8, 0);
  for (const auto& a : s->annotations) ++hist[static_cast<size_t>(a.combo)];
  json j = *s->routing;
  j["combo_histogram"] = hist;
  if (body.value("annotations", false)) j["annotations"] = s->annotations;
  return j;
}

json Workbench::PredictRouted(const std::string& sid) {
  auto s = Find(sid);
  std::lock_guard lock(s->mu);
  VFL_ENFORCE(s->routing.has_value() && s->vfl, ErrorCode::kModelMissing, "route first");
  std::vector<std::string> ids;
  for (const auto& d : s->routing->decisions) {
    if (d.decision == inference::Decision::kSendToVfl) ids.push_back(d.id);
  }
  const auto scores = protocol::PredictJoint(*s->vfl, ids);
  json out = json::array();
  for (size_t i = 0; i < ids.size(); ++i) out.push_back({{"id", ids[i]}, {"score", scores[i]}});
  return {{"count", ids.size()}, {"scores", out}};
}

json Workbench::EvaluateRouted(const std::string& sid) {
  auto s = Find(sid);
  std::lock_guard lock(s->mu);
  VFL_ENFORCE(s->routing.has_value() && s->vfl, ErrorCode::kModelMissing, "route first");
  s->evaluation = inference::EvaluateRouting(*s->routing, *s->vfl);
  s->events.push_back({{"op", "evaluate"}});
  return *s->evaluation;
}

void Workbench::WaitIdle(const std::string& sid) {
  auto s = Find(sid);
  std::unique_lock lock(s->mu);
  s->idle.wait(lock, [&] { return !s->busy; });
}

std::string Workbench::RegistryJsonLines(const std::string& sid) {
  auto s = Find(sid);
  std::lock_guard lock(s->mu);
  return s->registry.ToJsonLines();
}

std::map<std::string, std::string> Workbench::Artifacts(const std::string& sid) {
  WaitIdle(sid);
  auto s = Find(sid);
  std::lock_guard lock(s->mu);
  std::map<std::string, std::string> out;
  out["registry.jsonl"] = s->registry.ToJsonLines();
  if (s->split) out["split.json"] = Pretty({{"aligned", s->aligned}, {"split", *s->split}});
  if (s->importance) {
    out["features.json"] =
        Pretty({{"importance", *s->importance},
                {"external", *s->iv},
                {"selection", {{"local", s->local_selection}, {"external", s->external_selection}}}});
  }
  if (s->train_clusters) {
    json j = {{"request", s->cluster_request},
              {"train", s->train_clusters->ToJson(s->local_selection)},
              {"prediction", nullptr}};
    if (s->pred_clusters) j["prediction"] = s->pred_clusters->ToJson(s->local_selection);
    out["clusters.json"] = Pretty(j);
  }
  if (s->quality) {
    out["sampling.json"] = Pretty({{"plan", s->plan}, {"pool", s->pool}, {"quality", *s->quality}});
  }
  if (s->routing) out["routing.json"] = Pretty(*s->routing);
  if (s->evaluation) out["evaluation.json"] = Pretty(*s->evaluation);
  return out;
}

json Workbench::Snapshot(const std::string& sid, const std::filesystem::path& dir) {
  const auto artifacts = Artifacts(sid);
  auto s = Find(sid);
  std::lock_guard lock(s->mu);
  std::filesystem::create_directories(dir);
  std::string events;
  for (const auto& e : s->events) events += e.dump() + "\n";
  WriteFile(dir / "events.jsonl", events);
  json names = json::array();
  for (const auto& [name, bytes] : artifacts) {
    WriteFile(dir / name, bytes);
    names.push_back(name);
  }
  const json manifest = {{"format", 1},
                         {"session_id", s->id},
                         {"events", "events.jsonl"},
                         {"event_count", s->events.size()},
                         {"artifacts", names}};
  WriteFile(dir / "manifest.json", Pretty(manifest));
  return manifest;
}

void Workbench::Replay(const std::string& sid, const json& event) {
  const std::string op = event.at("op");
  const json body = event.value("body", json::object());
  if (op == "data") {
    LoadData(sid, body);
  } else if (op == "features") {
    Features(sid);
  } else if (op == "selection") {
    SetSelection(sid, body);
  } else if (op == "clusters") {
    StartClusters(sid, body);
    WaitIdle(sid);
  } else if (op == "sampling") {
    SetSampling(sid, event.at("cluster_id").get<int>(), body);
  } else if (op == "sampling_target") {
    SampleToTarget(sid, body);
  } else if (op == "train") {
    StartTraining(sid, body);
    WaitIdle(sid);
  } else if (op == "route") {
    Route(sid, body);
  } else if (op == "evaluate") {
    EvaluateRouted(sid);
  } else {
    throw Error(ErrorCode::kParseError, "unknown event '" + op + "'");
  }
}

json Workbench::Reload(const std::filesystem::path& dir) {
  VFL_ENFORCE(std::filesystem::exists(dir / "manifest.json"), ErrorCode::kNotFound,
              "no snapshot at " + dir.string());
  const json manifest = json::parse(ReadFile(dir / "manifest.json"));
  const std::string sid = CreateSession().at("session_id");
  std::istringstream events(ReadFile(dir / manifest.at("events").get<std::string>()));
  size_t replayed = 0;
  for (std::string line; std::getline(events, line);) {
    if (line.empty()) continue;
    Replay(sid, json::parse(line));
    ++replayed;
  }
  const auto regenerated = Artifacts(sid);
  std::vector<std::string> stored = manifest.at("artifacts");
  VFL_ENFORCE(stored.size() == regenerated.size(), ErrorCode::kConflict,
              "replay produced a different artifact set");
  for (const auto& name : stored) {
    auto it = regenerated.find(name);
    VFL_ENFORCE(it != regenerated.end(), ErrorCode::kConflict, "replay lacks " + name);
    VFL_ENFORCE(it->second == ReadFile(dir / name), ErrorCode::kConflict,
                "replayed " + name + " differs from the snapshot");
  }
  return {{"session_id", sid}, {"events_replayed", replayed}, {"artifacts_verified", stored}};
}

}  // namespace vfl::service
