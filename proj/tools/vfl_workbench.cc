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

#include <csignal>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "vfl/service/credit.h"
#include "vfl/service/experiments.h"
#include "vfl/service/http_server.h"
#include "vfl/service/workbench.h"

namespace {

vfl::service::HttpServer* g_server = nullptr;

void HandleSignal(int) {
  if (g_server) g_server->Stop();
}

int Serve(const std::string& host, int port, const vfl::service::WorkbenchOptions& options) {
  vfl::service::Workbench workbench(options);
  vfl::service::HttpServer server(workbench);
  const int bound = server.Bind(host, port);
  if (bound < 0) {
    std::cerr << "cannot bind " << host << ":" << port << "\n";
    return 1;
  }
  g_server = &server;
  std::signal(SIGINT, HandleSignal);
  std::signal(SIGTERM, HandleSignal);
  std::cout << "listening on http://" << host << ":" << bound << std::endl;
  server.Serve();
  g_server = nullptr;
  return 0;
}

int Run(const std::string& config_path, const std::string& out_path,
        const std::string& registry_path, const std::string& snapshot_dir,
        const vfl::service::WorkbenchOptions& options) {
  using namespace vfl::service;
  ExperimentConfig config;
  if (config_path.empty()) {
    config = DefaultCreditConfig(options.data_dir);
  } else {
    std::ifstream in(config_path);
    if (!in) throw vfl::Error(vfl::ErrorCode::kIoError, "cannot read " + config_path);
    config = ParseExperimentConfig(json::parse(in));
  }
  Workbench workbench(options);
  const ExperimentRun run = RunExperiments(workbench, config);
  const std::string csv = RowsToCsv(run.rows);
  if (out_path.empty() || out_path == "-") {
    std::cout << csv;
  } else {
    std::ofstream(out_path) << csv;
    std::cout << csv;
  }
  if (!registry_path.empty()) {
    std::ofstream(registry_path, std::ios::binary) << workbench.RegistryJsonLines(run.session_id);
  }
  if (!snapshot_dir.empty()) workbench.Snapshot(run.session_id, snapshot_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vertical federated learning workbench"};
  app.require_subcommand(1);
  vfl::service::WorkbenchOptions options;
  options.data_dir = vfl::service::DataDir();
  std::string data_dir = options.data_dir.string();
  app.add_option("--data-dir", data_dir, "Data directory (default: $VFL_DATA_DIR or ./data)");
  app.add_option("--key-bits", options.default_key_bits, "Default Paillier modulus size");

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  int port = 8080;
  std::string host = "127.0.0.1";
  serve->add_option("--port", port, "Port, 0 for any free port");
  serve->add_option("--host", host, "Bind address");

  auto* run = app.add_subcommand("run", "Reproduce the experiment table");
  std::string config_path, out_path, registry_path, snapshot_dir;
  run->add_option("--config", config_path, "Experiment config (JSON); default credit setup");
  run->add_option("--out", out_path, "Results CSV");
  run->add_option("--registry", registry_path, "Also write the model registry (JSON lines)");
  run->add_option("--snapshot", snapshot_dir, "Also write a session snapshot");

  auto* split = app.add_subcommand("split-credit", "Split the raw credit file into party files");
  std::string input, out_dir;
  split->add_option("--input", input, "Raw CSV (default: <data-dir>/" +
                                          std::string(vfl::service::kCreditRawFile) + ")");
  split->add_option("--out-dir", out_dir, "Output directory (default: data dir)");

  CLI11_PARSE(app, argc, argv);
  options.data_dir = data_dir;

  try {
    if (*serve) return Serve(host, port, options);
    if (*run) return Run(config_path, out_path, registry_path, snapshot_dir, options);
    if (*split) {
      const auto files = vfl::service::SplitCredit(
          input.empty() ? options.data_dir / vfl::service::kCreditRawFile
                        : std::filesystem::path(input),
          out_dir.empty() ? options.data_dir : std::filesystem::path(out_dir));
      std::cout << files.host.string() << "\n" << files.guest.string() << "\n";
      return 0;
    }
  } catch (const vfl::Error& e) {
    std::cerr << e.what() << "\n";
    return e.code() == vfl::ErrorCode::kDatasetMissing ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 0;
}
