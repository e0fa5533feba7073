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

#include "vfl/service/http_server.h"

#include <httplib.h>

namespace vfl::service {
namespace {

void Reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json ParseBody(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("request body: ") + e.what());
  }
}

}  // namespace

struct HttpServer::Impl {
  Workbench& wb;
  httplib::Server server;

  explicit Impl(Workbench& w) : wb(w) {}

  // Wraps a handler so module errors map onto status codes.
  template <typename Fn>
  httplib::Server::Handler Wrap(int ok_status, Fn fn) {
    return [ok_status, fn](const httplib::Request& req, httplib::Response& res) {
      try {
        Reply(res, ok_status, fn(req));
      } catch (const Error& e) {
        Reply(res, HttpStatus(e.code()),
              {{"error", {{"code", ErrorCodeName(e.code())}, {"message", e.what()}}}});
      } catch (const json::exception& e) {
        Reply(res, 422, {{"error", {{"code", "InvalidArgument"}, {"message", e.what()}}}});
      } catch (const std::exception& e) {
        Reply(res, 500, {{"error", {{"code", "Internal"}, {"message", e.what()}}}});
      }
    };
  }

  void Routes() {
    const std::string sid = R"(/sessions/([^/]+))";
    server.Get("/health", Wrap(200, [](const auto&) { return json{{"status", "ok"}}; }));
    server.Post("/sessions", Wrap(201, [this](const auto&) { return wb.CreateSession(); }));
    server.Post("/sessions/reload", Wrap(201, [this](const auto& req) {
                  return wb.Reload(ParseBody(req).at("dir").template get<std::string>());
                }));
    server.Post(sid + "/data", Wrap(200, [this](const auto& req) {
                  return wb.LoadData(req.matches[1], ParseBody(req));
                }));
    server.Get(sid + "/features",
               Wrap(200, [this](const auto& req) { return wb.Features(req.matches[1]); }));
    server.Put(sid + "/features/selection", Wrap(200, [this](const auto& req) {
                 return wb.SetSelection(req.matches[1], ParseBody(req));
               }));
    server.Post(sid + "/clusters", Wrap(202, [this](const auto& req) {
                  return wb.StartClusters(req.matches[1], ParseBody(req));
                }));
    server.Get(sid + "/clusters",
               Wrap(200, [this](const auto& req) { return wb.Clusters(req.matches[1]); }));
    server.Put(sid + R"(/sampling/(\d+))", Wrap(200, [this](const auto& req) {
                 return wb.SetSampling(req.matches[1], std::stoi(req.matches[2]), ParseBody(req));
               }));
    server.Put(sid + "/sampling", Wrap(200, [this](const auto& req) {
                 return wb.SampleToTarget(req.matches[1], ParseBody(req));
               }));
    server.Post(sid + "/train", Wrap(202, [this](const auto& req) {
                  return wb.StartTraining(req.matches[1], ParseBody(req));
                }));
    server.Get(sid + R"(/train/([^/]+)/progress)", Wrap(200, [this](const auto& req) {
                 return wb.JobProgress(req.matches[1], req.matches[2]);
               }));
    server.Get(sid + R"(/jobs/([^/]+))", Wrap(200, [this](const auto& req) {
                 return wb.JobProgress(req.matches[1], req.matches[2]);
               }));
    server.Get(sid + "/models",
               Wrap(200, [this](const auto& req) { return wb.Models(req.matches[1]); }));
    server.Post(sid + "/inference/route", Wrap(200, [this](const auto& req) {
                  return wb.Route(req.matches[1], ParseBody(req));
                }));
    server.Post(sid + "/inference/predict",
                Wrap(200, [this](const auto& req) { return wb.PredictRouted(req.matches[1]); }));
    server.Post(sid + "/inference/evaluate",
                Wrap(200, [this](const auto& req) { return wb.EvaluateRouted(req.matches[1]); }));
    server.Post(sid + "/snapshot", Wrap(200, [this](const auto& req) {
                  return wb.Snapshot(req.matches[1],
                                     ParseBody(req).at("dir").template get<std::string>());
                }));
    server.Get(sid + "/registry", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        res.set_content(wb.RegistryJsonLines(req.matches[1]), "application/x-ndjson");
      } catch (const Error& e) {
        Reply(res, HttpStatus(e.code()),
              {{"error", {{"code", ErrorCodeName(e.code())}, {"message", e.what()}}}});
      }
    });
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) {
        Reply(res, res.status, {{"error", {{"code", "NotFound"}, {"message", "no such route"}}}});
      }
    });
  }
};

HttpServer::HttpServer(Workbench& workbench) : impl_(std::make_unique<Impl>(workbench)) {
  impl_->Routes();
}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

void HttpServer::Serve() { impl_->server.listen_after_bind(); }

void HttpServer::Stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::WaitUntilReady() const { impl_->server.wait_until_ready(); }

}  // namespace vfl::service
