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

#include <memory>
#include <string>

#include "vfl/service/workbench.h"

namespace vfl::service {

// HTTP+JSON front end over a Workbench. Errors come back as
// {"error": {"code", "message"}} with the status from HttpStatus.
class HttpServer {
 public:
  explicit HttpServer(Workbench& workbench);
  ~HttpServer();

  // Binds; port 0 picks a free port. Returns the bound port or -1.
  int Bind(const std::string& host, int port);
  // Serves until Stop(). Call after Bind.
  void Serve();
  void Stop();
  void WaitUntilReady() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vfl::service
