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

#include "vfl/common/role.h"

#include "vfl/common/error.h"

namespace vfl {

std::string_view RoleName(Role role) {
  switch (role) {
    case Role::kGuest: return "guest";
    case Role::kHost: return "host";
    case Role::kCollaborator: return "collaborator";
  }
  return "unknown";
}

Role ParseRole(std::string_view name) {
  if (name == "guest") return Role::kGuest;
  if (name == "host") return Role::kHost;
  if (name == "collaborator") return Role::kCollaborator;
  throw Error(ErrorCode::kParseError, "unknown role '" + std::string(name) + "'");
}

}  // namespace vfl
