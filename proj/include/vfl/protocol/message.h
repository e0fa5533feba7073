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

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "vfl/common/role.h"

namespace vfl::protocol {

enum class MsgType {
  kPubKey,
  kEncPartialScore,
  kEncGradientMasked,
  kDecGradientMasked,
  kScoreShare,
  kIdsRequest,
  kAbort,
};

std::string_view MsgTypeName(MsgType type);
MsgType ParseMsgType(std::string_view name);

// Setup messages (keys, id exchange) use this iteration number.
inline constexpr int kSetupIteration = -1;

struct ProtocolMessage {
  MsgType type = MsgType::kAbort;
  int iteration = kSetupIteration;
  Role sender = Role::kHost;
  Role receiver = Role::kGuest;
  nlohmann::json payload = nlohmann::json::object();

  // UTF-8 JSON with a msg_type tag. This is exactly what goes into a frame.
  std::string Serialize() const;
  static ProtocolMessage Parse(std::string_view text);
};

}  // namespace vfl::protocol
