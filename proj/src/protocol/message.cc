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

#include "vfl/protocol/message.h"

#include "vfl/common/error.h"

namespace vfl::protocol {

std::string_view MsgTypeName(MsgType type) {
  switch (type) {
    case MsgType::kPubKey: return "pub_key";
    case MsgType::kEncPartialScore: return "enc_partial_score";
    case MsgType::kEncGradientMasked: return "enc_gradient_masked";
    case MsgType::kDecGradientMasked: return "dec_gradient_masked";
    case MsgType::kScoreShare: return "score_share";
    case MsgType::kIdsRequest: return "ids_request";
    case MsgType::kAbort: return "abort";
  }
  return "unknown";
}

MsgType ParseMsgType(std::string_view name) {
  for (MsgType t : {MsgType::kPubKey, MsgType::kEncPartialScore,
                    MsgType::kEncGradientMasked, MsgType::kDecGradientMasked,
                    MsgType::kScoreShare, MsgType::kIdsRequest, MsgType::kAbort}) {
    if (MsgTypeName(t) == name) return t;
  }
  throw Error(ErrorCode::kParseError, "unknown msg_type '" + std::string(name) + "'");
}

std::string ProtocolMessage::Serialize() const {
  nlohmann::json j{{"msg_type", MsgTypeName(type)},
                   {"iteration", iteration},
                   {"sender", RoleName(sender)},
                   {"receiver", RoleName(receiver)},
                   {"payload", payload}};
  return j.dump();
}

ProtocolMessage ProtocolMessage::Parse(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("bad frame: ") + e.what());
  }
  ProtocolMessage m;
  m.type = ParseMsgType(j.at("msg_type").get<std::string>());
  m.iteration = j.at("iteration").get<int>();
  m.sender = ParseRole(j.at("sender").get<std::string>());
  m.receiver = ParseRole(j.at("receiver").get<std::string>());
  m.payload = j.at("payload");
  return m;
}

}  // namespace vfl::protocol
