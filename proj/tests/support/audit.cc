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

#include "audit.h"

#include <cmath>
#include <set>
#include <unordered_set>

#include "vfl/he/paillier.h"

namespace vfl::testing {
namespace {

const std::set<std::string> kCounterKeys = {"accepted", "missing"};

struct Scanner {
  const TranscriptSecrets& secrets;
  std::unordered_set<std::string> secret_text;
  std::vector<std::string> findings;

  void Walk(const nlohmann::json& j, const std::string& path, const std::string& key,
            bool scores_allowed, const std::string& where) {
    if (j.is_object()) {
      for (auto it = j.begin(); it != j.end(); ++it) {
        Walk(it.value(), path + "." + it.key(), it.key(), scores_allowed, where);
      }
    } else if (j.is_array()) {
      for (size_t i = 0; i < j.size(); ++i) {
        Walk(j[i], path + "[" + std::to_string(i) + "]", key, scores_allowed, where);
      }
    } else if (j.is_number()) {
      if (kCounterKeys.count(key) || (scores_allowed && key == "scores")) return;
      findings.push_back(where + " numeric leaf at " + path);
    } else if (j.is_string()) {
      const std::string s = j.get<std::string>();
      if (secret_text.count(s)) findings.push_back(where + " secret string at " + path);
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (!s.empty() && end == s.c_str() + s.size() && std::isfinite(v) && s.size() < 32) {
        for (double secret : secrets.values) {
          if (v == secret) findings.push_back(where + " secret number at " + path);
        }
      }
    }
  }
};

}  // namespace

std::vector<std::string> ScanTranscript(const std::vector<protocol::LoggedMessage>& log,
                                        const TranscriptSecrets& secrets) {
  Scanner scanner{secrets, {}, {}};
  for (const auto& v : secrets.integers) {
    scanner.secret_text.insert(v.get_str());
    scanner.secret_text.insert(he::MpzToBase64(v));
  }
  for (const auto& s : secrets.strings) scanner.secret_text.insert(s);
  for (size_t k = 0; k < log.size(); ++k) {
    const auto& msg = log[k].message;
    const std::string where = "message " + std::to_string(k) + " (" +
                              std::string(protocol::MsgTypeName(msg.type)) + ")";
    scanner.Walk(msg.payload, "payload", "", msg.type == protocol::MsgType::kScoreShare,
                 where);
  }
  return scanner.findings;
}

}  // namespace vfl::testing
