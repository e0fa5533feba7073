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
#include <vector>

#include <nlohmann/json.hpp>

#include "vfl/he/paillier.h"
#include "vfl/party_data/party_table.h"

namespace vfl::features {

struct ExternalIvReport {
  // Guest columns by anonymous id, in id order.
  std::vector<std::string> anonymous_feature_ids;
  std::vector<double> iv;
  int bin_count = 10;
};

void to_json(nlohmann::json& j, const ExternalIvReport& r);

// Every message of one exchange, serialized as sent.
struct IvTranscript {
  std::vector<std::string> host_to_guest;
  std::vector<std::string> guest_to_host;
};

// Host: de-identified ids and [[y_i]] under the host's own key.
nlohmann::json HostIvRequest(const party_data::PartyTable& host, const std::string& salt,
                             const std::vector<std::string>& ids, const he::PublicKey& pk,
                             he::RandomSource& rng);

// Guest: bins every column by equal frequency and answers, per bin, the row
// count and the homomorphic sum of the labels in it. Throws kGuestMissingIds
// when a requested id is unknown.
nlohmann::json GuestIvResponse(const party_data::PartyTable& guest, const std::string& salt,
                               const nlohmann::json& request, int bins);

// Host: decrypts the per-bin bad counts and computes IV per column.
ExternalIvReport HostIvFinish(const nlohmann::json& response, const he::KeyPair& keys,
                              int bins);

// The three steps above with JSON round trips in between.
ExternalIvReport ExternalIv(const party_data::PartyTable& host,
                            const party_data::PartyTable& guest, const std::string& salt,
                            const std::vector<std::string>& ids, int bins,
                            const he::KeyPair& keys, he::RandomSource& rng,
                            IvTranscript* transcript = nullptr);

}  // namespace vfl::features
