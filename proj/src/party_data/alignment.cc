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

#include "vfl/party_data/alignment.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <nlohmann/json.hpp>
#include "vfl/common/encoding.h"
#include "vfl/common/error.h"
#include "vfl/common/random.h"

namespace vfl::party_data {

std::string DeidentifyId(const std::string& salt, const std::string& id) {
  std::string input;
  input.reserve(salt.size() + 1 + id.size());
  input.append(salt).push_back('\0');
  input.append(id);
  return HexEncode(Sha256(input));
}

AlignedSet AlignEntities(const std::vector<std::string>& host_ids,
                         const std::vector<std::string>& guest_ids,
                         const std::string& salt,
                         std::vector<AlignmentMessage>* transcript) {
  VFL_ENFORCE(!salt.empty(), ErrorCode::kEmptySalt, "alignment salt is empty");

  // Host side: tokenise and send.
  std::unordered_map<std::string, size_t> host_token_row;
  std::vector<std::string> host_tokens;
  host_tokens.reserve(host_ids.size());
  for (size_t i = 0; i < host_ids.size(); ++i) {
    VFL_ENFORCE(!host_ids[i].empty(), ErrorCode::kInvalidArgument, "empty host id");
    std::string token = DeidentifyId(salt, host_ids[i]);
    host_token_row.emplace(token, i);
    host_tokens.push_back(std::move(token));
  }
  std::sort(host_tokens.begin(), host_tokens.end());
  if (transcript) transcript->push_back({Role::kHost, Role::kGuest, host_tokens});

  // Guest side: intersect against its own tokens, reply with the overlap.
  std::unordered_map<std::string, size_t> guest_token_row;
  for (size_t i = 0; i < guest_ids.size(); ++i) {
    VFL_ENFORCE(!guest_ids[i].empty(), ErrorCode::kInvalidArgument, "empty guest id");
    guest_token_row.emplace(DeidentifyId(salt, guest_ids[i]), i);
  }
  std::vector<std::string> overlap;
  for (const auto& token : host_tokens) {
    if (guest_token_row.count(token)) overlap.push_back(token);
  }
  if (transcript) transcript->push_back({Role::kGuest, Role::kHost, overlap});

  AlignedSet aligned;
  aligned.tokens = overlap;
  aligned.common_ids.reserve(overlap.size());
  for (const auto& token : overlap) {
    const size_t host_row = host_token_row.at(token);
    const size_t guest_row = guest_token_row.at(token);
    const std::string& id = host_ids[host_row];
    aligned.common_ids.push_back(id);
    aligned.host_row_index.emplace(id, host_row);
    aligned.guest_row_index.emplace(id, guest_row);
  }
  return aligned;
}

SplitSpec Split(const AlignedSet& aligned, double train_fraction,
                double validation_fraction, uint64_t seed) {
  auto in_open_unit = [](double f) { return f > 0.0 && f < 1.0; };
  VFL_ENFORCE(in_open_unit(train_fraction) && in_open_unit(validation_fraction),
              ErrorCode::kFractionOutOfRange, "fractions must lie in (0,1)");
  VFL_ENFORCE(train_fraction + validation_fraction <= 1.0 + 1e-12,
              ErrorCode::kFractionOutOfRange,
              "train + validation fractions exceed 1");

  const size_t n = aligned.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  Shuffle(order, rng);

  // The epsilon keeps e.g. 0.6 * 100 from flooring to 59.
  const auto n_train = static_cast<size_t>(std::floor(train_fraction * n + 1e-9));
  const auto n_val = static_cast<size_t>(std::floor(validation_fraction * n + 1e-9));

  auto take = [&](size_t begin, size_t end) {
    std::vector<size_t> pos(order.begin() + begin, order.begin() + end);
    std::sort(pos.begin(), pos.end());
    std::vector<std::string> ids;
    ids.reserve(pos.size());
    for (size_t p : pos) ids.push_back(aligned.common_ids[p]);
    return ids;
  };
  SplitSpec spec;
  spec.seed = seed;
  spec.train_ids = take(0, n_train);
  spec.validation_ids = take(n_train, std::min(n, n_train + n_val));
  spec.prediction_ids = take(std::min(n, n_train + n_val), n);
  return spec;
}

void to_json(nlohmann::json& j, const SplitSpec& s) {
  j = nlohmann::json{{"train", s.train_ids},
                     {"validation", s.validation_ids},
                     {"prediction", s.prediction_ids},
                     {"seed", s.seed}};
}

void from_json(const nlohmann::json& j, SplitSpec& s) {
  j.at("train").get_to(s.train_ids);
  j.at("validation").get_to(s.validation_ids);
  j.at("prediction").get_to(s.prediction_ids);
  j.at("seed").get_to(s.seed);
}

}  // namespace vfl::party_data
