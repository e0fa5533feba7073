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
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>
#include "vfl/common/role.h"

namespace vfl::party_data {

// Salted SHA-256 of an ID, hex encoded. Both parties derive the same token
// for the same ID; the raw ID never leaves its owner.
std::string DeidentifyId(const std::string& salt, const std::string& id);

struct AlignmentMessage {
  Role sender;
  Role receiver;
  std::vector<std::string> tokens;
};

struct AlignedSet {
  // Sorted by token.
  std::vector<std::string> common_ids;
  std::vector<std::string> tokens;
  std::unordered_map<std::string, size_t> host_row_index;
  std::unordered_map<std::string, size_t> guest_row_index;

  size_t size() const { return common_ids.size(); }
};

// Keyed-hash intersection: the host sends its tokens, the guest answers with
// the tokens it also holds. The guest's non-overlapping IDs never leave the
// guest. When `transcript` is given, every cross-party message is appended.
AlignedSet AlignEntities(const std::vector<std::string>& host_ids,
                         const std::vector<std::string>& guest_ids,
                         const std::string& salt,
                         std::vector<AlignmentMessage>* transcript = nullptr);

struct SplitSpec {
  std::vector<std::string> train_ids;
  std::vector<std::string> validation_ids;
  std::vector<std::string> prediction_ids;
  uint64_t seed = 0;
};

// Seeded shuffle of the common IDs, then floor(fraction * n) for train and
// validation, remainder to prediction. Each list keeps alignment order.
SplitSpec Split(const AlignedSet& aligned, double train_fraction,
                double validation_fraction, uint64_t seed);

void to_json(nlohmann::json& j, const SplitSpec& s);
void from_json(const nlohmann::json& j, SplitSpec& s);

}  // namespace vfl::party_data
