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

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "vfl/common/matrix.h"
#include "vfl/common/role.h"

namespace vfl::party_data {

// One party's records. Immutable once built; Create() checks the
// invariants (unique ids, row counts, labels only on the host).
class PartyTable {
 public:
  static PartyTable Create(Role role, std::vector<std::string> sample_ids,
                           std::vector<std::string> feature_names,
                           Matrix features,
                           std::optional<std::vector<int>> labels,
                           size_t dropped_rows = 0);

  Role role() const { return role_; }
  const std::vector<std::string>& sample_ids() const { return sample_ids_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const Matrix& features() const { return features_; }
  const std::optional<std::vector<int>>& labels() const { return labels_; }
  size_t rows() const { return sample_ids_.size(); }
  size_t dropped_rows() const { return dropped_rows_; }

  // Row of `id`, or nullopt.
  std::optional<size_t> RowOf(const std::string& id) const;
  // Column index by name; throws kInvalidArgument when absent.
  size_t ColumnOf(const std::string& name) const;

 private:
  PartyTable() = default;

  Role role_ = Role::kHost;
  std::vector<std::string> sample_ids_;
  std::vector<std::string> feature_names_;
  Matrix features_;
  std::optional<std::vector<int>> labels_;
  size_t dropped_rows_ = 0;
  std::unordered_map<std::string, size_t> row_index_;
};

// Reads a CSV with a mandatory "id" column. Rows with a missing id or any
// missing feature cell are dropped and counted in dropped_rows().
PartyTable LoadTable(const std::filesystem::path& path, Role role,
                     const std::optional<std::string>& label_column);

// Same, from in-memory CSV text.
PartyTable ParseTable(const std::string& csv_text, Role role,
                      const std::optional<std::string>& label_column);

// The name a guest column is known by outside the guest: "ext_00", "ext_01"...
std::string AnonymousFeatureId(size_t column);

// Writes the table back out with the same layout LoadTable accepts.
std::string TableToCsv(const PartyTable& table,
                       const std::string& label_column = "label");

}  // namespace vfl::party_data
