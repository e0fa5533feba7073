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

#include "vfl/party_data/party_table.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "vfl/common/error.h"

namespace vfl::party_data {
namespace {

std::string Trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  std::string out(s.substr(b, e - b));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') {
    out = out.substr(1, out.size() - 2);
  }
  return out;
}

std::vector<std::string> SplitLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
      cur.push_back(c);
    } else if (c == ',' && !quoted) {
      cells.push_back(Trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  cells.push_back(Trim(cur));
  return cells;
}

std::optional<double> ParseNumber(const std::string& cell) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

}  // namespace

PartyTable PartyTable::Create(Role role, std::vector<std::string> sample_ids,
                              std::vector<std::string> feature_names,
                              Matrix features,
                              std::optional<std::vector<int>> labels,
                              size_t dropped_rows) {
  VFL_ENFORCE(role == Role::kHost || role == Role::kGuest,
              ErrorCode::kInvalidArgument, "party tables belong to host or guest");
  VFL_ENFORCE(!sample_ids.empty(), ErrorCode::kEmptyTable, "table has no rows");
  VFL_ENFORCE(static_cast<size_t>(features.rows()) == sample_ids.size(),
              ErrorCode::kInvalidArgument, "feature rows != id count");
  VFL_ENFORCE(static_cast<size_t>(features.cols()) == feature_names.size(),
              ErrorCode::kInvalidArgument, "feature columns != names");
  if (labels) {
    VFL_ENFORCE(role == Role::kHost, ErrorCode::kInvalidArgument,
                "guest tables never carry labels");
    VFL_ENFORCE(labels->size() == sample_ids.size(),
                ErrorCode::kInvalidArgument, "label count != id count");
    for (int y : *labels) {
      VFL_ENFORCE(y == 0 || y == 1, ErrorCode::kNonBinaryLabel,
                  "labels must be 0 or 1");
    }
  }
  PartyTable t;
  t.role_ = role;
  t.row_index_.reserve(sample_ids.size());
  for (size_t i = 0; i < sample_ids.size(); ++i) {
    VFL_ENFORCE(!sample_ids[i].empty(), ErrorCode::kInvalidArgument,
                "empty sample id");
    const bool inserted = t.row_index_.emplace(sample_ids[i], i).second;
    VFL_ENFORCE(inserted, ErrorCode::kInvalidArgument,
                "duplicate sample id '" + sample_ids[i] + "'");
  }
  t.sample_ids_ = std::move(sample_ids);
  t.feature_names_ = std::move(feature_names);
  t.features_ = std::move(features);
  t.labels_ = std::move(labels);
  t.dropped_rows_ = dropped_rows;
  return t;
}

std::optional<size_t> PartyTable::RowOf(const std::string& id) const {
  auto it = row_index_.find(id);
  if (it == row_index_.end()) return std::nullopt;
  return it->second;
}

size_t PartyTable::ColumnOf(const std::string& name) const {
  for (size_t j = 0; j < feature_names_.size(); ++j) {
    if (feature_names_[j] == name) return j;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown feature '" + name + "'");
}

PartyTable ParseTable(const std::string& csv_text, Role role,
                      const std::optional<std::string>& label_column) {
  VFL_ENFORCE(!(role == Role::kGuest && label_column),
              ErrorCode::kInvalidArgument, "guest tables never carry labels");
  std::istringstream in(csv_text);
  std::string line;
  VFL_ENFORCE(static_cast<bool>(std::getline(in, line)), ErrorCode::kEmptyTable,
              "missing header row");
  const std::vector<std::string> header = SplitLine(line);

  std::optional<size_t> id_col;
  std::optional<size_t> label_col;
  std::vector<size_t> feature_cols;
  std::vector<std::string> feature_names;
  for (size_t j = 0; j < header.size(); ++j) {
    if (header[j] == "id") {
      id_col = j;
    } else if (label_column && header[j] == *label_column) {
      label_col = j;
    } else {
      feature_cols.push_back(j);
      feature_names.push_back(header[j]);
    }
  }
  VFL_ENFORCE(id_col.has_value(), ErrorCode::kMissingIdColumn,
              "header has no 'id' column");
  VFL_ENFORCE(!label_column || label_col.has_value(), ErrorCode::kInvalidArgument,
              "label column '" + label_column.value_or("") + "' not in header");

  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  size_t dropped = 0;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const std::vector<std::string> cells = SplitLine(line);
    VFL_ENFORCE(cells.size() == header.size(), ErrorCode::kParseError,
                "line " + std::to_string(line_no) + ": expected " +
                    std::to_string(header.size()) + " cells");
    const std::string& id = cells[*id_col];
    bool missing = id.empty();
    std::vector<double> row;
    row.reserve(feature_cols.size());
    for (size_t j : feature_cols) {
      if (cells[j].empty()) {
        missing = true;
        continue;
      }
      auto v = ParseNumber(cells[j]);
      VFL_ENFORCE(v.has_value(), ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": non-numeric cell '" +
                      cells[j] + "' in column '" + header[j] + "'");
      row.push_back(*v);
    }
    int label = 0;
    if (label_col) {
      const std::string& cell = cells[*label_col];
      if (cell.empty()) {
        missing = true;
      } else {
        auto v = ParseNumber(cell);
        VFL_ENFORCE(v && (*v == 0.0 || *v == 1.0), ErrorCode::kNonBinaryLabel,
                    "line " + std::to_string(line_no) + ": label '" + cell +
                        "' is not 0/1");
        label = static_cast<int>(*v);
      }
    }
    if (missing) {
      ++dropped;
      continue;
    }
    ids.push_back(id);
    rows.push_back(std::move(row));
    labels.push_back(label);
  }
  VFL_ENFORCE(!ids.empty(), ErrorCode::kEmptyTable, "table has no usable rows");

  Matrix features(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(feature_cols.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < feature_cols.size(); ++j) {
      features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  std::optional<std::vector<int>> label_vec;
  if (label_col) label_vec = std::move(labels);
  return PartyTable::Create(role, std::move(ids), std::move(feature_names),
                            std::move(features), std::move(label_vec), dropped);
}

PartyTable LoadTable(const std::filesystem::path& path, Role role,
                     const std::optional<std::string>& label_column) {
  std::ifstream in(path, std::ios::binary);
  VFL_ENFORCE(in.good(), ErrorCode::kIoError, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseTable(buffer.str(), role, label_column);
}

std::string TableToCsv(const PartyTable& table, const std::string& label_column) {
  std::ostringstream out;
  out.precision(17);
  out << "id";
  for (const auto& name : table.feature_names()) out << ',' << name;
  if (table.labels()) out << ',' << label_column;
  out << '\n';
  for (size_t i = 0; i < table.rows(); ++i) {
    out << table.sample_ids()[i];
    for (Eigen::Index j = 0; j < table.features().cols(); ++j) {
      out << ',' << table.features()(static_cast<Eigen::Index>(i), j);
    }
    if (table.labels()) out << ',' << (*table.labels())[i];
    out << '\n';
  }
  return out.str();
}

std::string AnonymousFeatureId(size_t column) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "ext_%02zu", column);
  return buf;
}

}  // namespace vfl::party_data
