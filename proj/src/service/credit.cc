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

#include "vfl/service/credit.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vfl/common/error.h"

namespace vfl::service {
namespace {

std::vector<std::string> Fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');) {
    if (!f.empty() && f.back() == '\r') f.pop_back();
    if (f.size() >= 2 && f.front() == '"' && f.back() == '"') f = f.substr(1, f.size() - 2);
    out.push_back(f);
  }
  return out;
}

std::string Join(const std::vector<std::string>& fields, size_t begin, size_t end) {
  std::string out;
  for (size_t i = begin; i < end; ++i) {
    if (i > begin) out += ',';
    out += fields[i];
  }
  return out;
}

}  // namespace

std::filesystem::path DataDir() {
  const char* env = std::getenv("VFL_DATA_DIR");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("data");
}

CreditFiles SplitCredit(const std::filesystem::path& raw_csv,
                        const std::filesystem::path& out_dir) {
  VFL_ENFORCE(std::filesystem::exists(raw_csv), ErrorCode::kDatasetMissing,
              "credit data not found at " + raw_csv.string());
  std::ifstream in(raw_csv);
  VFL_ENFORCE(in.good(), ErrorCode::kIoError, "cannot read " + raw_csv.string());
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    auto f = Fields(line);
    if (!f.empty() && (f[0] == "ID" || f[0] == "id")) {
      header = std::move(f);
      break;
    }
  }
  VFL_ENFORCE(header.size() == kCreditFeatures + 2, ErrorCode::kParseError,
              "expected ID, 23 features and the label in " + raw_csv.string());

  std::filesystem::create_directories(out_dir);
  CreditFiles files{out_dir / kCreditHostFile, out_dir / kCreditGuestFile};
  std::ofstream host(files.host), guest(files.guest);
  VFL_ENFORCE(host.good() && guest.good(), ErrorCode::kIoError,
              "cannot write into " + out_dir.string());
  const size_t split = 1 + kCreditHostFeatures;
  host << "id," << Join(header, 1, split) << ",label\n";
  guest << "id," << Join(header, split, kCreditFeatures + 1) << '\n';
  size_t rows = 0;
  while (std::getline(in, line)) {
    auto f = Fields(line);
    if (f.empty() || (f.size() == 1 && f[0].empty())) continue;
    VFL_ENFORCE(f.size() == header.size(), ErrorCode::kParseError,
                "row " + std::to_string(rows + 1) + " has " + std::to_string(f.size()) +
                    " fields");
    host << f[0] << ',' << Join(f, 1, split) << ',' << f.back() << '\n';
    guest << f[0] << ',' << Join(f, split, kCreditFeatures + 1) << '\n';
    ++rows;
  }
  VFL_ENFORCE(rows > 0, ErrorCode::kParseError, "no data rows in " + raw_csv.string());
  return files;
}

CreditFiles LocateCredit(const std::filesystem::path& data_dir) {
  CreditFiles files{data_dir / kCreditHostFile, data_dir / kCreditGuestFile};
  if (std::filesystem::exists(files.host) && std::filesystem::exists(files.guest)) return files;
  const auto raw = data_dir / kCreditRawFile;
  VFL_ENFORCE(std::filesystem::exists(raw), ErrorCode::kDatasetMissing,
              "credit data not found: expected " + raw.string() + " or " +
                  files.host.string() + " and " + files.guest.string());
  return SplitCredit(raw, data_dir);
}

}  // namespace vfl::service
