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

namespace vfl::service {

// $VFL_DATA_DIR, or ./data when unset.
std::filesystem::path DataDir();

// Default-of-credit-card-clients layout: an ID column, 23 feature columns and
// the default flag last. The first 14 features stay with the host together
// with the label; the last 9 go to the guest.
constexpr size_t kCreditFeatures = 23;
constexpr size_t kCreditHostFeatures = 14;
inline constexpr const char* kCreditRawFile = "default_of_credit_card_clients.csv";
inline constexpr const char* kCreditHostFile = "credit_host.csv";
inline constexpr const char* kCreditGuestFile = "credit_guest.csv";

struct CreditFiles {
  std::filesystem::path host;
  std::filesystem::path guest;
};

// Writes the two party files into `out_dir`. Leading lines before the header
// row (the one starting with "ID") are skipped, which covers spreadsheet
// exports with an extra X1..X23 caption row. Throws kDatasetMissing when
// `raw_csv` does not exist and kParseError on a malformed file.
CreditFiles SplitCredit(const std::filesystem::path& raw_csv,
                        const std::filesystem::path& out_dir);

// Party files in `data_dir`, splitting the raw file there first if needed.
// Throws kDatasetMissing when neither is present.
CreditFiles LocateCredit(const std::filesystem::path& data_dir);

}  // namespace vfl::service
