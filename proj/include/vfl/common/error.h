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

#include <stdexcept>
#include <string>
#include <string_view>

namespace vfl {

// Every failure the engine reports carries one of these codes. The service
// layer maps them onto HTTP statuses, so keep the names stable.
enum class ErrorCode {
  kInvalidArgument,
  kParseError,
  kNotFound,
  kConflict,
  kIoError,
  // party_data
  kMissingIdColumn,
  kNonBinaryLabel,
  kEmptyTable,
  kEmptySalt,
  kFractionOutOfRange,
  // he
  kUnsupportedKeySize,
  kKeyMismatch,
  kMaskRangeTooSmall,
  // protocol
  kKeyNotDistributed,
  kTransportClosed,
  kDivergedLoss,
  kGuestMissingIds,
  // features
  kSingleClassLabels,
  kInvalidRepeatCount,
  kBinCountTooSmall,
  kAllOneClass,
  // samples
  kTooFewRows,
  kKRangeInvalid,
  kKTooLarge,
  kRateOutOfRange,
  kEmptySelection,
  kTooFewSamples,
  // models / inference
  kLengthMismatch,
  kModelMissing,
  kFeatureSpaceMismatch,
  kClusterModelMissing,
  kDatasetMissing,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

#define VFL_ENFORCE(cond, code, msg)  \
  do {                                \
    if (!(cond)) {                    \
      throw ::vfl::Error((code), (msg)); \
    }                                 \
  } while (false)

}  // namespace vfl
