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

#include "vfl/common/error.h"

namespace vfl {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kConflict: return "Conflict";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kMissingIdColumn: return "MissingIdColumn";
    case ErrorCode::kNonBinaryLabel: return "NonBinaryLabel";
    case ErrorCode::kEmptyTable: return "EmptyTable";
    case ErrorCode::kEmptySalt: return "EmptySalt";
    case ErrorCode::kFractionOutOfRange: return "FractionOutOfRange";
    case ErrorCode::kUnsupportedKeySize: return "UnsupportedKeySize";
    case ErrorCode::kKeyMismatch: return "KeyMismatch";
    case ErrorCode::kMaskRangeTooSmall: return "MaskRangeTooSmall";
    case ErrorCode::kKeyNotDistributed: return "KeyNotDistributed";
    case ErrorCode::kTransportClosed: return "TransportClosed";
    case ErrorCode::kDivergedLoss: return "DivergedLoss";
    case ErrorCode::kGuestMissingIds: return "GuestMissingIds";
    case ErrorCode::kSingleClassLabels: return "SingleClassLabels";
    case ErrorCode::kInvalidRepeatCount: return "InvalidRepeatCount";
    case ErrorCode::kBinCountTooSmall: return "BinCountTooSmall";
    case ErrorCode::kAllOneClass: return "AllOneClass";
    case ErrorCode::kTooFewRows: return "TooFewRows";
    case ErrorCode::kKRangeInvalid: return "KRangeInvalid";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kRateOutOfRange: return "RateOutOfRange";
    case ErrorCode::kEmptySelection: return "EmptySelection";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kModelMissing: return "ModelMissing";
    case ErrorCode::kFeatureSpaceMismatch: return "FeatureSpaceMismatch";
    case ErrorCode::kClusterModelMissing: return "ClusterModelMissing";
    case ErrorCode::kDatasetMissing: return "DatasetMissing";
  }
  return "Unknown";
}

}  // namespace vfl
