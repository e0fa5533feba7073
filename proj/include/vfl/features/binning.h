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

#include <span>
#include <vector>

namespace vfl::features {

// Equal-frequency bins: rows are ranked by value and the rank r lands in bin
// floor(r * bins / n). Equal values always share the bin of their first
// occurrence, so heavy ties can leave some bins empty.
std::vector<int> EqualFrequencyBins(std::span<const double> values, int bins);

struct BinCounts {
  double good = 0;  // label 0
  double bad = 0;   // label 1
};

// Information value over per-bin counts. Empty bins are skipped; a bin with
// a zero cell gets 0.5 added to both of its cells. Totals are the raw class
// counts. Throws kAllOneClass when either class is absent.
double InformationValue(const std::vector<BinCounts>& bins);

}  // namespace vfl::features
