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

#include "vfl/features/binning.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vfl/common/error.h"

namespace vfl::features {

std::vector<int> EqualFrequencyBins(std::span<const double> values, int bins) {
  VFL_ENFORCE(bins >= 2, ErrorCode::kBinCountTooSmall, "need at least two bins");
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<int> out(n, 0);
  int current = 0;
  for (size_t r = 0; r < n; ++r) {
    const size_t i = order[r];
    if (r > 0 && values[i] == values[order[r - 1]]) {
      out[i] = current;
      continue;
    }
    current = static_cast<int>(r * static_cast<size_t>(bins) / n);
    out[i] = current;
  }
  return out;
}

double InformationValue(const std::vector<BinCounts>& bins) {
  double good_total = 0, bad_total = 0;
  for (const auto& b : bins) {
    good_total += b.good;
    bad_total += b.bad;
  }
  VFL_ENFORCE(good_total > 0 && bad_total > 0, ErrorCode::kAllOneClass,
              "IV needs both label classes");
  double iv = 0;
  for (auto b : bins) {
    if (b.good == 0 && b.bad == 0) continue;
    if (b.good == 0 || b.bad == 0) {
      b.good += 0.5;
      b.bad += 0.5;
    }
    const double pg = b.good / good_total;
    const double pb = b.bad / bad_total;
    iv += (pg - pb) * std::log(pg / pb);
  }
  return iv;
}

}  // namespace vfl::features
