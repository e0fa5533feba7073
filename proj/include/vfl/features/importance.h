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

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vfl/common/matrix.h"
#include "vfl/features/forest.h"

namespace vfl::features {

enum class ImportanceMethod { kAnovaF, kChi2, kMutualInfo, kImpurity, kPermutation };

inline constexpr std::array<ImportanceMethod, 5> kAllMethods = {
    ImportanceMethod::kAnovaF, ImportanceMethod::kChi2, ImportanceMethod::kMutualInfo,
    ImportanceMethod::kImpurity, ImportanceMethod::kPermutation};

std::string_view MethodName(ImportanceMethod method);
ImportanceMethod ParseMethod(std::string_view name);

struct ImportanceOptions {
  int mi_bins = 10;
  int permutation_repeats = 5;
  double holdout_fraction = 0.25;
  ForestOptions forest;
};

struct ImportanceScores {
  std::vector<double> scores;
  std::vector<std::string> warnings;
};

// Raw, non-negative score per column of `x`. Constant columns score 0 and
// add a warning. A perfect one-feature split gives ANOVA F a zero
// within-class variance; that score is reported as the largest finite double.
ImportanceScores LocalImportance(ImportanceMethod method, const Matrix& x,
                                 const std::vector<int>& y, uint64_t seed,
                                 const ImportanceOptions& options = {});

// Min-max to [0, 1]; a constant column maps to all zeros.
std::vector<double> MinMaxNormalize(const std::vector<double>& raw);

struct ImportanceMatrix {
  std::vector<std::string> feature_names;
  // Normalized, indexed like kAllMethods.
  std::array<std::vector<double>, 5> method_scores;
  std::vector<double> average;
  std::vector<bool> selected;
  std::vector<std::string> warnings;

  std::string ToCsv() const;
};

ImportanceMatrix BuildMatrix(const std::vector<std::string>& names, const Matrix& x,
                             const std::vector<int>& y, uint64_t seed,
                             const ImportanceOptions& options = {});

void to_json(nlohmann::json& j, const ImportanceMatrix& m);

}  // namespace vfl::features
