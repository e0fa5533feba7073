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

#include <cstdint>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "vfl/common/matrix.h"

namespace vfl::samples {

enum class EmbedMethod { kTsne, kPca };

std::string_view EmbedMethodName(EmbedMethod method);
EmbedMethod ParseEmbedMethod(std::string_view name);

struct TsneOptions {
  double perplexity = 30.0;
  int iterations = 1000;
  // Barnes-Hut opening angle.
  double theta = 0.5;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  int exaggeration_iterations = 250;
};

struct Embedding2D {
  Matrix coords;  // n x 2, row i belongs to input row i
  EmbedMethod method = EmbedMethod::kPca;
  uint64_t seed = 0;
  double perplexity = 0.0;
};

void to_json(nlohmann::json& j, const Embedding2D& e);

// Z-scores the columns, then projects to two dimensions. PCA is exact and
// seed-free; t-SNE is Barnes-Hut with a sparse k-nearest-neighbour P.
// Throws kTooFewRows below three rows.
Embedding2D Embed2D(const Matrix& x, EmbedMethod method, uint64_t seed,
                    const TsneOptions& options = {});

Matrix PcaProject(const Matrix& standardized);
Matrix BarnesHutTsne(const Matrix& standardized, uint64_t seed, const TsneOptions& options);

}  // namespace vfl::samples
