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
#include <random>
#include <vector>

namespace vfl {

// mt19937_64 is fully specified by the standard, unlike the distributions,
// so everything seeded goes through these helpers to stay reproducible
// across standard libraries.
using Rng = std::mt19937_64;

// Uniform integer in [0, bound) by rejection sampling.
uint64_t UniformIndex(Rng& rng, uint64_t bound);

// Uniform double in [0, 1) with 53 random bits.
double UniformUnit(Rng& rng);

// Standard normal via Box-Muller.
double StandardNormal(Rng& rng);

template <typename T>
void Shuffle(std::vector<T>& items, Rng& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    const size_t j = UniformIndex(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

// Derives an independent stream seed from a base seed and a salt; used to
// give each cluster/ring/tree its own reproducible generator.
uint64_t DeriveSeed(uint64_t base, uint64_t salt);

}  // namespace vfl
