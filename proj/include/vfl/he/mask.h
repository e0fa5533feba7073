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

#include <gmpxx.h>

#include <utility>

#include "vfl/common/role.h"
#include "vfl/he/paillier.h"

namespace vfl::he {

inline constexpr unsigned kHidingMarginBits = 40;

struct MaskConfig {
  // Upper bound on |plaintext| in bits.
  unsigned plaintext_bits = 128;
  // Masks are uniform in [0, 2^mask_bits). Zero means plaintext_bits + 40.
  unsigned mask_bits = 0;
  // Test mode: every mask is 0.
  bool zero_mask = false;

  unsigned EffectiveMaskBits() const {
    return mask_bits == 0 ? plaintext_bits + kHidingMarginBits : mask_bits;
  }
};

struct Mask {
  mpz_class value;
  Role owner = Role::kHost;
};

// Throws kMaskRangeTooSmall when the configured range gives less than the
// 40-bit hiding margin or does not fit below n / 2.
void ValidateMaskConfig(const PublicKey& pk, const MaskConfig& config);

std::pair<Ciphertext, Mask> MaskAdd(const PublicKey& pk, const Ciphertext& a,
                                    RandomSource& rng, const MaskConfig& config,
                                    Role owner);

// (value - mask) mod n, in ring form.
mpz_class Unmask(const PublicKey& pk, const mpz_class& value, const Mask& mask);

}  // namespace vfl::he
