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

#include "vfl/he/mask.h"

#include "vfl/common/error.h"

namespace vfl::he {

void ValidateMaskConfig(const PublicKey& pk, const MaskConfig& config) {
  const unsigned bits = config.EffectiveMaskBits();
  VFL_ENFORCE(bits >= config.plaintext_bits + kHidingMarginBits,
              ErrorCode::kMaskRangeTooSmall,
              "mask range 2^" + std::to_string(bits) + " < 2^(plaintext_bits + 40)");
  // plaintext + mask must stay below n/2 so signed decoding is unambiguous.
  VFL_ENFORCE(bits + 2 < pk.key_bits(), ErrorCode::kMaskRangeTooSmall,
              "key of " + std::to_string(pk.key_bits()) +
                  " bits cannot hold a 2^" + std::to_string(bits) + " mask");
}

std::pair<Ciphertext, Mask> MaskAdd(const PublicKey& pk, const Ciphertext& a,
                                    RandomSource& rng, const MaskConfig& config,
                                    Role owner) {
  ValidateMaskConfig(pk, config);
  Mask mask;
  mask.owner = owner;
  if (!config.zero_mask) mask.value = rng.Bits(config.EffectiveMaskBits());
  return {pk.AddPlain(a, mask.value), std::move(mask)};
}

mpz_class Unmask(const PublicKey& pk, const mpz_class& value, const Mask& mask) {
  return pk.ToRing(value - mask.value);
}

}  // namespace vfl::he
