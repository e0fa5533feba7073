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

#include "vfl/he/fixed_point.h"

#include <cmath>

#include "vfl/common/error.h"

namespace vfl::he {

FixedPoint FixedPoint::Encode(double x, int scale_bits) {
  VFL_ENFORCE(std::isfinite(x), ErrorCode::kInvalidArgument,
              "cannot encode a non-finite value");
  VFL_ENFORCE(scale_bits >= 0 && scale_bits <= 900, ErrorCode::kInvalidArgument,
              "scale_bits out of range");
  FixedPoint fp;
  fp.scale_bits = scale_bits;
  // ldexp is exact; only the rounding step loses information.
  mpz_set_d(fp.mantissa.get_mpz_t(), std::nearbyint(std::ldexp(x, scale_bits)));
  return fp;
}

double FixedPoint::Decode() const { return DecodeScaled(mantissa, scale_bits); }

double DecodeScaled(const mpz_class& mantissa, int scale_bits) {
  // mpz_get_d_2exp keeps the leading 53 bits even for huge mantissas.
  long exp = 0;
  const double frac = mpz_get_d_2exp(&exp, mantissa.get_mpz_t());
  return std::ldexp(frac, static_cast<int>(exp) - scale_bits);
}

}  // namespace vfl::he
