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

namespace vfl::he {

inline constexpr int kDefaultScaleBits = 40;

// Real number as round(x * 2^scale_bits). Products of two encodings carry
// the sum of the scales.
struct FixedPoint {
  mpz_class mantissa;
  int scale_bits = kDefaultScaleBits;

  static FixedPoint Encode(double x, int scale_bits = kDefaultScaleBits);
  double Decode() const;
};

// Signed integer mantissa / 2^scale_bits as a double.
double DecodeScaled(const mpz_class& mantissa, int scale_bits);

}  // namespace vfl::he
