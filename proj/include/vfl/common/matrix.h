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

#include <Eigen/Dense>
#include <vector>

namespace vfl {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Rows of `source` picked in the given order.
Matrix SelectRows(const Matrix& source, const std::vector<size_t>& rows);
Matrix SelectColumns(const Matrix& source, const std::vector<size_t>& cols);

// Per-column z-score. Columns with zero spread keep scale 1 so they map to 0.
struct Standardizer {
  Vector mean;
  Vector scale;

  static Standardizer Fit(const Matrix& x);
  Matrix Apply(const Matrix& x) const;
};

std::vector<double> ToStdVector(const Vector& v);
Vector FromStdVector(const std::vector<double>& v);

}  // namespace vfl
