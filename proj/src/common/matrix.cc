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

#include "vfl/common/matrix.h"

#include <cmath>

#include "vfl/common/error.h"

namespace vfl {

Matrix SelectRows(const Matrix& source, const std::vector<size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), source.cols());
  for (size_t i = 0; i < rows.size(); ++i) {
    VFL_ENFORCE(rows[i] < static_cast<size_t>(source.rows()),
                ErrorCode::kInvalidArgument, "row index out of range");
    out.row(static_cast<Eigen::Index>(i)) =
        source.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

Matrix SelectColumns(const Matrix& source, const std::vector<size_t>& cols) {
  Matrix out(source.rows(), static_cast<Eigen::Index>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) {
    VFL_ENFORCE(cols[j] < static_cast<size_t>(source.cols()),
                ErrorCode::kInvalidArgument, "column index out of range");
    out.col(static_cast<Eigen::Index>(j)) =
        source.col(static_cast<Eigen::Index>(cols[j]));
  }
  return out;
}

Standardizer Standardizer::Fit(const Matrix& x) {
  Standardizer s;
  const auto n = static_cast<double>(x.rows());
  s.mean = Vector::Zero(x.cols());
  s.scale = Vector::Ones(x.cols());
  if (x.rows() == 0) return s;
  s.mean = x.colwise().mean().transpose();
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - s.mean(j)).square().sum() / n;
    if (var > 0.0) s.scale(j) = std::sqrt(var);
  }
  return s;
}

Matrix Standardizer::Apply(const Matrix& x) const {
  VFL_ENFORCE(x.cols() == mean.size(), ErrorCode::kFeatureSpaceMismatch,
              "standardizer fitted on a different number of columns");
  Matrix out = x;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    out.col(j) = (x.col(j).array() - mean(j)) / scale(j);
  }
  return out;
}

std::vector<double> ToStdVector(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Vector FromStdVector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace vfl
