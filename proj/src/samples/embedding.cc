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

#include "vfl/samples/embedding.h"

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "vfl/common/error.h"

namespace vfl::samples {

std::string_view EmbedMethodName(EmbedMethod method) {
  return method == EmbedMethod::kTsne ? "tsne" : "pca";
}

EmbedMethod ParseEmbedMethod(std::string_view name) {
  if (name == "tsne") return EmbedMethod::kTsne;
  if (name == "pca") return EmbedMethod::kPca;
  throw Error(ErrorCode::kInvalidArgument, "embedding method must be tsne or pca");
}

void to_json(nlohmann::json& j, const Embedding2D& e) {
  nlohmann::json coords = nlohmann::json::array();
  for (Eigen::Index i = 0; i < e.coords.rows(); ++i) {
    coords.push_back({e.coords(i, 0), e.coords(i, 1)});
  }
  j = nlohmann::json{{"method", EmbedMethodName(e.method)},
                     {"seed", e.seed},
                     {"perplexity", e.perplexity},
                     {"coords", coords}};
}

Matrix PcaProject(const Matrix& z) {
  const Eigen::Index n = z.rows();
  const Eigen::Index d = z.cols();
  Matrix out = Matrix::Zero(n, 2);
  if (d == 0) return out;
  const Eigen::MatrixXd centered = z.rowwise() - z.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  // Eigenvalues come back ascending.
  for (Eigen::Index c = 0; c < std::min<Eigen::Index>(2, d); ++c) {
    Eigen::VectorXd v = solver.eigenvectors().col(d - 1 - c);
    // Fix the sign so the largest loading is positive.
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    if (solver.eigenvalues()(d - 1 - c) <= 0) continue;
    out.col(c) = centered * v;
  }
  return out;
}

Embedding2D Embed2D(const Matrix& x, EmbedMethod method, uint64_t seed,
                    const TsneOptions& options) {
  VFL_ENFORCE(x.rows() >= 3, ErrorCode::kTooFewRows, "embedding needs at least 3 rows");
  VFL_ENFORCE(x.allFinite(), ErrorCode::kInvalidArgument, "non-finite feature value");
  const Matrix z = Standardizer::Fit(x).Apply(x);
  Embedding2D e;
  e.method = method;
  e.seed = seed;
  if (method == EmbedMethod::kPca) {
    e.coords = PcaProject(z);
  } else {
    e.perplexity = options.perplexity;
    e.coords = BarnesHutTsne(z, seed, options);
  }
  return e;
}

}  // namespace vfl::samples
