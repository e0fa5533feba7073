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

#include "vfl/features/importance.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vfl/common/error.h"
#include "vfl/common/random.h"
#include "vfl/features/binning.h"

namespace vfl::features {
namespace {

void CheckInputs(const Matrix& x, const std::vector<int>& y) {
  VFL_ENFORCE(x.rows() > 0 && x.cols() > 0, ErrorCode::kEmptyTable, "empty feature matrix");
  VFL_ENFORCE(static_cast<size_t>(x.rows()) == y.size(), ErrorCode::kLengthMismatch,
              "one label per row required");
  size_t pos = 0;
  for (int v : y) {
    VFL_ENFORCE(v == 0 || v == 1, ErrorCode::kNonBinaryLabel, "labels must be 0/1");
    pos += static_cast<size_t>(v);
  }
  VFL_ENFORCE(pos > 0 && pos < y.size(), ErrorCode::kSingleClassLabels,
              "labels hold a single class");
}

bool IsConstant(const Matrix& x, Eigen::Index j) {
  return x.col(j).maxCoeff() == x.col(j).minCoeff();
}

double AnovaF(const Matrix& x, const std::vector<int>& y, Eigen::Index j) {
  double sum[2] = {0, 0}, count[2] = {0, 0};
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    sum[y[static_cast<size_t>(i)]] += x(i, j);
    count[y[static_cast<size_t>(i)]] += 1;
  }
  const double n = count[0] + count[1];
  const double grand = (sum[0] + sum[1]) / n;
  const double mean[2] = {sum[0] / count[0], sum[1] / count[1]};
  double ssb = 0, ssw = 0;
  for (int c = 0; c < 2; ++c) ssb += count[c] * (mean[c] - grand) * (mean[c] - grand);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double dev = x(i, j) - mean[y[static_cast<size_t>(i)]];
    ssw += dev * dev;
  }
  if (ssb == 0) return 0.0;
  if (ssw == 0) return std::numeric_limits<double>::max();
  return (ssb / 1.0) / (ssw / (n - 2.0));
}

double Chi2(const Matrix& x, const std::vector<int>& y, Eigen::Index j) {
  const double shift = x.col(j).minCoeff();
  double observed[2] = {0, 0}, count[2] = {0, 0};
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    observed[y[static_cast<size_t>(i)]] += x(i, j) - shift;
    count[y[static_cast<size_t>(i)]] += 1;
  }
  const double total = observed[0] + observed[1];
  const double n = count[0] + count[1];
  double chi2 = 0;
  for (int c = 0; c < 2; ++c) {
    const double expected = total * count[c] / n;
    if (expected > 0) chi2 += (observed[c] - expected) * (observed[c] - expected) / expected;
  }
  return chi2;
}

double MutualInfo(const Matrix& x, const std::vector<int>& y, Eigen::Index j, int bins) {
  std::vector<double> col(static_cast<size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) col[static_cast<size_t>(i)] = x(i, j);
  const auto b = EqualFrequencyBins(col, bins);
  std::vector<std::array<double, 2>> joint(static_cast<size_t>(bins), {0, 0});
  double py[2] = {0, 0};
  for (size_t i = 0; i < b.size(); ++i) {
    joint[static_cast<size_t>(b[i])][static_cast<size_t>(y[i])] += 1;
    py[y[i]] += 1;
  }
  const double n = static_cast<double>(b.size());
  double mi = 0;
  for (const auto& cell : joint) {
    const double pb = (cell[0] + cell[1]) / n;
    for (int c = 0; c < 2; ++c) {
      if (cell[static_cast<size_t>(c)] == 0) continue;
      const double pj = cell[static_cast<size_t>(c)] / n;
      mi += pj * std::log(pj / (pb * py[c] / n));
    }
  }
  return std::max(0.0, mi);
}

double Accuracy(const std::vector<double>& proba, const std::vector<int>& y) {
  double hits = 0;
  for (size_t i = 0; i < y.size(); ++i) hits += (proba[i] > 0.5 ? 1 : 0) == y[i];
  return hits / static_cast<double>(y.size());
}

std::vector<double> Permutation(const Matrix& x, const std::vector<int>& y, uint64_t seed,
                                const ImportanceOptions& options) {
  VFL_ENFORCE(options.permutation_repeats >= 1, ErrorCode::kInvalidRepeatCount,
              "permutation importance needs at least one repeat");
  const auto n = static_cast<size_t>(x.rows());
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(DeriveSeed(seed, 1));
  Shuffle(order, rng);
  const auto holdout_n = std::max<size_t>(
      1, static_cast<size_t>(std::floor(options.holdout_fraction * static_cast<double>(n))));
  VFL_ENFORCE(holdout_n < n, ErrorCode::kTooFewRows, "too few rows for a holdout fold");
  std::vector<size_t> hold(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(holdout_n));
  std::vector<size_t> fit(order.begin() + static_cast<std::ptrdiff_t>(holdout_n), order.end());
  std::vector<int> y_fit, y_hold;
  for (size_t r : fit) y_fit.push_back(y[r]);
  for (size_t r : hold) y_hold.push_back(y[r]);
  const Matrix x_fit = SelectRows(x, fit);
  Matrix x_hold = SelectRows(x, hold);

  const auto forest = RandomForest::Fit(x_fit, y_fit, options.forest, DeriveSeed(seed, 2));
  const double base = Accuracy(forest.PredictProba(x_hold), y_hold);
  std::vector<double> scores(static_cast<size_t>(x.cols()), 0.0);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Vector original = x_hold.col(j);
    double drop = 0;
    for (int r = 0; r < options.permutation_repeats; ++r) {
      std::vector<size_t> perm(holdout_n);
      for (size_t i = 0; i < holdout_n; ++i) perm[i] = i;
      Shuffle(perm, rng);
      for (size_t i = 0; i < holdout_n; ++i) {
        x_hold(static_cast<Eigen::Index>(i), j) = original(static_cast<Eigen::Index>(perm[i]));
      }
      drop += base - Accuracy(forest.PredictProba(x_hold), y_hold);
    }
    x_hold.col(j) = original;
    scores[static_cast<size_t>(j)] = std::max(0.0, drop / options.permutation_repeats);
  }
  return scores;
}

}  // namespace

std::string_view MethodName(ImportanceMethod method) {
  switch (method) {
    case ImportanceMethod::kAnovaF: return "anova_f";
    case ImportanceMethod::kChi2: return "chi2";
    case ImportanceMethod::kMutualInfo: return "mutual_info";
    case ImportanceMethod::kImpurity: return "impurity";
    case ImportanceMethod::kPermutation: return "permutation";
  }
  return "unknown";
}

ImportanceMethod ParseMethod(std::string_view name) {
  for (auto m : kAllMethods) {
    if (MethodName(m) == name) return m;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown importance method '" + std::string(name) + "'");
}

ImportanceScores LocalImportance(ImportanceMethod method, const Matrix& x,
                                 const std::vector<int>& y, uint64_t seed,
                                 const ImportanceOptions& options) {
  CheckInputs(x, y);
  if (method == ImportanceMethod::kPermutation) {
    VFL_ENFORCE(options.permutation_repeats >= 1, ErrorCode::kInvalidRepeatCount,
                "permutation importance needs at least one repeat");
  }
  ImportanceScores out;
  out.scores.assign(static_cast<size_t>(x.cols()), 0.0);
  std::vector<double> model_scores;
  if (method == ImportanceMethod::kImpurity) {
    model_scores = RandomForest::Fit(x, y, options.forest, seed).impurity_importance();
  } else if (method == ImportanceMethod::kPermutation) {
    model_scores = Permutation(x, y, seed, options);
  }
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (IsConstant(x, j)) {
      out.warnings.push_back("column " + std::to_string(j) + " is constant; scored 0");
      continue;
    }
    double s = 0;
    switch (method) {
      case ImportanceMethod::kAnovaF: s = AnovaF(x, y, j); break;
      case ImportanceMethod::kChi2: s = Chi2(x, y, j); break;
      case ImportanceMethod::kMutualInfo: s = MutualInfo(x, y, j, options.mi_bins); break;
      case ImportanceMethod::kImpurity:
      case ImportanceMethod::kPermutation: s = model_scores[static_cast<size_t>(j)]; break;
    }
    out.scores[static_cast<size_t>(j)] = s;
  }
  return out;
}

std::vector<double> MinMaxNormalize(const std::vector<double>& raw) {
  if (raw.empty()) return {};
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  std::vector<double> out(raw.size(), 0.0);
  if (*hi == *lo) return out;
  const double lo_v = *lo, hi_v = *hi;
  for (size_t i = 0; i < raw.size(); ++i) {
    // Written as a ratio of differences so the extremes land on exactly 0 and 1.
    out[i] = (raw[i] - lo_v) / (hi_v - lo_v);
    if (raw[i] == hi_v) out[i] = 1.0;
  }
  return out;
}

ImportanceMatrix BuildMatrix(const std::vector<std::string>& names, const Matrix& x,
                             const std::vector<int>& y, uint64_t seed,
                             const ImportanceOptions& options) {
  VFL_ENFORCE(names.size() == static_cast<size_t>(x.cols()), ErrorCode::kLengthMismatch,
              "one name per column required");
  ImportanceMatrix m;
  m.feature_names = names;
  for (size_t k = 0; k < kAllMethods.size(); ++k) {
    auto raw = LocalImportance(kAllMethods[k], x, y, DeriveSeed(seed, k), options);
    if (k == 0) {
      for (const auto& w : raw.warnings) m.warnings.push_back(w);
    }
    m.method_scores[k] = MinMaxNormalize(raw.scores);
  }
  m.average.assign(names.size(), 0.0);
  for (size_t j = 0; j < names.size(); ++j) {
    double s = 0;
    for (const auto& col : m.method_scores) s += col[j];
    m.average[j] = s / 5.0;
  }
  m.selected.assign(names.size(), true);
  return m;
}

std::string ImportanceMatrix::ToCsv() const {
  std::ostringstream out;
  out.precision(17);
  out << "feature";
  for (auto method : kAllMethods) out << ',' << MethodName(method);
  out << ",average,selected\n";
  for (size_t j = 0; j < feature_names.size(); ++j) {
    out << feature_names[j];
    for (const auto& col : method_scores) out << ',' << col[j];
    out << ',' << average[j] << ',' << (selected[j] ? 1 : 0) << '\n';
  }
  return out.str();
}

void to_json(nlohmann::json& j, const ImportanceMatrix& m) {
  nlohmann::json methods = nlohmann::json::object();
  for (size_t k = 0; k < kAllMethods.size(); ++k) {
    methods[std::string(MethodName(kAllMethods[k]))] = m.method_scores[k];
  }
  std::vector<bool> selected = m.selected;
  j = nlohmann::json{{"feature_names", m.feature_names},
                     {"method_scores", methods},
                     {"average", m.average},
                     {"selected", selected},
                     {"warnings", m.warnings}};
}

}  // namespace vfl::features
