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

#include "vfl/samples/rings.h"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "vfl/common/error.h"
#include "vfl/common/random.h"

namespace vfl::samples {

std::vector<double> RingSpec::Boundaries() const {
  std::vector<double> b;
  for (int i = 1; i < n_rings; ++i) b.push_back(std::sqrt(SquaredBoundary(i)));
  return b;
}

void RingSpec::Validate() const {
  VFL_ENFORCE(n_rings >= 1, ErrorCode::kInvalidArgument, "n_rings must be positive");
  VFL_ENFORCE(r > 0 && std::isfinite(r), ErrorCode::kInvalidArgument, "r must be positive");
}

void to_json(nlohmann::json& j, const RingSpec& s) {
  j = nlohmann::json{{"n_rings", s.n_rings},
                     {"r", s.r},
                     {"normalize", s.normalize},
                     {"boundaries", s.Boundaries()}};
}

void from_json(const nlohmann::json& j, RingSpec& s) {
  s.n_rings = j.value("n_rings", 11);
  s.r = j.value("r", 0.5);
  s.normalize = j.value("normalize", false);
  s.Validate();
}

int RingIndex(double distance, const std::vector<double>& boundaries) {
  return static_cast<int>(std::upper_bound(boundaries.begin(), boundaries.end(), distance) -
                          boundaries.begin());
}

std::vector<int> RingPartition(const Matrix& coords, const std::vector<size_t>& members,
                               const Vector& centroid, const RingSpec& spec) {
  spec.Validate();
  std::vector<double> dist;
  dist.reserve(members.size());
  for (size_t m : members) {
    const double dx = coords(static_cast<Eigen::Index>(m), 0) - centroid(0);
    const double dy = coords(static_cast<Eigen::Index>(m), 1) - centroid(1);
    dist.push_back(std::sqrt(dx * dx + dy * dy));
  }
  if (spec.normalize && !dist.empty()) {
    double ss = 0;
    for (double d : dist) ss += d * d;
    const double rms = std::sqrt(ss / static_cast<double>(dist.size()));
    if (rms > 0) {
      for (double& d : dist) d /= rms;
    }
  }
  const auto boundaries = spec.Boundaries();
  std::vector<int> rings;
  rings.reserve(dist.size());
  for (double d : dist) rings.push_back(RingIndex(d, boundaries));
  return rings;
}

void to_json(nlohmann::json& j, const SamplePlan& p) {
  nlohmann::json rates = nlohmann::json::object();
  for (const auto& [c, r] : p.rates) rates[std::to_string(c)] = r;
  j = nlohmann::json{{"seed", p.seed}, {"rates", rates}};
}

void from_json(const nlohmann::json& j, SamplePlan& p) {
  p.seed = j.value("seed", uint64_t{0});
  p.rates.clear();
  if (j.contains("rates")) {
    for (auto it = j.at("rates").begin(); it != j.at("rates").end(); ++it) {
      p.rates[std::stoi(it.key())] = it.value().get<std::vector<double>>();
    }
  }
}

std::vector<size_t> ApplyPlan(const std::vector<std::vector<std::vector<size_t>>>& ring_members,
                              const SamplePlan& plan, int n_rings) {
  for (const auto& [c, rates] : plan.rates) {
    VFL_ENFORCE(c >= 0 && static_cast<size_t>(c) < ring_members.size(),
                ErrorCode::kInvalidArgument, "plan names an unknown cluster");
    VFL_ENFORCE(rates.size() == static_cast<size_t>(n_rings), ErrorCode::kInvalidArgument,
                "plan needs one rate per ring");
    for (double rate : rates) {
      VFL_ENFORCE(rate >= 0.0 && rate <= 1.0, ErrorCode::kRateOutOfRange,
                  "rates must lie in [0, 1]");
    }
  }
  std::vector<size_t> kept;
  for (size_t c = 0; c < ring_members.size(); ++c) {
    auto it = plan.rates.find(static_cast<int>(c));
    for (size_t ring = 0; ring < ring_members[c].size(); ++ring) {
      std::vector<size_t> members = ring_members[c][ring];
      const double rate = it == plan.rates.end() ? 1.0 : it->second[ring];
      // The epsilon keeps e.g. 0.1 * 20 from rounding up to 3.
      const auto keep = static_cast<size_t>(
          std::ceil(rate * static_cast<double>(members.size()) - 1e-9));
      if (keep >= members.size()) {
        kept.insert(kept.end(), members.begin(), members.end());
        continue;
      }
      std::sort(members.begin(), members.end());
      Rng rng(DeriveSeed(DeriveSeed(plan.seed, c), ring));
      // Partial Fisher-Yates: the first `keep` slots form the sample.
      for (size_t m = 0; m < keep; ++m) {
        std::swap(members[m], members[m + UniformIndex(rng, members.size() - m)]);
      }
      kept.insert(kept.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(keep));
    }
  }
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  return kept;
}

}  // namespace vfl::samples
