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

#include "vfl/features/external_iv.h"

#include <unordered_map>

#include "vfl/common/error.h"
#include "vfl/features/binning.h"
#include "vfl/party_data/alignment.h"

namespace vfl::features {

void to_json(nlohmann::json& j, const ExternalIvReport& r) {
  j = nlohmann::json{{"anonymous_feature_ids", r.anonymous_feature_ids},
                     {"iv", r.iv},
                     {"bin_count", r.bin_count}};
}

nlohmann::json HostIvRequest(const party_data::PartyTable& host, const std::string& salt,
                             const std::vector<std::string>& ids, const he::PublicKey& pk,
                             he::RandomSource& rng) {
  VFL_ENFORCE(host.labels().has_value(), ErrorCode::kInvalidArgument, "host has no labels");
  nlohmann::json tokens = nlohmann::json::array();
  nlohmann::json labels = nlohmann::json::array();
  for (const auto& id : ids) {
    auto row = host.RowOf(id);
    VFL_ENFORCE(row.has_value(), ErrorCode::kInvalidArgument, "id unknown to the host");
    tokens.push_back(party_data::DeidentifyId(salt, id));
    labels.push_back(he::MpzToBase64(pk.Encrypt((*host.labels())[*row], rng).value()));
  }
  return {{"public_key", he::PublicKeyToJson(pk)},
          {"key_id", pk.key_id()},
          {"tokens", tokens},
          {"labels", labels}};
}

nlohmann::json GuestIvResponse(const party_data::PartyTable& guest, const std::string& salt,
                               const nlohmann::json& request, int bins) {
  VFL_ENFORCE(bins >= 2, ErrorCode::kBinCountTooSmall, "need at least two bins");
  const he::PublicKey pk = he::PublicKeyFromJson(request.at("public_key"));
  std::unordered_map<std::string, size_t> row_of;
  for (size_t i = 0; i < guest.rows(); ++i) {
    row_of.emplace(party_data::DeidentifyId(salt, guest.sample_ids()[i]), i);
  }
  const auto& tokens = request.at("tokens");
  const auto& labels = request.at("labels");
  VFL_ENFORCE(tokens.size() == labels.size(), ErrorCode::kParseError, "tokens/labels mismatch");
  std::vector<size_t> rows;
  std::vector<he::Ciphertext> enc_y;
  for (size_t k = 0; k < tokens.size(); ++k) {
    auto it = row_of.find(tokens[k].get<std::string>());
    VFL_ENFORCE(it != row_of.end(), ErrorCode::kGuestMissingIds,
                "guest lacks a requested id");
    rows.push_back(it->second);
    enc_y.emplace_back(he::MpzFromBase64(labels[k].get<std::string>()), pk.key_id());
  }

  nlohmann::json features = nlohmann::json::array();
  for (Eigen::Index j = 0; j < guest.features().cols(); ++j) {
    std::vector<double> column(rows.size());
    for (size_t k = 0; k < rows.size(); ++k) {
      column[k] = guest.features()(static_cast<Eigen::Index>(rows[k]), j);
    }
    const auto bin = EqualFrequencyBins(column, bins);
    std::vector<he::Ciphertext> bad(static_cast<size_t>(bins), pk.EncryptDeterministic(0));
    std::vector<size_t> count(static_cast<size_t>(bins), 0);
    for (size_t k = 0; k < rows.size(); ++k) {
      const auto b = static_cast<size_t>(bin[k]);
      bad[b] = pk.Add(bad[b], enc_y[k]);
      ++count[b];
    }
    nlohmann::json per_bin = nlohmann::json::array();
    for (size_t b = 0; b < count.size(); ++b) {
      per_bin.push_back({{"count", count[b]}, {"bad", he::MpzToBase64(bad[b].value())}});
    }
    features.push_back(
        {{"id", party_data::AnonymousFeatureId(static_cast<size_t>(j))}, {"bins", per_bin}});
  }
  return {{"key_id", pk.key_id()}, {"features", features}};
}

ExternalIvReport HostIvFinish(const nlohmann::json& response, const he::KeyPair& keys,
                              int bins) {
  const auto& pk = keys.public_key;
  VFL_ENFORCE(response.at("key_id").get<std::string>() == pk.key_id(), ErrorCode::kKeyMismatch,
              "IV response under a different key");
  ExternalIvReport report;
  report.bin_count = bins;
  for (const auto& feature : response.at("features")) {
    std::vector<BinCounts> counts;
    for (const auto& b : feature.at("bins")) {
      const he::Ciphertext c(he::MpzFromBase64(b.at("bad").get<std::string>()), pk.key_id());
      const double bad = pk.SignedDecode(keys.private_key.Decrypt(c)).get_d();
      const double total = b.at("count").get<double>();
      counts.push_back({total - bad, bad});
    }
    report.anonymous_feature_ids.push_back(feature.at("id").get<std::string>());
    report.iv.push_back(InformationValue(counts));
  }
  return report;
}

ExternalIvReport ExternalIv(const party_data::PartyTable& host,
                            const party_data::PartyTable& guest, const std::string& salt,
                            const std::vector<std::string>& ids, int bins,
                            const he::KeyPair& keys, he::RandomSource& rng,
                            IvTranscript* transcript) {
  VFL_ENFORCE(bins >= 2, ErrorCode::kBinCountTooSmall, "need at least two bins");
  const std::string request = HostIvRequest(host, salt, ids, keys.public_key, rng).dump();
  const std::string response =
      GuestIvResponse(guest, salt, nlohmann::json::parse(request), bins).dump();
  if (transcript) {
    transcript->host_to_guest.push_back(request);
    transcript->guest_to_host.push_back(response);
  }
  return HostIvFinish(nlohmann::json::parse(response), keys, bins);
}

}  // namespace vfl::features
