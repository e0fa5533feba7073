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

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace vfl::he {

// Source of uniform big integers. Production keys and encryptions draw from
// the OS CSPRNG; the seeded variant exists only for reproducible tests.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  // Uniform in [0, 2^bits).
  virtual mpz_class Bits(unsigned bits) = 0;
  // Uniform in [0, bound).
  mpz_class Below(const mpz_class& bound);
};

class SecureRandom final : public RandomSource {
 public:
  mpz_class Bits(unsigned bits) override;
};

class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(uint64_t seed);
  mpz_class Bits(unsigned bits) override;

 private:
  gmp_randclass state_;
};

std::unique_ptr<RandomSource> MakeRandom(std::optional<uint64_t> seed);

class Ciphertext {
 public:
  Ciphertext() = default;
  Ciphertext(mpz_class value, std::string key_id)
      : value_(std::move(value)), key_id_(std::move(key_id)) {}

  const mpz_class& value() const { return value_; }
  const std::string& key_id() const { return key_id_; }

 private:
  mpz_class value_;
  std::string key_id_;
};

// Paillier public key with g = n + 1.
class PublicKey {
 public:
  PublicKey() = default;
  explicit PublicKey(mpz_class n);

  const mpz_class& n() const { return n_; }
  const mpz_class& n_squared() const { return n_squared_; }
  mpz_class g() const { return n_ + 1; }
  const std::string& key_id() const { return key_id_; }
  unsigned key_bits() const;

  // Plaintexts live in Z_n; negative values map to n - |m|.
  mpz_class ToRing(const mpz_class& signed_value) const;
  // Values above n/2 read back as negative.
  mpz_class SignedDecode(const mpz_class& ring_value) const;

  Ciphertext Encrypt(const mpz_class& m, RandomSource& rng) const;
  // Encryption with r = 1. Only ever combined with a fresh ciphertext.
  Ciphertext EncryptDeterministic(const mpz_class& m) const;

  Ciphertext Add(const Ciphertext& a, const Ciphertext& b) const;
  Ciphertext AddPlain(const Ciphertext& a, const mpz_class& m) const;
  // k may be negative.
  Ciphertext Scale(const Ciphertext& a, const mpz_class& k) const;
  // Fresh randomness on an existing ciphertext.
  Ciphertext Rerandomize(const Ciphertext& a, RandomSource& rng) const;

  bool Owns(const Ciphertext& c) const { return c.key_id() == key_id_; }

 private:
  void CheckKey(const Ciphertext& c) const;

  mpz_class n_;
  mpz_class n_squared_;
  std::string key_id_;
};

class PrivateKey {
 public:
  PrivateKey() = default;
  PrivateKey(mpz_class p, mpz_class q);

  const PublicKey& public_key() const { return public_key_; }
  const mpz_class& p() const { return p_; }
  const mpz_class& q() const { return q_; }

  // Returns the ring value in [0, n).
  mpz_class Decrypt(const Ciphertext& c) const;

 private:
  PublicKey public_key_;
  mpz_class p_;
  mpz_class q_;
  mpz_class lambda_;
  mpz_class mu_;
};

struct KeyPair {
  PublicKey public_key;
  PrivateKey private_key;
  unsigned key_bits = 0;
};

bool IsSupportedKeySize(unsigned key_bits);

// Supported sizes: 512, 1024, 2048. `seed` makes generation deterministic and
// is for tests only.
KeyPair Keygen(unsigned key_bits, std::optional<uint64_t> seed = std::nullopt);

// Wire forms: ciphertexts as base64 of big-endian magnitude bytes plus key
// id; public key {n, g}; private key {p, q}. Integers in keys are decimal.
std::string MpzToBase64(const mpz_class& v);
mpz_class MpzFromBase64(const std::string& text);

nlohmann::json CiphertextToJson(const Ciphertext& c);
Ciphertext CiphertextFromJson(const nlohmann::json& j);
nlohmann::json PublicKeyToJson(const PublicKey& pk);
PublicKey PublicKeyFromJson(const nlohmann::json& j);
nlohmann::json PrivateKeyToJson(const PrivateKey& sk);
PrivateKey PrivateKeyFromJson(const nlohmann::json& j);

}  // namespace vfl::he
