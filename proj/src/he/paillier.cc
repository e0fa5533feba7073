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

#include "vfl/he/paillier.h"

#include <openssl/rand.h>

#include <nlohmann/json.hpp>
#include <vector>

#include "vfl/common/encoding.h"
#include "vfl/common/error.h"

namespace vfl::he {
namespace {

std::vector<uint8_t> MpzToBytes(const mpz_class& v) {
  const size_t size = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
  std::vector<uint8_t> bytes(size);
  size_t written = 0;
  mpz_export(bytes.data(), &written, 1, 1, 1, 0, v.get_mpz_t());
  bytes.resize(written);
  return bytes;
}

mpz_class MpzFromBytes(const std::vector<uint8_t>& bytes) {
  mpz_class v;
  if (!bytes.empty()) mpz_import(v.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  return v;
}

// Random prime with exactly `bits` bits and the top two bits set, so the
// product of two such primes has exactly 2*bits bits.
mpz_class RandomPrime(unsigned bits, RandomSource& rng) {
  mpz_class candidate = rng.Bits(bits);
  mpz_setbit(candidate.get_mpz_t(), bits - 1);
  mpz_setbit(candidate.get_mpz_t(), bits - 2);
  mpz_class prime;
  mpz_nextprime(prime.get_mpz_t(), candidate.get_mpz_t());
  if (mpz_sizeinbase(prime.get_mpz_t(), 2) != bits) return RandomPrime(bits, rng);
  return prime;
}

}  // namespace

mpz_class RandomSource::Below(const mpz_class& bound) {
  VFL_ENFORCE(bound > 0, ErrorCode::kInvalidArgument, "bound must be positive");
  const auto bits = static_cast<unsigned>(mpz_sizeinbase(bound.get_mpz_t(), 2));
  mpz_class x = Bits(bits);
  while (x >= bound) x = Bits(bits);
  return x;
}

mpz_class SecureRandom::Bits(unsigned bits) {
  std::vector<uint8_t> bytes((bits + 7) / 8);
  if (!bytes.empty()) {
    VFL_ENFORCE(RAND_bytes(bytes.data(), static_cast<int>(bytes.size())) == 1,
                ErrorCode::kIoError, "RAND_bytes failed");
  }
  mpz_class v = MpzFromBytes(bytes);
  mpz_fdiv_r_2exp(v.get_mpz_t(), v.get_mpz_t(), bits);
  return v;
}

SeededRandom::SeededRandom(uint64_t seed) : state_(gmp_randinit_mt) {
  state_.seed(mpz_class(std::to_string(seed)));
}

mpz_class SeededRandom::Bits(unsigned bits) { return state_.get_z_bits(bits); }

std::unique_ptr<RandomSource> MakeRandom(std::optional<uint64_t> seed) {
  if (seed) return std::make_unique<SeededRandom>(*seed);
  return std::make_unique<SecureRandom>();
}

PublicKey::PublicKey(mpz_class n) : n_(std::move(n)), n_squared_(n_ * n_) {
  const auto digest = Sha256(Base64Encode(MpzToBytes(n_)));
  key_id_ = HexEncode(std::span<const uint8_t>(digest.data(), 8));
}

unsigned PublicKey::key_bits() const {
  return static_cast<unsigned>(mpz_sizeinbase(n_.get_mpz_t(), 2));
}

mpz_class PublicKey::ToRing(const mpz_class& signed_value) const {
  mpz_class r;
  mpz_mod(r.get_mpz_t(), signed_value.get_mpz_t(), n_.get_mpz_t());
  return r;
}

mpz_class PublicKey::SignedDecode(const mpz_class& ring_value) const {
  mpz_class half = n_ / 2;
  if (ring_value > half) return ring_value - n_;
  return ring_value;
}

void PublicKey::CheckKey(const Ciphertext& c) const {
  VFL_ENFORCE(c.key_id() == key_id_, ErrorCode::kKeyMismatch,
              "ciphertext key " + c.key_id() + " != " + key_id_);
  VFL_ENFORCE(c.value() >= 0 && c.value() < n_squared_,
              ErrorCode::kInvalidArgument, "ciphertext outside [0, n^2)");
}

Ciphertext PublicKey::EncryptDeterministic(const mpz_class& m) const {
  // (1 + n)^m = 1 + m*n (mod n^2)
  mpz_class c = ToRing(m) * n_ + 1;
  mpz_mod(c.get_mpz_t(), c.get_mpz_t(), n_squared_.get_mpz_t());
  return Ciphertext(std::move(c), key_id_);
}

Ciphertext PublicKey::Encrypt(const mpz_class& m, RandomSource& rng) const {
  return Rerandomize(EncryptDeterministic(m), rng);
}

Ciphertext PublicKey::Rerandomize(const Ciphertext& a, RandomSource& rng) const {
  CheckKey(a);
  mpz_class r = rng.Below(n_);
  while (r == 0 || gcd(r, n_) != 1) r = rng.Below(n_);
  mpz_class rn;
  mpz_powm(rn.get_mpz_t(), r.get_mpz_t(), n_.get_mpz_t(), n_squared_.get_mpz_t());
  mpz_class c = a.value() * rn;
  mpz_mod(c.get_mpz_t(), c.get_mpz_t(), n_squared_.get_mpz_t());
  return Ciphertext(std::move(c), key_id_);
}

Ciphertext PublicKey::Add(const Ciphertext& a, const Ciphertext& b) const {
  CheckKey(a);
  CheckKey(b);
  mpz_class c = a.value() * b.value();
  mpz_mod(c.get_mpz_t(), c.get_mpz_t(), n_squared_.get_mpz_t());
  return Ciphertext(std::move(c), key_id_);
}

Ciphertext PublicKey::AddPlain(const Ciphertext& a, const mpz_class& m) const {
  CheckKey(a);
  return Add(a, EncryptDeterministic(m));
}

Ciphertext PublicKey::Scale(const Ciphertext& a, const mpz_class& k) const {
  CheckKey(a);
  mpz_class base = a.value();
  mpz_class exponent = k;
  if (k < 0) {
    // c^{-|k|}: invert once, then a short exponent instead of n - |k|.
    VFL_ENFORCE(mpz_invert(base.get_mpz_t(), base.get_mpz_t(),
                           n_squared_.get_mpz_t()) != 0,
                ErrorCode::kInvalidArgument, "ciphertext not invertible");
    exponent = -k;
  }
  mpz_class c;
  mpz_powm(c.get_mpz_t(), base.get_mpz_t(), exponent.get_mpz_t(),
           n_squared_.get_mpz_t());
  return Ciphertext(std::move(c), key_id_);
}

PrivateKey::PrivateKey(mpz_class p, mpz_class q)
    : public_key_(p * q), p_(std::move(p)), q_(std::move(q)) {
  mpz_class pm1 = p_ - 1;
  mpz_class qm1 = q_ - 1;
  mpz_lcm(lambda_.get_mpz_t(), pm1.get_mpz_t(), qm1.get_mpz_t());
  VFL_ENFORCE(mpz_invert(mu_.get_mpz_t(), lambda_.get_mpz_t(),
                         public_key_.n().get_mpz_t()) != 0,
              ErrorCode::kInvalidArgument, "lambda not invertible mod n");
}

mpz_class PrivateKey::Decrypt(const Ciphertext& c) const {
  VFL_ENFORCE(c.key_id() == public_key_.key_id(), ErrorCode::kKeyMismatch,
              "ciphertext key " + c.key_id() + " != " + public_key_.key_id());
  const mpz_class& n = public_key_.n();
  mpz_class u;
  mpz_powm(u.get_mpz_t(), c.value().get_mpz_t(), lambda_.get_mpz_t(),
           public_key_.n_squared().get_mpz_t());
  mpz_class l = (u - 1) / n;
  mpz_class m = l * mu_;
  mpz_mod(m.get_mpz_t(), m.get_mpz_t(), n.get_mpz_t());
  return m;
}

bool IsSupportedKeySize(unsigned key_bits) {
  return key_bits == 512 || key_bits == 1024 || key_bits == 2048;
}

KeyPair Keygen(unsigned key_bits, std::optional<uint64_t> seed) {
  VFL_ENFORCE(IsSupportedKeySize(key_bits), ErrorCode::kUnsupportedKeySize,
              "key size " + std::to_string(key_bits) + " not in {512,1024,2048}");
  auto rng = MakeRandom(seed);
  const unsigned half = key_bits / 2;
  while (true) {
    mpz_class p = RandomPrime(half, *rng);
    mpz_class q = RandomPrime(half, *rng);
    if (p == q) continue;
    mpz_class n = p * q;
    mpz_class phi = (p - 1) * (q - 1);
    if (gcd(n, phi) != 1) continue;
    KeyPair kp;
    kp.private_key = PrivateKey(std::move(p), std::move(q));
    kp.public_key = kp.private_key.public_key();
    kp.key_bits = key_bits;
    return kp;
  }
}

std::string MpzToBase64(const mpz_class& v) {
  VFL_ENFORCE(v >= 0, ErrorCode::kInvalidArgument, "wire integers are unsigned");
  return Base64Encode(MpzToBytes(v));
}

mpz_class MpzFromBase64(const std::string& text) {
  return MpzFromBytes(Base64Decode(text));
}

nlohmann::json CiphertextToJson(const Ciphertext& c) {
  return {{"value", MpzToBase64(c.value())}, {"key_id", c.key_id()}};
}

Ciphertext CiphertextFromJson(const nlohmann::json& j) {
  return Ciphertext(MpzFromBase64(j.at("value").get<std::string>()),
                    j.at("key_id").get<std::string>());
}

nlohmann::json PublicKeyToJson(const PublicKey& pk) {
  return {{"n", pk.n().get_str()}, {"g", pk.g().get_str()}};
}

PublicKey PublicKeyFromJson(const nlohmann::json& j) {
  PublicKey pk(mpz_class(j.at("n").get<std::string>()));
  VFL_ENFORCE(mpz_class(j.at("g").get<std::string>()) == pk.g(),
              ErrorCode::kParseError, "only g = n + 1 keys are supported");
  return pk;
}

nlohmann::json PrivateKeyToJson(const PrivateKey& sk) {
  return {{"p", sk.p().get_str()}, {"q", sk.q().get_str()}};
}

PrivateKey PrivateKeyFromJson(const nlohmann::json& j) {
  return PrivateKey(mpz_class(j.at("p").get<std::string>()),
                    mpz_class(j.at("q").get<std::string>()));
}

}  // namespace vfl::he
