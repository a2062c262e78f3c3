/* Copyright 2026 The sinfer Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SINFER_NOISE_MINI_BFV_HPP
#define SINFER_NOISE_MINI_BFV_HPP

// Minimal symmetric-key BFV over Z_q[X]/(X^n + 1) with exact big-integer
// arithmetic. Supports encryption, addition, plaintext multiplication and
// rotation without key switching; used to cross-check the error tracker.
// No security-level check is applied to the parameters.

#include <cstdint>
#include <span>
#include <vector>

#include "sinfer/core/model.hpp"
#include "sinfer/noise/error.hpp"

namespace sinfer {

struct SecretKey {
  std::vector<i128> s;  // ternary
};

struct Ciphertext {
  std::vector<BigInt> c0;  // in [0, q)
  std::vector<BigInt> c1;  // in [0, q)
};

class MiniBfv {
 public:
  MiniBfv(CryptoParams params, NoiseModel model);

  const CryptoParams& params() const { return params_; }
  const BigInt& delta() const { return delta_; }

  SecretKey keygen(std::uint64_t seed) const;

  /// (c0, c1) = (-a*s + delta*m + e, a) with a uniform from `seed_a`.
  Ciphertext encrypt_with_error(const SecretKey& sk, std::span<const std::uint64_t> m,
                                std::span<const i128> e, std::uint64_t seed_a) const;
  Ciphertext encrypt(const SecretKey& sk, std::span<const std::uint64_t> m,
                     std::uint64_t seed) const;

  /// Center-lifted c0 + c1*s mod q.
  std::vector<BigInt> phase(const SecretKey& sk, const Ciphertext& ct) const;
  /// round(phase / delta) mod p, ties rounded up.
  std::vector<std::uint64_t> decrypt(const SecretKey& sk, const Ciphertext& ct) const;

  Ciphertext add(const Ciphertext& a, const Ciphertext& b) const;
  /// w has coefficients in [-p/2, p/2).
  Ciphertext plain_mult(const Ciphertext& a, std::span<const i128> w) const;
  /// Automorphism only; the result decrypts under the rotated key.
  Ciphertext automorphism(const Ciphertext& a, std::uint64_t g) const;

 private:
  std::vector<BigInt> reduce(std::vector<BigInt> v) const;

  CryptoParams params_;
  NoiseModel model_;
  BigInt delta_;
};

/// Message-space negacyclic product m * w mod p with w centered.
std::vector<std::uint64_t> plain_negacyclic_mod(std::span<const std::uint64_t> m,
                                                std::span<const i128> w, std::uint64_t p);

}  // namespace sinfer

#endif  // SINFER_NOISE_MINI_BFV_HPP
