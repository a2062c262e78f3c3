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

#ifndef SINFER_NOISE_ERROR_HPP
#define SINFER_NOISE_ERROR_HPP

// Error vectors carried by RLWE ciphertexts and their exact propagation
// through addition, plaintext multiplication and rotation.

#include <cstdint>
#include <span>
#include <vector>

#include "sinfer/numeric/bigint.hpp"
#include "sinfer/numeric/rng.hpp"

namespace sinfer {

struct NoiseModel {
  /// Fresh-error standard deviation; sampled as a centered binomial with
  /// k = round(2 sigma^2) coin pairs.
  double sigma = 3.2;
  enum class Secret { Ternary } secret = Secret::Ternary;
  /// Key-switch noise of one rotation: `ks_digits` independent fresh-like
  /// terms, each scaled by floor(ks_factor * sqrt(n)).
  bool ks_enabled = true;
  int ks_digits = 4;
  double ks_factor = 1.0;

  int cbd_k() const;
  std::int64_t ks_scale(std::size_t n) const;
  /// Exact additive growth of bound_abs caused by one rotation.
  BigInt ks_bound(std::size_t n) const;
};

struct ErrorState {
  std::vector<i128> e;
  /// Worst-case infinity-norm bound; |e_i| <= bound_abs always.
  BigInt bound_abs = 0;
  /// Average-case magnitude estimate, informational only.
  double avg_bound = 0.0;

  std::size_t n() const { return e.size(); }
};

u128 infinity_norm(std::span<const i128> e);

/// Draws n centered-binomial coefficients from `rng`.
void sample_cbd(std::span<i128> out, int k, Rng& rng);

ErrorState sample_fresh_error(std::size_t n, const NoiseModel& model, std::uint64_t seed);
ErrorState sample_fresh_error(std::size_t n, const NoiseModel& model, Rng& rng);

ErrorState prop_add(const ErrorState& a, const ErrorState& b);

/// Error side of a Hadamard product with a plaintext polynomial whose
/// coefficients lie in [-p/2, p/2).
ErrorState prop_plain_mult(const ErrorState& a, std::span<const i128> w);

/// Error side of rot(ct, k): the Galois automorphism for slot shift k plus
/// key-switch noise drawn from `rng` when the model enables it.
ErrorState prop_rot(const ErrorState& a, std::int64_t k, const NoiseModel& model, Rng& rng);
ErrorState prop_rot(const ErrorState& a, std::int64_t k, const NoiseModel& model,
                    std::uint64_t seed);

/// Key-switch noise vector of one rotation, drawn from `rng`.
std::vector<i128> sample_ks_noise(std::size_t n, const NoiseModel& model, Rng& rng);

}  // namespace sinfer

#endif  // SINFER_NOISE_ERROR_HPP
