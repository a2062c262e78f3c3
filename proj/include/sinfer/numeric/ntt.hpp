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

#ifndef SINFER_NUMERIC_NTT_HPP
#define SINFER_NUMERIC_NTT_HPP

// Negacyclic number-theoretic transform over word-size primes, plus an
// exact integer negacyclic product built on a small residue system.

#include <cstdint>
#include <climits>
#include <memory>
#include <span>
#include <vector>

#include "sinfer/numeric/bigint.hpp"

namespace sinfer {

/// Precomputed w' = floor(w * 2^64 / q) for Shoup multiplication.
inline std::uint64_t shoup_precompute(std::uint64_t w, std::uint64_t q) {
  return static_cast<std::uint64_t>((static_cast<u128>(w) << 64) / q);
}

/// a * w mod q for a < 2^64 and w < q < 2^62.
inline std::uint64_t mul_shoup(std::uint64_t a, std::uint64_t w, std::uint64_t w_shoup,
                               std::uint64_t q) {
  const auto hi = static_cast<std::uint64_t>((static_cast<u128>(a) * w_shoup) >> 64);
  std::uint64_t r = a * w - hi * q;
  return r >= q ? r - q : r;
}

/// Transform tables for Z_q[X]/(X^n + 1), q prime < 2^62 with q = 1 mod 2n.
/// Forward output is in bit-reversed order: slot j holds a(psi^(2*brv(j)+1)).
class NttTable {
 public:
  NttTable(std::uint64_t q, std::size_t n);

  std::uint64_t modulus() const { return q_; }
  std::size_t size() const { return n_; }

  void forward(std::span<std::uint64_t> a) const;
  void inverse(std::span<std::uint64_t> a) const;

  /// perm such that NTT(a(X^g))[j] = NTT(a)[perm[j]], g odd.
  std::vector<std::uint32_t> automorphism_permutation(std::uint64_t g) const;

 private:
  std::uint64_t q_;
  std::size_t n_;
  int log_n_;
  std::vector<std::uint64_t> psi_pow_;        // bit-reversed powers of psi
  std::vector<std::uint64_t> psi_pow_shoup_;
  std::vector<std::uint64_t> ipsi_pow_;       // bit-reversed powers of psi^-1
  std::vector<std::uint64_t> ipsi_pow_shoup_;
  std::uint64_t n_inv_;
  std::uint64_t n_inv_shoup_;
};

/// Residue system of NTT-friendly primes just below 2^61, all = 1 mod 2^15,
/// so every supported ring dimension (n <= 16384) can use them.
class RnsBasis {
 public:
  static constexpr std::size_t kMaxPrimes = 6;
  static constexpr std::size_t kMaxN = 16384;

  /// Shared immutable tables for dimension n (built once, thread-safe).
  static const RnsBasis& for_dimension(std::size_t n);

  std::size_t n() const { return n_; }
  const NttTable& table(std::size_t i) const { return tables_[i]; }
  std::uint64_t prime(std::size_t i) const { return tables_[i].modulus(); }
  /// Primes whose product exceeds 2 * bound (so signed results are exact).
  std::size_t primes_for_bound(const BigInt& bound) const;

  explicit RnsBasis(std::size_t n);

 private:
  std::size_t n_;
  std::vector<NttTable> tables_;
};

/// Exact negacyclic product of signed integer polynomials whose result
/// coefficients are bounded by 2^120 in magnitude. Throws std::overflow_error
/// when the a-priori bound n * max|a| * max|b| exceeds that.
std::vector<i128> negacyclic_multiply(std::span<const i128> a, std::span<const i128> b);

/// Exact negacyclic product of arbitrary-precision polynomials.
std::vector<BigInt> negacyclic_multiply(std::span<const BigInt> a, std::span<const BigInt> b);

/// Residue of a signed value modulo a word prime.
inline std::uint64_t reduce_signed(i128 x, std::uint64_t q) {
  const auto qs = static_cast<i128>(q);
  if (x > -qs && x < qs) return static_cast<std::uint64_t>(x < 0 ? x + qs : x);
  if (x >= INT64_MIN && x <= INT64_MAX) {
    const std::int64_t r = static_cast<std::int64_t>(x) % static_cast<std::int64_t>(q);
    return static_cast<std::uint64_t>(r < 0 ? r + static_cast<std::int64_t>(q) : r);
  }
  const i128 r = x % static_cast<i128>(q);
  return static_cast<std::uint64_t>(r < 0 ? r + static_cast<i128>(q) : r);
}

/// Slot rotation by k maps to the Galois element 3^k mod 2n.
std::uint64_t galois_element(std::int64_t k, std::size_t n);

/// a(X^g) in Z[X]/(X^n + 1): a signed coefficient permutation.
template <typename T>
std::vector<T> apply_automorphism(std::span<const T> a, std::uint64_t g) {
  const std::size_t n = a.size();
  const std::uint64_t two_n = 2 * n;
  std::vector<T> out(n, T(0));
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t idx = (static_cast<u128>(i) * g) % two_n;
    if (idx < n) {
      out[idx] += a[i];
    } else {
      out[idx - n] -= a[i];
    }
  }
  return out;
}

}  // namespace sinfer

#endif  // SINFER_NUMERIC_NTT_HPP
