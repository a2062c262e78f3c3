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

#include <random>
#include <vector>

#include "doctest.h"
#include "sinfer/numeric/ntt.hpp"
#include "sinfer/numeric/primes.hpp"

using namespace sinfer;

namespace {

template <typename T>
std::vector<T> schoolbook(const std::vector<T>& a, const std::vector<T>& b) {
  const std::size_t n = a.size();
  std::vector<T> out(n, T(0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = i + j;
      if (k < n) {
        out[k] += a[i] * b[j];
      } else {
        out[k - n] -= a[i] * b[j];
      }
    }
  }
  return out;
}

std::vector<bool> sieve(std::size_t limit) {
  std::vector<bool> p(limit + 1, true);
  p[0] = false;
  p[1] = false;
  for (std::size_t i = 2; i * i <= limit; ++i) {
    if (p[i]) {
      for (std::size_t j = i * i; j <= limit; j += i) p[j] = false;
    }
  }
  return p;
}

}  // namespace

TEST_CASE("primality matches a sieve below 200000") {
  const auto ref = sieve(200000);
  for (std::uint64_t x = 0; x <= 200000; ++x) {
    REQUIRE(is_prime(x) == ref[x]);
    if (x % 997 == 0) REQUIRE(is_prime(BigInt(x)) == ref[x]);
  }
}

TEST_CASE("primality on known large values") {
  CHECK(is_prime(std::uint64_t{18446744073709551557ULL}));
  CHECK_FALSE(is_prime(std::uint64_t{18446744073709551559ULL}));
  // Strong pseudoprime to the first 12 prime bases would need > 3.3e24.
  CHECK_FALSE(is_prime(std::uint64_t{3215031751ULL}));
  const BigInt m127 = (BigInt(1) << 127) - 1;
  CHECK(is_prime(m127));
  CHECK_FALSE(is_prime(m127 * 3));
  CHECK_FALSE(is_prime((BigInt(1) << 128) + 1));
}

TEST_CASE("forward NTT evaluates at odd powers of psi") {
  const std::uint64_t q = 12289;
  const std::size_t n = 16;
  NttTable tab(q, n);
  const std::uint64_t psi = primitive_root_2n(q, n);
  CHECK(pow_mod(psi, n, q) == q - 1);
  std::mt19937_64 rng(1);
  std::vector<std::uint64_t> a(n);
  for (auto& v : a) v = rng() % q;
  auto f = a;
  tab.forward(f);
  for (std::size_t j = 0; j < n; ++j) {
    std::uint32_t r = 0;
    for (int b = 0; b < 4; ++b) r |= ((j >> b) & 1) << (3 - b);
    const std::uint64_t x = pow_mod(psi, 2 * r + 1, q);
    std::uint64_t acc = 0;
    std::uint64_t xp = 1;
    for (std::size_t i = 0; i < n; ++i) {
      acc = (acc + mul_mod(a[i], xp, q)) % q;
      xp = mul_mod(xp, x, q);
    }
    CHECK(f[j] == acc);
  }
  tab.inverse(f);
  CHECK(f == a);
}

TEST_CASE("automorphism permutation matches coefficient automorphism") {
  const std::size_t n = 64;
  const auto& basis = RnsBasis::for_dimension(n);
  const auto& tab = basis.table(0);
  const std::uint64_t q = tab.modulus();
  std::mt19937_64 rng(2);
  std::vector<i128> a(n);
  for (auto& v : a) v = static_cast<i128>(rng() % 1000) - 500;
  for (std::int64_t k : {1, 3, 17, -1}) {
    const std::uint64_t g = galois_element(k, n);
    const auto rotated = apply_automorphism(std::span<const i128>(a), g);
    std::vector<std::uint64_t> fa(n);
    std::vector<std::uint64_t> fr(n);
    for (std::size_t i = 0; i < n; ++i) {
      fa[i] = reduce_signed(a[i], q);
      fr[i] = reduce_signed(rotated[i], q);
    }
    tab.forward(fa);
    tab.forward(fr);
    const auto perm = tab.automorphism_permutation(g);
    for (std::size_t j = 0; j < n; ++j) REQUIRE(fr[j] == fa[perm[j]]);
  }
}

TEST_CASE("galois elements compose additively in the rotation index") {
  const std::size_t n = 128;
  std::vector<i128> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = static_cast<i128>(i * 7 % 13) - 6;
  const auto r1 = apply_automorphism(std::span<const i128>(a), galois_element(3, n));
  const auto r2 = apply_automorphism(std::span<const i128>(r1), galois_element(5, n));
  const auto r = apply_automorphism(std::span<const i128>(a), galois_element(8, n));
  CHECK(r2 == r);
  CHECK(galois_element(static_cast<std::int64_t>(n / 2), n) == 1);
}

TEST_CASE("negacyclic multiply matches schoolbook") {
  std::mt19937_64 rng(3);
  for (std::size_t n : {2, 8, 32, 256}) {
    for (std::int64_t mag : {1LL, 1000LL, 1LL << 40, 1LL << 55}) {
      std::vector<i128> a(n);
      std::vector<i128> b(n);
      for (auto& v : a) v = static_cast<i128>(rng() % (2 * mag + 1)) - mag;
      for (auto& v : b) v = static_cast<i128>(rng() % 200001) - 100000;
      const auto got = negacyclic_multiply(std::span<const i128>(a), std::span<const i128>(b));
      REQUIRE(got == schoolbook(a, b));
      std::vector<BigInt> ab(a.size());
      std::vector<BigInt> bb(b.size());
      for (std::size_t i = 0; i < n; ++i) {
        ab[i] = to_big(a[i]) << 100;
        bb[i] = to_big(b[i]) << 30;
      }
      const auto big = negacyclic_multiply(std::span<const BigInt>(ab), std::span<const BigInt>(bb));
      REQUIRE(big == schoolbook(ab, bb));
    }
  }
}

TEST_CASE("negacyclic multiply rejects results beyond 2^120") {
  std::vector<i128> a(4, static_cast<i128>(1) << 70);
  std::vector<i128> b(4, static_cast<i128>(1) << 60);
  CHECK_THROWS_AS(negacyclic_multiply(std::span<const i128>(a), std::span<const i128>(b)),
                  std::overflow_error);
}
