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

#include "sinfer/numeric/primes.hpp"

#include <array>
#include <limits>
#include <random>
#include <stdexcept>

namespace sinfer {

std::string to_string(i128 x) {
  if (x == 0) return "0";
  const bool neg = x < 0;
  u128 v = neg ? static_cast<u128>(-(x + 1)) + 1 : static_cast<u128>(x);
  std::string s;
  while (v != 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  if (neg) s.push_back('-');
  return {s.rbegin(), s.rend()};
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  base %= m;
  while (exp != 0) {
    if (exp & 1) r = mul_mod(r, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return r;
}

namespace {

constexpr std::array<std::uint64_t, 24> kPrimeBases = {
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

bool witness_composite(std::uint64_t a, std::uint64_t d, int s, std::uint64_t n) {
  std::uint64_t x = pow_mod(a, d, n);
  if (x == 1 || x == n - 1) return false;
  for (int r = 1; r < s; ++r) {
    x = mul_mod(x, x, n);
    if (x == n - 1) return false;
  }
  return true;
}

bool witness_composite(const BigInt& a, const BigInt& d, int s, const BigInt& n) {
  BigInt x = boost::multiprecision::powm(a, d, n);
  const BigInt nm1 = n - 1;
  if (x == 1 || x == nm1) return false;
  for (int r = 1; r < s; ++r) {
    x = (x * x) % n;
    if (x == nm1) return false;
  }
  return true;
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::size_t i = 0; i < 12; ++i) {
    const auto p = kPrimeBases[i];
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::size_t i = 0; i < 12; ++i) {
    if (witness_composite(kPrimeBases[i], d, s, n)) return false;
  }
  return true;
}

bool is_prime(const BigInt& n) {
  if (n < 2) return false;
  if (n <= std::numeric_limits<std::uint64_t>::max()) {
    return is_prime(static_cast<std::uint64_t>(n));
  }
  for (auto p : kPrimeBases) {
    if (n % p == 0) return false;
  }
  BigInt d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  static const BigInt kDeterministicLimit("3317044064679887385961981");
  const std::size_t nbases = n < kDeterministicLimit ? 13 : kPrimeBases.size();
  for (std::size_t i = 0; i < nbases; ++i) {
    if (witness_composite(BigInt(kPrimeBases[i]), d, s, n)) return false;
  }
  if (n < kDeterministicLimit) return true;

  std::mt19937_64 rng(static_cast<std::uint64_t>(n & 0xffffffffffffffffULL));
  const BigInt span = n - 4;
  for (int round = 0; round < 16; ++round) {
    BigInt a = 0;
    for (int limb = 0; limb < 4; ++limb) {
      a <<= 64;
      a += rng();
    }
    a = a % span + 2;
    if (witness_composite(a, d, s, n)) return false;
  }
  return true;
}

std::uint64_t primitive_root_2n(std::uint64_t q, std::uint64_t n) {
  const std::uint64_t order = 2 * n;
  if ((q - 1) % order != 0) throw std::invalid_argument("primitive_root_2n: q != 1 mod 2n");
  const std::uint64_t cofactor = (q - 1) / order;
  for (std::uint64_t g = 2; g < q; ++g) {
    const std::uint64_t root = pow_mod(g, cofactor, q);
    // order divides 2n (a power of two); it is exactly 2n iff root^n = -1.
    if (pow_mod(root, n, q) == q - 1) return root;
  }
  throw std::runtime_error("primitive_root_2n: no root found");
}

}  // namespace sinfer
