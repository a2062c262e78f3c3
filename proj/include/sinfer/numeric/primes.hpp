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

#ifndef SINFER_NUMERIC_PRIMES_HPP
#define SINFER_NUMERIC_PRIMES_HPP

#include <cstdint>

#include "sinfer/numeric/bigint.hpp"

namespace sinfer {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);

/// Deterministic Miller-Rabin for 64-bit inputs (first twelve prime bases).
bool is_prime(std::uint64_t n);

/// Miller-Rabin over arbitrary precision. Deterministic below 3.3e24 (bases
/// are the first thirteen primes); above that, twenty-four fixed prime bases
/// plus sixteen pseudo-random bases seeded from n give a probabilistic answer.
bool is_prime(const BigInt& n);

/// Primitive 2n-th root of unity modulo prime q, requires q = 1 (mod 2n).
std::uint64_t primitive_root_2n(std::uint64_t q, std::uint64_t n);

}  // namespace sinfer

#endif  // SINFER_NUMERIC_PRIMES_HPP
