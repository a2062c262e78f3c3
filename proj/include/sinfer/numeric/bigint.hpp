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

#ifndef SINFER_NUMERIC_BIGINT_HPP
#define SINFER_NUMERIC_BIGINT_HPP

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace sinfer {

using BigInt = boost::multiprecision::cpp_int;
using i128 = __int128;
using u128 = unsigned __int128;

/// Number of bits needed to represent x (0 for x == 0).
inline int bit_length(const BigInt& x) {
  if (x <= 0) return 0;
  return static_cast<int>(boost::multiprecision::msb(x)) + 1;
}

inline int bit_length(std::uint64_t x) {
  return x == 0 ? 0 : 64 - __builtin_clzll(x);
}

inline int bit_length(u128 x) {
  const auto hi = static_cast<std::uint64_t>(x >> 64);
  if (hi != 0) return 64 + bit_length(hi);
  return bit_length(static_cast<std::uint64_t>(x));
}

/// ceil(log2(x)) for x >= 1.
inline int ceil_log2(std::uint64_t x) {
  if (x <= 1) return 0;
  return bit_length(x - 1);
}

inline bool is_power_of_two(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

inline std::uint64_t next_power_of_two(std::uint64_t x) {
  return x <= 1 ? 1 : std::uint64_t{1} << ceil_log2(x);
}

inline BigInt to_big(u128 x) {
  BigInt r = static_cast<std::uint64_t>(x >> 64);
  r <<= 64;
  r += static_cast<std::uint64_t>(x);
  return r;
}

inline BigInt to_big(i128 x) {
  if (x < 0) {
    return -to_big(static_cast<u128>(-(x + 1)) + 1);
  }
  return to_big(static_cast<u128>(x));
}

std::string to_string(i128 x);

}  // namespace sinfer

#endif  // SINFER_NUMERIC_BIGINT_HPP
