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

#include "sinfer/numeric/ntt.hpp"

#include <algorithm>
#include <array>
#include <mutex>
#include <stdexcept>

#include "sinfer/numeric/primes.hpp"

namespace sinfer {

namespace {

std::uint32_t bit_reverse(std::uint32_t x, int bits) {
  std::uint32_t r = 0;
  for (int i = 0; i < bits; ++i) {
    r = (r << 1) | (x & 1);
    x >>= 1;
  }
  return r;
}

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t q) { return pow_mod(a, q - 2, q); }

}  // namespace

NttTable::NttTable(std::uint64_t q, std::size_t n)
    : q_(q), n_(n), log_n_(ceil_log2(n)) {
  if (!is_power_of_two(n) || n < 2) throw std::invalid_argument("NttTable: n must be a power of two");
  if (q >= (std::uint64_t{1} << 62)) throw std::invalid_argument("NttTable: q must be < 2^62");
  const std::uint64_t psi = primitive_root_2n(q, n);
  const std::uint64_t ipsi = inv_mod(psi, q);
  psi_pow_.resize(n);
  ipsi_pow_.resize(n);
  psi_pow_shoup_.resize(n);
  ipsi_pow_shoup_.resize(n);
  std::uint64_t p = 1;
  std::uint64_t ip = 1;
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto r = bit_reverse(i, log_n_);
    psi_pow_[r] = p;
    ipsi_pow_[r] = ip;
    p = mul_mod(p, psi, q);
    ip = mul_mod(ip, ipsi, q);
  }
  for (std::size_t i = 0; i < n; ++i) {
    psi_pow_shoup_[i] = shoup_precompute(psi_pow_[i], q);
    ipsi_pow_shoup_[i] = shoup_precompute(ipsi_pow_[i], q);
  }
  n_inv_ = inv_mod(n % q, q);
  n_inv_shoup_ = shoup_precompute(n_inv_, q);
}

namespace {

/// x - m when x >= m, branch-free.
inline std::uint64_t csub(std::uint64_t x, std::uint64_t m) {
  return x - (m & (std::uint64_t{0} - static_cast<std::uint64_t>(x >= m)));
}

/// a * w mod q up to one extra q: result in [0, 2q).
inline std::uint64_t mul_shoup_lazy(std::uint64_t a, std::uint64_t w, std::uint64_t w_shoup,
                                    std::uint64_t q) {
  const auto hi = static_cast<std::uint64_t>((static_cast<u128>(a) * w_shoup) >> 64);
  return a * w - hi * q;
}

}  // namespace

// Harvey butterflies: forward keeps values in [0, 4q), inverse in [0, 2q).
void NttTable::forward(std::span<std::uint64_t> a) const {
  const std::uint64_t q = q_;
  const std::uint64_t q2 = 2 * q;
  std::size_t t = n_;
  for (std::size_t m = 1; m < n_; m <<= 1) {
    t >>= 1;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j1 = 2 * i * t;
      const std::uint64_t s = psi_pow_[m + i];
      const std::uint64_t s_shoup = psi_pow_shoup_[m + i];
      std::uint64_t* x = a.data() + j1;
      std::uint64_t* y = x + t;
      for (std::size_t j = 0; j < t; ++j) {
        const std::uint64_t u = csub(x[j], q2);
        const std::uint64_t v = mul_shoup_lazy(y[j], s, s_shoup, q);
        x[j] = u + v;
        y[j] = u - v + q2;
      }
    }
  }
  for (auto& v : a) v = csub(csub(v, q2), q);
}

void NttTable::inverse(std::span<std::uint64_t> a) const {
  const std::uint64_t q = q_;
  const std::uint64_t q2 = 2 * q;
  std::size_t t = 1;
  for (std::size_t m = n_; m > 1; m >>= 1) {
    const std::size_t h = m >> 1;
    std::size_t j1 = 0;
    for (std::size_t i = 0; i < h; ++i) {
      const std::uint64_t s = ipsi_pow_[h + i];
      const std::uint64_t s_shoup = ipsi_pow_shoup_[h + i];
      std::uint64_t* x = a.data() + j1;
      std::uint64_t* y = x + t;
      for (std::size_t j = 0; j < t; ++j) {
        const std::uint64_t u = x[j];
        const std::uint64_t v = y[j];
        x[j] = csub(u + v, q2);
        y[j] = mul_shoup_lazy(u - v + q2, s, s_shoup, q);
      }
      j1 += 2 * t;
    }
    t <<= 1;
  }
  for (auto& v : a) v = csub(mul_shoup_lazy(v, n_inv_, n_inv_shoup_, q), q);
}

std::vector<std::uint32_t> NttTable::automorphism_permutation(std::uint64_t g) const {
  const std::uint64_t two_n = 2 * n_;
  std::vector<std::uint32_t> perm(n_);
  for (std::uint32_t j = 0; j < n_; ++j) {
    const std::uint64_t e = 2 * static_cast<std::uint64_t>(bit_reverse(j, log_n_)) + 1;
    const std::uint64_t e2 = (static_cast<u128>(e) * g) % two_n;
    perm[j] = bit_reverse(static_cast<std::uint32_t>((e2 - 1) / 2), log_n_);
  }
  return perm;
}

// ---------------------------------------------------------------------------

namespace {

const std::vector<std::uint64_t>& rns_primes() {
  static const std::vector<std::uint64_t> primes = [] {
    std::vector<std::uint64_t> out;
    constexpr std::uint64_t step = std::uint64_t{1} << 15;
    std::uint64_t cand = ((std::uint64_t{1} << 61) / step) * step + 1;
    while (out.size() < RnsBasis::kMaxPrimes) {
      cand -= step;
      if (is_prime(cand)) out.push_back(cand);
    }
    return out;
  }();
  return primes;
}

}  // namespace

RnsBasis::RnsBasis(std::size_t n) : n_(n) {
  if (!is_power_of_two(n) || n > kMaxN) throw std::invalid_argument("RnsBasis: unsupported n");
  for (auto q : rns_primes()) tables_.emplace_back(q, n);
}

const RnsBasis& RnsBasis::for_dimension(std::size_t n) {
  static std::mutex mu;
  static std::array<std::unique_ptr<RnsBasis>, 16> cache;
  if (!is_power_of_two(n) || n < 2 || n > kMaxN) {
    throw std::invalid_argument("RnsBasis: unsupported n=" + std::to_string(n));
  }
  const int idx = ceil_log2(n);
  std::lock_guard<std::mutex> lock(mu);
  if (!cache[static_cast<std::size_t>(idx)]) cache[static_cast<std::size_t>(idx)] = std::make_unique<RnsBasis>(n);
  return *cache[static_cast<std::size_t>(idx)];
}

std::size_t RnsBasis::primes_for_bound(const BigInt& bound) const {
  BigInt prod = 1;
  const BigInt need = 2 * bound + 1;
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    prod *= prime(i);
    if (prod > need) return i + 1;
  }
  throw std::overflow_error("RnsBasis: product bound exceeds residue capacity");
}

namespace {

template <typename T>
BigInt max_abs(std::span<const T> a) {
  BigInt m = 0;
  for (const auto& v : a) {
    BigInt x;
    if constexpr (std::is_same_v<T, i128>) {
      x = to_big(v);
    } else {
      x = v;
    }
    if (x < 0) x = -x;
    if (x > m) m = x;
  }
  return m;
}

std::vector<std::uint64_t> residues(std::span<const i128> a, std::uint64_t q) {
  std::vector<std::uint64_t> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = reduce_signed(a[i], q);
  return r;
}

std::vector<std::uint64_t> residues(std::span<const BigInt> a, std::uint64_t q) {
  std::vector<std::uint64_t> r(a.size());
  const BigInt bq = q;
  for (std::size_t i = 0; i < a.size(); ++i) {
    BigInt x = a[i] % bq;
    if (x < 0) x += bq;
    r[i] = static_cast<std::uint64_t>(x);
  }
  return r;
}

template <typename T>
std::vector<std::vector<std::uint64_t>> rns_products(std::span<const T> a, std::span<const T> b,
                                                     std::size_t k) {
  const auto& basis = RnsBasis::for_dimension(a.size());
  std::vector<std::vector<std::uint64_t>> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& tab = basis.table(i);
    auto ra = residues(a, tab.modulus());
    auto rb = residues(b, tab.modulus());
    tab.forward(ra);
    tab.forward(rb);
    for (std::size_t j = 0; j < ra.size(); ++j) ra[j] = mul_mod(ra[j], rb[j], tab.modulus());
    tab.inverse(ra);
    out[i] = std::move(ra);
  }
  return out;
}

}  // namespace

std::vector<i128> negacyclic_multiply(std::span<const i128> a, std::span<const i128> b) {
  if (a.size() != b.size()) throw std::invalid_argument("negacyclic_multiply: size mismatch");
  const std::size_t n = a.size();
  const BigInt bound = BigInt(n) * max_abs(a) * max_abs(b);
  static const BigInt kLimit = BigInt(1) << 120;
  if (bound >= kLimit) throw std::overflow_error("negacyclic_multiply: result may exceed 2^120");
  if (bound == 0) return std::vector<i128>(n, 0);
  if (n == 1) return {a[0] * b[0]};  // Z[X]/(X + 1) is Z
  const auto& basis = RnsBasis::for_dimension(n);
  const std::size_t k = basis.primes_for_bound(bound);
  const auto r = rns_products(a, b, k);
  std::vector<i128> out(n);
  const std::uint64_t q1 = basis.prime(0);
  if (k == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t v = r[0][i];
      out[i] = v > q1 / 2 ? static_cast<i128>(v) - static_cast<i128>(q1) : static_cast<i128>(v);
    }
    return out;
  }
  const std::uint64_t q2 = basis.prime(1);
  const std::uint64_t q1_inv = pow_mod(q1 % q2, q2 - 2, q2);
  const u128 mod = static_cast<u128>(q1) * q2;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t r1 = r[0][i];
    const std::uint64_t r2 = r[1][i];
    const std::uint64_t diff = (r2 + q2 - (r1 % q2)) % q2;
    const std::uint64_t h = mul_mod(diff, q1_inv, q2);
    const u128 x = static_cast<u128>(r1) + static_cast<u128>(h) * q1;
    out[i] = x > mod / 2 ? -static_cast<i128>(mod - x) : static_cast<i128>(x);
  }
  return out;
}

std::vector<BigInt> negacyclic_multiply(std::span<const BigInt> a, std::span<const BigInt> b) {
  if (a.size() != b.size()) throw std::invalid_argument("negacyclic_multiply: size mismatch");
  const std::size_t n = a.size();
  const BigInt bound = BigInt(n) * max_abs(a) * max_abs(b);
  if (bound == 0) return std::vector<BigInt>(n, 0);
  if (n == 1) return {a[0] * b[0]};
  const auto& basis = RnsBasis::for_dimension(n);
  const std::size_t k = basis.primes_for_bound(bound);
  const auto r = rns_products(a, b, k);
  // Garner reconstruction.
  std::vector<BigInt> partial(k);
  std::vector<std::uint64_t> partial_inv(k, 1);
  BigInt mod = 1;
  for (std::size_t i = 0; i < k; ++i) {
    partial[i] = mod;
    const std::uint64_t qi = basis.prime(i);
    if (i > 0) partial_inv[i] = pow_mod(static_cast<std::uint64_t>(mod % qi), qi - 2, qi);
    mod *= qi;
  }
  const BigInt half = mod / 2;
  std::vector<BigInt> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    BigInt x = r[0][j];
    for (std::size_t i = 1; i < k; ++i) {
      const std::uint64_t qi = basis.prime(i);
      const auto x_mod = static_cast<std::uint64_t>(x % qi);
      const std::uint64_t diff = (r[i][j] + qi - x_mod) % qi;
      x += partial[i] * mul_mod(diff, partial_inv[i], qi);
    }
    out[j] = x > half ? x - mod : x;
  }
  return out;
}

std::uint64_t galois_element(std::int64_t k, std::size_t n) {
  const std::uint64_t two_n = 2 * n;
  const std::uint64_t order = n / 2;  // order of 3 in (Z/2nZ)^*
  std::int64_t kk = k % static_cast<std::int64_t>(order == 0 ? 1 : order);
  if (kk < 0) kk += static_cast<std::int64_t>(order);
  return pow_mod(3, static_cast<std::uint64_t>(kk), two_n);
}

}  // namespace sinfer
