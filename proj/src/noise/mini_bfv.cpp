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

#include "sinfer/noise/mini_bfv.hpp"

#include <stdexcept>

#include "sinfer/numeric/ntt.hpp"

namespace sinfer {

namespace {

BigInt uniform_mod(const BigInt& q, Rng& rng) {
  const int words = (bit_length(q) + 64 + 63) / 64;
  BigInt x = 0;
  for (int i = 0; i < words; ++i) {
    x <<= 64;
    x += rng();
  }
  return x % q;
}

BigInt mod_pos(const BigInt& x, const BigInt& q) {
  BigInt r = x % q;
  if (r < 0) r += q;
  return r;
}

/// floor(a / b) for b > 0.
BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt quot = a / b;
  if (a < 0 && quot * b != a) quot -= 1;
  return quot;
}

}  // namespace

MiniBfv::MiniBfv(CryptoParams params, NoiseModel model)
    : params_(std::move(params)), model_(model) {
  if (!is_power_of_two(params_.n) || params_.n < 2) {
    throw std::invalid_argument("MiniBfv: n must be a power of two >= 2");
  }
  if (params_.p < 2 || params_.q <= params_.p) throw std::invalid_argument("MiniBfv: need 2 <= p < q");
  delta_ = params_.q / params_.p;
}

std::vector<BigInt> MiniBfv::reduce(std::vector<BigInt> v) const {
  for (auto& x : v) x = mod_pos(x, params_.q);
  return v;
}

SecretKey MiniBfv::keygen(std::uint64_t seed) const {
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<int> tern(-1, 1);
  SecretKey sk;
  sk.s.resize(params_.n);
  for (auto& v : sk.s) v = tern(rng);
  return sk;
}

Ciphertext MiniBfv::encrypt_with_error(const SecretKey& sk, std::span<const std::uint64_t> m,
                                       std::span<const i128> e, std::uint64_t seed_a) const {
  const std::size_t n = params_.n;
  if (m.size() != n || e.size() != n || sk.s.size() != n) {
    throw std::invalid_argument("MiniBfv::encrypt: dimension mismatch");
  }
  Rng rng = make_rng(seed_a);
  Ciphertext ct;
  ct.c1.resize(n);
  for (auto& v : ct.c1) v = uniform_mod(params_.q, rng);
  std::vector<BigInt> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = to_big(sk.s[i]);
  const auto as = negacyclic_multiply(std::span<const BigInt>(ct.c1), std::span<const BigInt>(s));
  ct.c0.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i] >= params_.p) throw std::invalid_argument("MiniBfv::encrypt: message entry >= p");
    ct.c0[i] = mod_pos(delta_ * m[i] + to_big(e[i]) - as[i], params_.q);
  }
  return ct;
}

Ciphertext MiniBfv::encrypt(const SecretKey& sk, std::span<const std::uint64_t> m,
                            std::uint64_t seed) const {
  const auto e = sample_fresh_error(params_.n, model_, derive_seed(seed, 1));
  return encrypt_with_error(sk, m, e.e, derive_seed(seed, 2));
}

std::vector<BigInt> MiniBfv::phase(const SecretKey& sk, const Ciphertext& ct) const {
  const std::size_t n = params_.n;
  std::vector<BigInt> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = to_big(sk.s[i]);
  auto out = negacyclic_multiply(std::span<const BigInt>(ct.c1), std::span<const BigInt>(s));
  const BigInt half = params_.q / 2;
  for (std::size_t i = 0; i < n; ++i) {
    BigInt x = mod_pos(out[i] + ct.c0[i], params_.q);
    if (x > half) x -= params_.q;
    out[i] = std::move(x);
  }
  return out;
}

std::vector<std::uint64_t> MiniBfv::decrypt(const SecretKey& sk, const Ciphertext& ct) const {
  const auto ph = phase(sk, ct);
  const BigInt half_delta = delta_ / 2;
  const BigInt p = params_.p;
  std::vector<std::uint64_t> out(ph.size());
  for (std::size_t i = 0; i < ph.size(); ++i) {
    out[i] = static_cast<std::uint64_t>(mod_pos(floor_div(ph[i] + half_delta, delta_), p));
  }
  return out;
}

Ciphertext MiniBfv::add(const Ciphertext& a, const Ciphertext& b) const {
  Ciphertext out;
  out.c0.resize(params_.n);
  out.c1.resize(params_.n);
  for (std::size_t i = 0; i < params_.n; ++i) {
    out.c0[i] = mod_pos(a.c0[i] + b.c0[i], params_.q);
    out.c1[i] = mod_pos(a.c1[i] + b.c1[i], params_.q);
  }
  return out;
}

Ciphertext MiniBfv::plain_mult(const Ciphertext& a, std::span<const i128> w) const {
  std::vector<BigInt> wb(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) wb[i] = to_big(w[i]);
  Ciphertext out;
  out.c0 = reduce(negacyclic_multiply(std::span<const BigInt>(a.c0), std::span<const BigInt>(wb)));
  out.c1 = reduce(negacyclic_multiply(std::span<const BigInt>(a.c1), std::span<const BigInt>(wb)));
  return out;
}

Ciphertext MiniBfv::automorphism(const Ciphertext& a, std::uint64_t g) const {
  Ciphertext out;
  out.c0 = reduce(apply_automorphism(std::span<const BigInt>(a.c0), g));
  out.c1 = reduce(apply_automorphism(std::span<const BigInt>(a.c1), g));
  return out;
}

std::vector<std::uint64_t> plain_negacyclic_mod(std::span<const std::uint64_t> m,
                                                std::span<const i128> w, std::uint64_t p) {
  std::vector<i128> mi(m.begin(), m.end());
  const auto prod = negacyclic_multiply(std::span<const i128>(mi), w);
  std::vector<std::uint64_t> out(prod.size());
  for (std::size_t i = 0; i < prod.size(); ++i) out[i] = reduce_signed(prod[i], p);
  return out;
}

}  // namespace sinfer
