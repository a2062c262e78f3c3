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

#include "sinfer/noise/error.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "sinfer/numeric/ntt.hpp"

namespace sinfer {

int NoiseModel::cbd_k() const {
  if (!(sigma >= 0)) throw std::invalid_argument("NoiseModel: sigma must be >= 0");
  return static_cast<int>(std::lround(2.0 * sigma * sigma));
}

std::int64_t NoiseModel::ks_scale(std::size_t n) const {
  return static_cast<std::int64_t>(std::floor(ks_factor * std::sqrt(static_cast<double>(n))));
}

BigInt NoiseModel::ks_bound(std::size_t n) const {
  if (!ks_enabled) return 0;
  return BigInt(ks_digits) * cbd_k() * ks_scale(n);
}

u128 infinity_norm(std::span<const i128> e) {
  u128 m = 0;
  for (const i128 v : e) {
    const u128 a = v < 0 ? static_cast<u128>(-v) : static_cast<u128>(v);
    if (a > m) m = a;
  }
  return m;
}

void sample_cbd(std::span<i128> out, int k, Rng& rng) {
  if (k <= 0) {
    for (auto& v : out) v = 0;
    return;
  }
  if (k <= 32) {
    const std::uint64_t mask = (k == 32) ? 0xffffffffULL : ((std::uint64_t{1} << k) - 1);
    for (auto& v : out) {
      const std::uint64_t r = rng();
      v = std::popcount(r & mask) - std::popcount((r >> 32) & mask);
    }
    return;
  }
  for (auto& v : out) {
    int acc = 0;
    for (int left = k; left > 0; left -= 32) {
      const int take = left < 32 ? left : 32;
      const std::uint64_t mask = (take == 32) ? 0xffffffffULL : ((std::uint64_t{1} << take) - 1);
      const std::uint64_t r = rng();
      acc += std::popcount(r & mask) - std::popcount((r >> 32) & mask);
    }
    v = acc;
  }
}

ErrorState sample_fresh_error(std::size_t n, const NoiseModel& model, Rng& rng) {
  ErrorState s;
  s.e.resize(n);
  const int k = model.cbd_k();
  sample_cbd(s.e, k, rng);
  s.bound_abs = k;
  s.avg_bound = model.sigma;
  return s;
}

ErrorState sample_fresh_error(std::size_t n, const NoiseModel& model, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return sample_fresh_error(n, model, rng);
}

ErrorState prop_add(const ErrorState& a, const ErrorState& b) {
  if (a.n() != b.n()) throw std::invalid_argument("prop_add: dimension mismatch");
  ErrorState s;
  s.e.resize(a.n());
  for (std::size_t i = 0; i < a.n(); ++i) s.e[i] = a.e[i] + b.e[i];
  s.bound_abs = a.bound_abs + b.bound_abs;
  s.avg_bound = std::hypot(a.avg_bound, b.avg_bound);
  return s;
}

ErrorState prop_plain_mult(const ErrorState& a, std::span<const i128> w) {
  if (a.n() != w.size()) throw std::invalid_argument("prop_plain_mult: dimension mismatch");
  ErrorState s;
  s.e = negacyclic_multiply(std::span<const i128>(a.e), w);
  BigInt max_w = 0;
  double sq = 0;
  for (const i128 v : w) {
    const BigInt a_w = to_big(v < 0 ? -v : v);
    if (a_w > max_w) max_w = a_w;
    const auto d = static_cast<double>(v);
    sq += d * d;
  }
  const auto n = static_cast<double>(w.size());
  s.bound_abs = a.bound_abs * w.size() * max_w;
  s.avg_bound = static_cast<double>(a.bound_abs) * std::sqrt(n) * std::sqrt(sq / n);
  return s;
}

std::vector<i128> sample_ks_noise(std::size_t n, const NoiseModel& model, Rng& rng) {
  std::vector<i128> out(n, 0);
  if (!model.ks_enabled) return out;
  // A sum of `ks_digits` independent CBD(k) draws is exactly CBD(digits * k).
  sample_cbd(out, model.ks_digits * model.cbd_k(), rng);
  const i128 scale = model.ks_scale(n);
  for (auto& v : out) v *= scale;
  return out;
}

ErrorState prop_rot(const ErrorState& a, std::int64_t k, const NoiseModel& model, Rng& rng) {
  const std::size_t n = a.n();
  ErrorState s;
  s.e = apply_automorphism(std::span<const i128>(a.e), galois_element(k, n));
  const auto ks = sample_ks_noise(n, model, rng);
  for (std::size_t i = 0; i < n; ++i) s.e[i] += ks[i];
  s.bound_abs = a.bound_abs + model.ks_bound(n);
  const double ks_avg = model.ks_enabled ? static_cast<double>(model.ks_scale(n)) * model.sigma *
                                               std::sqrt(static_cast<double>(model.ks_digits))
                                         : 0.0;
  s.avg_bound = std::hypot(a.avg_bound, ks_avg);
  return s;
}

ErrorState prop_rot(const ErrorState& a, std::int64_t k, const NoiseModel& model,
                    std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return prop_rot(a, k, model, rng);
}

}  // namespace sinfer
