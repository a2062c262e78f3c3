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

#include "sinfer/noise/failure.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/math/special_functions/beta.hpp>

#include "sinfer/numeric/ntt.hpp"
#include "sinfer/numeric/primes.hpp"

namespace sinfer {

double clopper_pearson_upper(std::int64_t failures, std::int64_t trials, double confidence) {
  if (trials < 1) throw std::invalid_argument("clopper_pearson_upper: trials must be >= 1");
  if (failures < 0 || failures > trials) {
    throw std::invalid_argument("clopper_pearson_upper: failures out of range");
  }
  if (failures == trials) return 1.0;
  return boost::math::ibeta_inv(static_cast<double>(failures + 1),
                                static_cast<double>(trials - failures), confidence);
}

std::vector<i128> decoding_error(const TrialOutcome& t, std::uint64_t p, std::uint64_t q_mod_p) {
  const auto pp = static_cast<i128>(p);
  const i128 half = (pp - 1) / 2;
  std::vector<i128> out(t.error.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    i128 c = t.message[i] % pp;
    if (c < 0) c += pp;
    if (c > half) c -= pp;
    const i128 k = (t.message[i] - c) / pp;
    out[i] = t.error[i] - static_cast<i128>(q_mod_p) * k;
  }
  return out;
}

std::vector<std::vector<i128>> sample_plan_weights(const LinearPlan& plan, std::uint64_t p,
                                                   std::uint64_t seed) {
  Rng rng = make_rng(derive_seed(seed, ~std::uint64_t{0}));
  std::uniform_int_distribution<std::uint64_t> dist(0, p - 1);
  const auto half = static_cast<i128>((p - 1) / 2);
  std::vector<std::vector<i128>> w(plan.n_weights, std::vector<i128>(plan.n));
  for (auto& poly : w) {
    for (auto& v : poly) {
      v = static_cast<i128>(dist(rng));
      if (v > half) v -= static_cast<i128>(p);
    }
  }
  return w;
}

Rng trial_rng(std::uint64_t seed, std::uint64_t trial) { return make_rng(derive_seed(seed, trial)); }

void sample_message(std::span<i128> out, std::uint64_t p, Rng& rng) {
  std::uniform_int_distribution<std::uint64_t> dist(0, p - 1);
  for (auto& v : out) v = static_cast<i128>(dist(rng));
}

TrialOutcome run_trial_reference(const LinearPlan& plan,
                                 const std::vector<std::vector<i128>>& weights, std::uint64_t p,
                                 const NoiseModel& model, Rng& rng) {
  const std::size_t n = plan.n;
  std::vector<ErrorState> err(plan.n_registers);
  std::vector<std::vector<i128>> msg(plan.n_registers);
  for (const auto& op : plan.ops) {
    switch (op.kind) {
      case PlanOpKind::Input: {
        err[op.dst] = sample_fresh_error(n, model, rng);
        msg[op.dst].assign(n, 0);
        sample_message(msg[op.dst], p, rng);
        break;
      }
      case PlanOpKind::Mult: {
        const auto& w = weights.at(op.weight);
        auto e = prop_plain_mult(err[op.a], w);
        auto m = negacyclic_multiply(std::span<const i128>(msg[op.a]), std::span<const i128>(w));
        err[op.dst] = std::move(e);
        msg[op.dst] = std::move(m);
        break;
      }
      case PlanOpKind::Rot: {
        auto e = prop_rot(err[op.a], op.shift, model, rng);
        auto m = apply_automorphism(std::span<const i128>(msg[op.a]), galois_element(op.shift, n));
        err[op.dst] = std::move(e);
        msg[op.dst] = std::move(m);
        break;
      }
      case PlanOpKind::Add: {
        auto e = prop_add(err[op.a], err[op.b]);
        std::vector<i128> m(n);
        for (std::size_t i = 0; i < n; ++i) m[i] = msg[op.a][i] + msg[op.b][i];
        err[op.dst] = std::move(e);
        msg[op.dst] = std::move(m);
        break;
      }
    }
  }
  return {std::move(err[plan.output].e), std::move(msg[plan.output])};
}

PlanBounds plan_bounds(const LinearPlan& plan, std::uint64_t p, const NoiseModel& model) {
  const BigInt w_max = BigInt((p - 1) / 2);
  const BigInt nn = BigInt(plan.n);
  const BigInt ks = model.ks_bound(plan.n);
  std::vector<BigInt> be(plan.n_registers, 0);
  std::vector<BigInt> bm(plan.n_registers, 0);
  for (const auto& op : plan.ops) {
    switch (op.kind) {
      case PlanOpKind::Input:
        be[op.dst] = model.cbd_k();
        bm[op.dst] = p - 1;
        break;
      case PlanOpKind::Mult:
        be[op.dst] = be[op.a] * nn * w_max;
        bm[op.dst] = bm[op.a] * nn * w_max;
        break;
      case PlanOpKind::Rot:
        be[op.dst] = be[op.a] + ks;
        bm[op.dst] = bm[op.a];
        break;
      case PlanOpKind::Add:
        be[op.dst] = be[op.a] + be[op.b];
        bm[op.dst] = bm[op.a] + bm[op.b];
        break;
    }
  }
  return {be[plan.output], bm[plan.output]};
}

// ---------------------------------------------------------------------------

struct FastPlanExecutor::Impl {
  LinearPlan plan;
  std::size_t n = 0;
  std::uint64_t p = 0;
  NoiseModel model;
  const RnsBasis* basis = nullptr;
  std::size_t k_err = 1;
  std::size_t k_msg = 1;
  // [weight][prime] -> NTT-domain residues and Shoup constants
  std::vector<std::vector<std::vector<std::uint64_t>>> w_ntt;
  std::vector<std::vector<std::vector<std::uint64_t>>> w_shoup;
  std::map<std::int64_t, std::vector<std::uint32_t>> perms;

  void to_ntt(std::span<const i128> coeffs, std::size_t k, std::span<std::uint64_t> out) const {
    for (std::size_t i = 0; i < k; ++i) {
      const auto& tab = basis->table(i);
      auto dst = out.subspan(i * n, n);
      for (std::size_t j = 0; j < n; ++j) dst[j] = reduce_signed(coeffs[j], tab.modulus());
      tab.forward(dst);
    }
  }

  std::vector<i128> from_ntt(std::vector<std::uint64_t> v, std::size_t k) const {
    for (std::size_t i = 0; i < k; ++i) basis->table(i).inverse(std::span(v).subspan(i * n, n));
    std::vector<i128> out(n);
    const std::uint64_t q1 = basis->prime(0);
    if (k == 1) {
      for (std::size_t j = 0; j < n; ++j) {
        const std::uint64_t r = v[j];
        out[j] = r > q1 / 2 ? static_cast<i128>(r) - static_cast<i128>(q1) : static_cast<i128>(r);
      }
      return out;
    }
    const std::uint64_t q2 = basis->prime(1);
    const std::uint64_t q1_inv = pow_mod(q1 % q2, q2 - 2, q2);
    const u128 mod = static_cast<u128>(q1) * q2;
    for (std::size_t j = 0; j < n; ++j) {
      const std::uint64_t r1 = v[j];
      const std::uint64_t r2 = v[n + j];
      const std::uint64_t diff = (r2 + q2 - (r1 % q2)) % q2;
      const u128 x = static_cast<u128>(r1) + static_cast<u128>(mul_mod(diff, q1_inv, q2)) * q1;
      out[j] = x > mod / 2 ? -static_cast<i128>(mod - x) : static_cast<i128>(x);
    }
    return out;
  }
};

FastPlanExecutor::FastPlanExecutor(const LinearPlan& plan,
                                   const std::vector<std::vector<i128>>& weights, std::uint64_t p,
                                   const NoiseModel& model)
    : impl_(std::make_unique<Impl>()) {
  auto& im = *impl_;
  im.plan = plan;
  im.n = plan.n;
  im.p = p;
  im.model = model;
  im.basis = &RnsBasis::for_dimension(plan.n);
  if (weights.size() < plan.n_weights) throw std::invalid_argument("FastPlanExecutor: missing weights");

  // Worst-case magnitudes decide how many primes make the CRT exact.
  const auto bounds = plan_bounds(plan, p, model);
  static const BigInt kLimit = BigInt(1) << 120;
  if (bounds.error >= kLimit || bounds.message >= kLimit) {
    throw std::overflow_error("FastPlanExecutor: plan output may exceed 2^120");
  }
  im.k_err = im.basis->primes_for_bound(bounds.error);
  im.k_msg = im.basis->primes_for_bound(bounds.message);
  const std::size_t k = std::max(im.k_err, im.k_msg);

  im.w_ntt.resize(plan.n_weights);
  im.w_shoup.resize(plan.n_weights);
  for (std::uint32_t w = 0; w < plan.n_weights; ++w) {
    std::vector<std::uint64_t> all(k * im.n);
    im.to_ntt(weights[w], k, all);
    im.w_ntt[w].resize(k);
    im.w_shoup[w].resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      const std::uint64_t q = im.basis->prime(i);
      im.w_ntt[w][i].assign(all.begin() + static_cast<std::ptrdiff_t>(i * im.n),
                            all.begin() + static_cast<std::ptrdiff_t>((i + 1) * im.n));
      im.w_shoup[w][i].resize(im.n);
      for (std::size_t j = 0; j < im.n; ++j) im.w_shoup[w][i][j] = shoup_precompute(im.w_ntt[w][i][j], q);
    }
  }
  for (const auto& op : plan.ops) {
    if (op.kind == PlanOpKind::Rot && !im.perms.contains(op.shift)) {
      im.perms[op.shift] = im.basis->table(0).automorphism_permutation(galois_element(op.shift, im.n));
    }
  }
}

FastPlanExecutor::~FastPlanExecutor() = default;

std::size_t FastPlanExecutor::error_primes() const { return impl_->k_err; }
std::size_t FastPlanExecutor::message_primes() const { return impl_->k_msg; }

TrialOutcome FastPlanExecutor::run(Rng& rng) const {
  const auto& im = *impl_;
  const std::size_t n = im.n;
  const std::size_t ke = im.k_err;
  const std::size_t km = im.k_msg;
  std::vector<std::vector<std::uint64_t>> re(im.plan.n_registers, std::vector<std::uint64_t>(ke * n));
  std::vector<std::vector<std::uint64_t>> rm(im.plan.n_registers, std::vector<std::uint64_t>(km * n));
  std::vector<i128> tmp(n);
  const int cbd_k = im.model.cbd_k();

  auto mult = [&](std::vector<std::uint64_t>& dst, const std::vector<std::uint64_t>& src,
                  std::uint32_t w, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
      const std::uint64_t q = im.basis->prime(i);
      const auto& wn = im.w_ntt[w][i];
      const auto& ws = im.w_shoup[w][i];
      const std::uint64_t* s = src.data() + i * n;
      std::uint64_t* d = dst.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) d[j] = mul_shoup(s[j], wn[j], ws[j], q);
    }
  };
  auto permute = [&](std::vector<std::uint64_t>& dst, const std::vector<std::uint64_t>& src,
                     const std::vector<std::uint32_t>& perm, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
      const std::uint64_t* s = src.data() + i * n;
      std::uint64_t* d = dst.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) d[j] = s[perm[j]];
    }
  };
  auto add = [&](std::vector<std::uint64_t>& dst, const std::vector<std::uint64_t>& b, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
      const std::uint64_t q = im.basis->prime(i);
      std::uint64_t* d = dst.data() + i * n;
      const std::uint64_t* s = b.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) {
        const std::uint64_t v = d[j] + s[j];
        d[j] = v >= q ? v - q : v;
      }
    }
  };

  std::vector<std::uint64_t> ks_ntt(ke * n);
  for (const auto& op : im.plan.ops) {
    switch (op.kind) {
      case PlanOpKind::Input:
        sample_cbd(tmp, cbd_k, rng);
        im.to_ntt(tmp, ke, re[op.dst]);
        sample_message(tmp, im.p, rng);
        im.to_ntt(tmp, km, rm[op.dst]);
        break;
      case PlanOpKind::Mult:
        mult(re[op.dst], re[op.a], op.weight, ke);
        mult(rm[op.dst], rm[op.a], op.weight, km);
        break;
      case PlanOpKind::Rot: {
        const auto& perm = im.perms.at(op.shift);
        permute(re[op.dst], re[op.a], perm, ke);
        permute(rm[op.dst], rm[op.a], perm, km);
        if (im.model.ks_enabled) {
          const auto ks = sample_ks_noise(n, im.model, rng);
          im.to_ntt(ks, ke, ks_ntt);
          add(re[op.dst], ks_ntt, ke);
        }
        break;
      }
      case PlanOpKind::Add:
        add(re[op.dst], re[op.b], ke);
        add(rm[op.dst], rm[op.b], km);
        break;
    }
  }
  return {im.from_ntt(std::move(re[im.plan.output]), ke),
          im.from_ntt(std::move(rm[im.plan.output]), km)};
}

// ---------------------------------------------------------------------------

FailureProfile::FailureProfile(std::vector<u128> norms) : norms_(std::move(norms)) {
  std::sort(norms_.begin(), norms_.end());
}

std::int64_t FailureProfile::failures(const BigInt& delta) const {
  // smallest norm with 2*norm >= delta is ceil(delta / 2)
  const BigInt threshold = (delta + 1) / 2;
  if (bit_length(threshold) > 127) return 0;
  const u128 t = static_cast<u128>(threshold);
  const auto it = std::lower_bound(norms_.begin(), norms_.end(), t);
  return static_cast<std::int64_t>(norms_.end() - it);
}

FailureResult FailureProfile::evaluate(const BigInt& delta) const {
  FailureResult r;
  r.trials = trials();
  r.failures = failures(delta);
  r.ucb95 = clopper_pearson_upper(r.failures, r.trials);
  return r;
}

FailureProfile simulate_failures(const LinearPlan& plan, std::uint64_t p, std::uint64_t q_mod_p,
                                 const NoiseModel& model, std::int64_t trials, std::uint64_t seed,
                                 int jobs) {
  if (trials < 1) throw std::invalid_argument("simulate_failures: trials must be >= 1");
  const auto weights = sample_plan_weights(plan, p, seed);
  const FastPlanExecutor exec(plan, weights, p, model);
  std::vector<u128> norms(static_cast<std::size_t>(trials));
  auto work = [&](std::int64_t first, std::int64_t stride) {
    for (std::int64_t t = first; t < trials; t += stride) {
      Rng rng = trial_rng(seed, static_cast<std::uint64_t>(t));
      const auto out = exec.run(rng);
      norms[static_cast<std::size_t>(t)] = infinity_norm(decoding_error(out, p, q_mod_p));
    }
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(trials)));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < workers; ++j) pool.emplace_back(work, j, workers);
    for (auto& th : pool) th.join();
  }
  return FailureProfile(std::move(norms));
}

namespace {

std::string model_key(const NoiseModel& m) {
  std::ostringstream os;
  os.precision(17);
  os << m.sigma << ',' << m.ks_enabled << ',' << m.ks_digits << ',' << m.ks_factor;
  return os.str();
}

}  // namespace

std::shared_ptr<const FailureProfile> NormCache::get(const LinearPlan& plan, std::uint64_t p,
                                                     std::uint64_t q_mod_p,
                                                     const NoiseModel& model, std::int64_t trials,
                                                     std::uint64_t seed, int jobs) {
  SimulationKey key{plan.fingerprint(), p, q_mod_p, model_key(model), trials, seed};
  {
    std::lock_guard<std::mutex> lock(mu_);
    const auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
  }
  auto prof = std::make_shared<const FailureProfile>(
      simulate_failures(plan, p, q_mod_p, model, trials, seed, jobs));
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.emplace(std::move(key), std::move(prof)).first->second;
}

std::size_t NormCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

}  // namespace sinfer
