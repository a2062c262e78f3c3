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

#ifndef SINFER_TESTS_ORACLES_HPP
#define SINFER_TESTS_ORACLES_HPP

// Independent reference computations shared by the unit tests and the
// acceptance binary.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "sinfer/controller/pareto.hpp"
#include "sinfer/controller/policy.hpp"
#include "sinfer/noise/failure.hpp"
#include "sinfer/noise/mini_bfv.hpp"
#include "sinfer/numeric/ntt.hpp"
#include "sinfer/numeric/primes.hpp"

namespace sinfer::oracle {

inline std::vector<i128> schoolbook(const std::vector<i128>& a, const std::vector<i128>& b) {
  const std::size_t n = a.size();
  std::vector<i128> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const i128 t = a[i] * b[j];
      if (i + j < n) {
        out[i + j] += t;
      } else {
        out[i + j - n] -= t;
      }
    }
  }
  return out;
}

// u = w0*A + w1*B; out = w2*u + C + blind.
inline LinearPlan chain_plan(std::size_t n) {
  PlanBuilder b(n);
  const auto a = b.input();
  const auto u = b.mult_into(a);
  const auto bb = b.input();
  b.add_into(u, b.mult_into(bb));
  b.release(bb);
  const auto v = b.mult_into(u);
  const auto c = b.input();
  b.add_into(v, c);
  b.release(c);
  const auto blind = b.input(true);
  b.add_into(v, blind, true);
  b.release(blind);
  return std::move(b).finish(v);
}

struct Agreement {
  int trials = 0;
  int agree = 0;
  int bfv_failures = 0;
  int predicted = 0;
};

inline Agreement compare_with_decryption(const LinearPlan& plan, std::uint64_t p, const BigInt& q, int trials,
                  std::uint64_t seed) {
  const std::size_t n = plan.n;
  NoiseModel model;
  model.ks_enabled = false;
  const auto weights = sample_plan_weights(plan, p, seed);
  CryptoParams cp{n, p, q, model.sigma, 0};
  const MiniBfv bfv(cp, model);
  const auto q_mod_p = static_cast<std::uint64_t>(q % p);
  Agreement out;
  for (int t = 0; t < trials; ++t) {
    // Tracker.
    Rng rng = trial_rng(seed, static_cast<std::uint64_t>(t));
    const TrialOutcome o = run_trial_reference(plan, weights, p, model, rng);
    const auto e = decoding_error(o, p, q_mod_p);
    const BigInt norm = to_big(static_cast<i128>(infinity_norm(e)));
    const bool predicted = 2 * norm >= bfv.delta();

    // Encryption replaying the same draws.
    Rng replay = trial_rng(seed, static_cast<std::uint64_t>(t));
    const SecretKey sk = bfv.keygen(derive_seed(seed, 1000000 + static_cast<std::uint64_t>(t)));
    std::vector<Ciphertext> reg(plan.n_registers);
    std::vector<std::vector<std::uint64_t>> plain(plan.n_registers);
    std::uint64_t inputs = 0;
    for (const auto& op : plan.ops) {
      switch (op.kind) {
        case PlanOpKind::Input: {
          std::vector<i128> err(n);
          std::vector<i128> msg(n);
          sample_cbd(err, model.cbd_k(), replay);
          sample_message(msg, p, replay);
          std::vector<std::uint64_t> m(n);
          for (std::size_t i = 0; i < n; ++i) m[i] = static_cast<std::uint64_t>(msg[i]);
          reg[op.dst] = bfv.encrypt_with_error(sk, m, err, derive_seed(seed ^ 0xa5a5, inputs++));
          plain[op.dst] = m;
          break;
        }
        case PlanOpKind::Mult:
          reg[op.dst] = bfv.plain_mult(reg[op.a], weights[op.weight]);
          plain[op.dst] = plain_negacyclic_mod(plain[op.a], weights[op.weight], p);
          break;
        case PlanOpKind::Add:
          reg[op.dst] = bfv.add(reg[op.dst], reg[op.b]);
          for (std::size_t i = 0; i < n; ++i) plain[op.dst][i] = (plain[op.dst][i] + plain[op.b][i]) % p;
          break;
        case PlanOpKind::Rot:
          throw std::logic_error("chain plans have no rotations");
      }
    }
    const bool failed = bfv.decrypt(sk, reg[plan.output]) != plain[plan.output];
    ++out.trials;
    out.agree += failed == predicted ? 1 : 0;
    out.bfv_failures += failed ? 1 : 0;
    out.predicted += predicted ? 1 : 0;
  }
  return out;
}

/// O(N^2) dominance filter; ascending indices, equal points all kept.
inline std::vector<std::size_t> brute_front(const std::vector<Objectives>& pts) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      const auto& x = pts[j];
      const auto& y = pts[i];
      dominated = x.A >= y.A && x.T <= y.T && x.B <= y.B && (x.A > y.A || x.T < y.T || x.B < y.B);
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

struct GradientCheck {
  double max_z = 0.0;  // max over entries of |mean - exact| / standard error
  int entries = 0;
};

/// Score-function estimator with b = 0 on a 3 x 3 policy against the exact
/// gradient of J = sum_a pi(a) f(a), the latter by central differences of
/// the full enumeration.
inline GradientCheck reinforce_against_enumeration(int samples, std::uint64_t seed) {
  PolicyState p;
  p.logits = {{0.2, -0.5, 0.1}, {1.0, 0.0, -1.0}, {-0.3, 0.3, 0.0}};
  std::mt19937_64 frng(42);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  double f[3][3][3];
  for (auto& x : f)
    for (auto& y : x)
      for (auto& z : y) z = ud(frng);

  const auto expected = [&](const std::vector<std::vector<double>>& logits) {
    const auto p0 = softmax(logits[0]);
    const auto p1 = softmax(logits[1]);
    const auto p2 = softmax(logits[2]);
    double j = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) j += p0[a] * p1[b] * p2[c] * f[a][b][c];
    return j;
  };
  double exact[3][3];
  for (int t = 0; t < 3; ++t) {
    for (int j = 0; j < 3; ++j) {
      auto up = p.logits;
      auto dn = p.logits;
      up[t][j] += 1e-5;
      dn[t][j] -= 1e-5;
      exact[t][j] = (expected(up) - expected(dn)) / 2e-5;
    }
  }

  double sum[3][3] = {};
  double sq[3][3] = {};
  Rng rng = make_rng(seed);
  for (int s = 0; s < samples; ++s) {
    const auto a = sample(p, rng).actions;
    const std::vector<Trajectory> one{{a, {}, f[a[0]][a[1]][a[2]]}};
    const auto g = policy_gradient(p, one, 0.0);
    for (int t = 0; t < 3; ++t) {
      for (int j = 0; j < 3; ++j) {
        sum[t][j] += g[t][j];
        sq[t][j] += g[t][j] * g[t][j];
      }
    }
  }
  GradientCheck out;
  for (int t = 0; t < 3; ++t) {
    for (int j = 0; j < 3; ++j) {
      const double mean = sum[t][j] / samples;
      const double var = sq[t][j] / samples - mean * mean;
      const double se = std::sqrt(var / samples);
      out.max_z = std::max(out.max_z, std::abs(mean - exact[t][j]) / se);
      ++out.entries;
    }
  }
  return out;
}

struct BanditRun {
  double p_best = 0.0;
  int episodes = 0;
};

/// Two arms with rewards 1 and 0, lr 0.1, m = 5, gamma = 1. Stops once
/// P(arm 0) > 0.95 or the budget is spent.
inline BanditRun two_arm_bandit(std::uint64_t seed, int episode_budget) {
  PolicyState p = PolicyState::uniform(std::vector<std::size_t>{2});
  p.learning_rate = 0.1;
  p.batch = 5;
  Rng rng = make_rng(seed);
  int episodes = 0;
  while (episodes < episode_budget && softmax(p.logits[0])[0] <= 0.95) {
    std::vector<Trajectory> batch;
    for (std::size_t k = 0; k < p.batch; ++k) {
      const auto a = sample(p, rng).actions;
      batch.push_back({a, {}, a[0] == 0 ? 1.0 : 0.0});
    }
    update(p, batch);
    episodes += static_cast<int>(p.batch);
  }
  return {softmax(p.logits[0])[0], episodes};
}

/// Seeds 1..10 crossed 0.95 between episodes 535 and 725 on the first run,
/// nine of them by 700; frozen as the regression budget.
inline constexpr int kBanditEpisodeBudget = 700;

}  // namespace sinfer::oracle

#endif  // SINFER_TESTS_ORACLES_HPP
