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

#ifndef SINFER_NOISE_FAILURE_HPP
#define SINFER_NOISE_FAILURE_HPP

// Monte-Carlo decryption-failure simulation of a linear-layer plan.
//
// Each trial encrypts uniformly random messages with fresh error, runs the
// plan, and measures the decoding error of the output:
//   phase = delta*M + E (mod q),  M = [M]_p + p*K  =>  error = E - (q mod p)*K
// The trial fails when 2*|error_i| >= delta for some slot i. E and K do not
// depend on q, so the sorted per-trial maxima serve every q that shares
// (q mod p); pie descends q without re-simulating.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "sinfer/core/model.hpp"
#include "sinfer/noise/error.hpp"
#include "sinfer/noise/plan.hpp"

namespace sinfer {

struct FailureResult {
  std::int64_t failures = 0;
  std::int64_t trials = 0;
  double ucb95 = 1.0;
};

/// One-sided Clopper-Pearson upper confidence bound on a binomial rate.
double clopper_pearson_upper(std::int64_t failures, std::int64_t trials, double confidence = 0.95);

/// Exact output of one trial: error stream E and message stream M.
struct TrialOutcome {
  std::vector<i128> error;
  std::vector<i128> message;
};

/// e' = E - r*K with K = (M - [M]_p) / p and [M]_p centered.
std::vector<i128> decoding_error(const TrialOutcome& t, std::uint64_t p, std::uint64_t q_mod_p);

/// Worst-case magnitudes of the plan output's error and message streams.
struct PlanBounds {
  BigInt error;
  BigInt message;
};
PlanBounds plan_bounds(const LinearPlan& plan, std::uint64_t p, const NoiseModel& model);

/// Plaintext operands for a plan, uniform in [-p/2, p/2), fixed per seed.
std::vector<std::vector<i128>> sample_plan_weights(const LinearPlan& plan, std::uint64_t p,
                                                   std::uint64_t seed);

/// Input messages, uniform in [0, p). An Input op draws its fresh error
/// first, then its message.
void sample_message(std::span<i128> out, std::uint64_t p, Rng& rng);

/// Trial randomness stream for index `trial` of a run seeded with `seed`.
Rng trial_rng(std::uint64_t seed, std::uint64_t trial);

/// Slow route: executes the plan with ErrorState operations and exact
/// big-integer products. Consumes randomness exactly like the fast route.
TrialOutcome run_trial_reference(const LinearPlan& plan,
                                 const std::vector<std::vector<i128>>& weights, std::uint64_t p,
                                 const NoiseModel& model, Rng& rng);

/// Fast route: the plan executed in the NTT domain of one or two word
/// primes chosen from the plan's worst-case bound, with exact CRT output.
class FastPlanExecutor {
 public:
  FastPlanExecutor(const LinearPlan& plan, const std::vector<std::vector<i128>>& weights,
                   std::uint64_t p, const NoiseModel& model);
  ~FastPlanExecutor();
  FastPlanExecutor(const FastPlanExecutor&) = delete;
  FastPlanExecutor& operator=(const FastPlanExecutor&) = delete;

  TrialOutcome run(Rng& rng) const;
  std::size_t error_primes() const;
  std::size_t message_primes() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Sorted per-trial maxima of |e'|.
class FailureProfile {
 public:
  FailureProfile() = default;
  explicit FailureProfile(std::vector<u128> norms);

  std::int64_t trials() const { return static_cast<std::int64_t>(norms_.size()); }
  /// Trials with 2*norm >= delta.
  std::int64_t failures(const BigInt& delta) const;
  FailureResult evaluate(const BigInt& delta) const;
  const std::vector<u128>& norms() const { return norms_; }

 private:
  std::vector<u128> norms_;
};

struct SimulationKey {
  std::string plan;
  std::uint64_t p = 0;
  std::uint64_t q_mod_p = 0;
  std::string model;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;

  auto operator<=>(const SimulationKey&) const = default;
};

/// Runs `trials` fast-route trials. Trial t uses trial_rng(seed, t), so the
/// result does not depend on `jobs`.
FailureProfile simulate_failures(const LinearPlan& plan, std::uint64_t p, std::uint64_t q_mod_p,
                                 const NoiseModel& model, std::int64_t trials, std::uint64_t seed,
                                 int jobs = 1);

/// Thread-safe memo of failure profiles.
class NormCache {
 public:
  std::shared_ptr<const FailureProfile> get(const LinearPlan& plan, std::uint64_t p,
                                            std::uint64_t q_mod_p, const NoiseModel& model,
                                            std::int64_t trials, std::uint64_t seed, int jobs = 1);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<SimulationKey, std::shared_ptr<const FailureProfile>> entries_;
};

/// Monte-Carlo failure rate of one layer evaluation at `params`.
FailureResult mc_failure_rate(const LinearLayerParms& layer, const CryptoParams& params,
                              std::int64_t trials, std::uint64_t seed, const NoiseModel& model = {},
                              int jobs = 1, NormCache* cache = nullptr);

}  // namespace sinfer

#endif  // SINFER_NOISE_FAILURE_HPP
