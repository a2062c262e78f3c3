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

#ifndef SINFER_CONTROLLER_POLICY_HPP
#define SINFER_CONTROLLER_POLICY_HPP

// Categorical policy over the search space and its REINFORCE update.
//
// Decision tau of t carries weight gamma^(t-1-tau) in the update, so the
// last decision always has weight 1. The gradient of log softmax is
// onehot(a) - softmax(logits), applied in closed form.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sinfer/controller/search_space.hpp"
#include "sinfer/numeric/rng.hpp"

namespace sinfer {

enum class BaselineMode {
  /// b is an exponential moving average of batch-mean rewards. The first
  /// batch initializes b to its own mean before the gradient is taken.
  Ema,
  /// b is the current batch mean (used for translation-invariance checks).
  BatchMean,
  /// b stays at its current value.
  Fixed,
};

struct PolicyState {
  std::vector<std::vector<double>> logits;
  std::optional<double> baseline;
  double ema_decay = 0.9;
  double learning_rate = 0.05;
  double gamma = 1.0;
  std::size_t batch = 5;
  BaselineMode baseline_mode = BaselineMode::Ema;

  /// All-zero logits (uniform sampling) for every decision of `space`.
  static PolicyState uniform(const SearchSpace& space);
  /// All-zero logits for the given decision sizes.
  static PolicyState uniform(std::span<const std::size_t> sizes);

  /// Logits used for decision `tau` given the earlier actions. Tables are
  /// independent, so `previous` is ignored; a conditioned policy overrides
  /// this lookup.
  std::span<const double> logits_for(std::size_t tau, std::span<const int> previous) const;

  std::vector<std::string> check() const;
};

/// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

struct ActionSample {
  std::vector<int> actions;
  std::vector<double> log_probs;
};

/// One categorical draw per decision by inverse-CDF on a uniform in [0, 1).
/// Decisions listed in `forced` (same length as the logits, -1 = free) take
/// the given action instead; their log-probability is still reported.
ActionSample sample(const PolicyState& policy, Rng& rng, std::span<const int> forced = {});
ActionSample sample(const PolicyState& policy, std::uint64_t seed);

/// One completed episode as seen by the update.
struct Trajectory {
  std::vector<int> actions;
  /// Decisions excluded from the gradient (copied rather than sampled).
  std::vector<bool> masked;
  double reward = 0.0;
};

/// (1/m) sum_k sum_tau gamma^(t-1-tau) grad log pi(a_tau) (R_k - b), per
/// logit, for an explicit baseline b.
std::vector<std::vector<double>> policy_gradient(const PolicyState& policy,
                                                 std::span<const Trajectory> batch,
                                                 double baseline);

/// Baseline used for this batch's gradient under policy.baseline_mode.
double batch_baseline(const PolicyState& policy, std::span<const Trajectory> batch);

/// Gradient ascent step with learning_rate, then the EMA baseline update.
/// Returns the baseline that was used for the gradient.
double update(PolicyState& policy, std::span<const Trajectory> batch);

/// R = A + A * xi_shaped.
double reward(double accuracy, double xi_shaped);

/// clamp(xi_max - xi, 0, xi_max): lower cost gives the larger bonus. With
/// `raw` the cost is passed through unchanged.
double shape_xi(double xi, double xi_max, bool raw = false);

}  // namespace sinfer

#endif  // SINFER_CONTROLLER_POLICY_HPP
