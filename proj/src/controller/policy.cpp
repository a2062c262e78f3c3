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

#include "sinfer/controller/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sinfer {

PolicyState PolicyState::uniform(const SearchSpace& space) {
  std::vector<std::size_t> sizes;
  for (const Decision& d : space.decisions()) sizes.push_back(d.choices);
  return uniform(sizes);
}

PolicyState PolicyState::uniform(std::span<const std::size_t> sizes) {
  PolicyState p;
  for (const std::size_t s : sizes) p.logits.emplace_back(s, 0.0);
  return p;
}

std::span<const double> PolicyState::logits_for(std::size_t tau,
                                                std::span<const int> /*previous*/) const {
  return logits.at(tau);
}

std::vector<std::string> PolicyState::check() const {
  std::vector<std::string> v;
  for (std::size_t t = 0; t < logits.size(); ++t) {
    if (logits[t].empty()) v.push_back("logits[" + std::to_string(t) + "]: empty");
    for (const double x : logits[t]) {
      if (!std::isfinite(x)) {
        v.push_back("logits[" + std::to_string(t) + "]: non-finite value");
        break;
      }
    }
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) v.emplace_back("gamma: must be in (0, 1]");
  if (!(ema_decay >= 0.0 && ema_decay < 1.0)) v.emplace_back("ema_decay: must be in [0, 1)");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    v.emplace_back("lr: must be positive");
  }
  if (batch < 1) v.emplace_back("m: must be >= 1");
  return v;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.size());
  if (logits.empty()) return p;
  const double hi = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    p[j] = std::exp(logits[j] - hi);
    sum += p[j];
  }
  for (double& x : p) x /= sum;
  return p;
}

namespace {

// 53 random mantissa bits; the same stream gives the same draws everywhere.
double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double discount(double gamma, std::size_t tau, std::size_t t) {
  return std::pow(gamma, static_cast<double>(t - 1 - tau));
}

}  // namespace

ActionSample sample(const PolicyState& policy, Rng& rng, std::span<const int> forced) {
  const std::size_t t = policy.logits.size();
  if (!forced.empty() && forced.size() != t) {
    throw std::invalid_argument("sample: forced actions must match the decision count");
  }
  ActionSample out;
  out.actions.reserve(t);
  out.log_probs.reserve(t);
  for (std::size_t tau = 0; tau < t; ++tau) {
    const auto p = softmax(policy.logits_for(tau, out.actions));
    int a = 0;
    if (!forced.empty() && forced[tau] >= 0) {
      a = forced[tau];
      if (static_cast<std::size_t>(a) >= p.size()) {
        throw std::out_of_range("sample: forced action out of range");
      }
    } else if (p.size() > 1) {
      const double u = uniform01(rng);
      double acc = 0.0;
      a = static_cast<int>(p.size()) - 1;
      for (std::size_t j = 0; j + 1 < p.size(); ++j) {
        acc += p[j];
        if (u < acc) {
          a = static_cast<int>(j);
          break;
        }
      }
    }
    out.actions.push_back(a);
    out.log_probs.push_back(std::log(p[static_cast<std::size_t>(a)]));
  }
  return out;
}

ActionSample sample(const PolicyState& policy, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return sample(policy, rng);
}

std::vector<std::vector<double>> policy_gradient(const PolicyState& policy,
                                                 std::span<const Trajectory> batch,
                                                 double baseline) {
  std::vector<std::vector<double>> grad;
  grad.reserve(policy.logits.size());
  for (const auto& row : policy.logits) grad.emplace_back(row.size(), 0.0);
  if (batch.empty()) return grad;

  const std::size_t t = policy.logits.size();
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  for (const Trajectory& k : batch) {
    if (k.actions.size() != t) throw std::invalid_argument("policy_gradient: action count mismatch");
    const double adv = k.reward - baseline;
    if (adv == 0.0) continue;
    for (std::size_t tau = 0; tau < t; ++tau) {
      if (!k.masked.empty() && k.masked[tau]) continue;
      const double w = discount(policy.gamma, tau, t) * adv * inv_m;
      if (w == 0.0) continue;
      const auto p = softmax(policy.logits_for(tau, std::span(k.actions).first(tau)));
      const auto a = static_cast<std::size_t>(k.actions[tau]);
      for (std::size_t j = 0; j < p.size(); ++j) {
        grad[tau][j] += w * ((j == a ? 1.0 : 0.0) - p[j]);
      }
    }
  }
  return grad;
}

namespace {

double mean_reward(std::span<const Trajectory> batch) {
  double s = 0.0;
  for (const auto& k : batch) s += k.reward;
  return batch.empty() ? 0.0 : s / static_cast<double>(batch.size());
}

}  // namespace

double batch_baseline(const PolicyState& policy, std::span<const Trajectory> batch) {
  switch (policy.baseline_mode) {
    case BaselineMode::BatchMean: return mean_reward(batch);
    case BaselineMode::Ema: return policy.baseline.value_or(mean_reward(batch));
    case BaselineMode::Fixed: return policy.baseline.value_or(0.0);
  }
  return 0.0;
}

double update(PolicyState& policy, std::span<const Trajectory> batch) {
  const double b = batch_baseline(policy, batch);
  if (batch.empty()) return b;
  const auto grad = policy_gradient(policy, batch, b);
  for (std::size_t tau = 0; tau < grad.size(); ++tau) {
    for (std::size_t j = 0; j < grad[tau].size(); ++j) {
      policy.logits[tau][j] += policy.learning_rate * grad[tau][j];
    }
  }
  const double mean = mean_reward(batch);
  switch (policy.baseline_mode) {
    case BaselineMode::Ema:
      policy.baseline = policy.ema_decay * b + (1.0 - policy.ema_decay) * mean;
      break;
    case BaselineMode::BatchMean: policy.baseline = mean; break;
    case BaselineMode::Fixed: break;
  }
  return b;
}

double reward(double accuracy, double xi_shaped) {
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) {
    throw std::invalid_argument("reward: accuracy must be in [0, 1]");
  }
  return accuracy + accuracy * xi_shaped;
}

double shape_xi(double xi, double xi_max, bool raw) {
  if (raw) return xi;
  return std::clamp(xi_max - xi, 0.0, xi_max);
}

}  // namespace sinfer
