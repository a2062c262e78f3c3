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

#ifndef SINFER_CONTROLLER_SEARCH_HPP
#define SINFER_CONTROLLER_SEARCH_HPP

// The search loop. Each batch of m episodes is sampled from the current
// policy, decoded, scored for accuracy and cost, and then used for one
// policy update.
//
// Episodes with sw_flag = false reuse the weights of the latest training
// episode, so their architectural decisions are copied from it and masked
// out of the gradient; only quantizer decisions are sampled.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sinfer/controller/pareto.hpp"
#include "sinfer/controller/policy.hpp"
#include "sinfer/controller/search_space.hpp"
#include "sinfer/core/profile.hpp"
#include "sinfer/estimator/estimator.hpp"
#include "sinfer/pce/cost.hpp"

namespace sinfer {

struct SearchSettings {
  std::int64_t episodes = 200;
  std::int64_t sw_period = 5;
  std::size_t batch = 5;
  double learning_rate = 0.05;
  double gamma = 1.0;
  double ema_decay = 0.9;
  double xi_max = 2.0;
  bool raw_xi = false;
  std::uint64_t seed = 1;
  std::string dataset = "surrogate";
  int jobs = 1;

  std::vector<std::string> check() const;
};

enum class EpisodeStatus { Ok, Rejected, Infeasible, EstimatorFailed };
std::string_view to_string(EpisodeStatus s);

struct Episode {
  std::int64_t index = 0;
  std::vector<int> actions;
  std::vector<bool> copied;
  bool sw_flag = true;
  std::optional<NetworkParms> net;
  std::optional<CostReport> cost;
  double A = 0.0;
  double T = 0.0;
  double B = 0.0;
  double xi = 0.0;
  double R = 0.0;
  std::optional<std::string> weights_id;
  EpisodeStatus status = EpisodeStatus::Ok;
  std::string detail;
};

struct SearchResult {
  std::vector<Episode> episodes;
  /// Indices into `episodes`: non-dominated Ok episodes over (A, T, B).
  /// Of several episodes with identical actions and objectives only the
  /// first is listed.
  std::vector<std::size_t> pareto;
  PolicyState policy;
};

struct SearchContext {
  const SearchSpace& space;
  const SearchSettings& settings;
  const PieConfig& pie;
  const ScoreWeights& weights;
  const CalibrationProfile& profile;
  AccuracyEstimator& estimator;
  PieMemo* memo = nullptr;
  /// Called once per episode, in index order, from the calling thread.
  std::function<void(const Episode&)> on_episode;
};

SearchResult run_search(const SearchContext& ctx);

/// Running EMA of episode rewards: ema[0] = R_0, ema[k] = d ema[k-1] + (1-d) R_k.
std::vector<double> reward_ema(const std::vector<Episode>& episodes, double decay);

/// Trace schema: Eps,actions,A,T,B,xi,R,sw_flag,status. Actions are choice
/// indices joined by '-'; A, T, B and xi are empty for episodes that never
/// produced them.
std::string trace_csv_header();
std::string trace_csv_row(const Episode& e);

/// A trace row read back from CSV.
struct TraceRow {
  std::int64_t eps = 0;
  std::string actions;
  std::optional<double> A, T, B, xi;
  double R = 0.0;
  bool sw_flag = false;
  std::string status;
  std::string line;  // original text, re-emitted verbatim
};

/// Throws std::runtime_error naming the line and column on malformed input.
std::vector<TraceRow> parse_trace_csv(const std::string& text);

/// Non-dominated rows with status "ok", as indices into `rows`, with the
/// same duplicate rule as SearchResult::pareto.
std::vector<std::size_t> pareto_rows(const std::vector<TraceRow>& rows);

}  // namespace sinfer

#endif  // SINFER_CONTROLLER_SEARCH_HPP
