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

#ifndef SINFER_PCE_COST_HPP
#define SINFER_PCE_COST_HPP

// Pricing of operation counts and per-element protocols, and the
// network-level aggregation into time, bandwidth and a scalar score.

#include <cstddef>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "sinfer/core/model.hpp"
#include "sinfer/core/profile.hpp"
#include "sinfer/noise/failure.hpp"
#include "sinfer/pie/pie.hpp"

namespace sinfer {

struct Price {
  double t = 0.0;  // seconds
  double b = 0.0;  // bytes
};

class MissingProfileEntry : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Linear in every count; bytes cover input, output and blinding ciphertexts.
Price price_linear(const OpCounts& counts, const CryptoParams& params,
                   const CalibrationProfile& profile);

/// Per-element cost scaled by l_i / ref_bits. AvgPool is absorbed into the
/// homomorphic additions and costs nothing.
Price nonlinear_cost(const NonLinearLayerParms& layer, const CalibrationProfile& profile);

struct ScoreWeights {
  double beta = 0.5;
  double time_scale = 1.0;  // seconds
  double bw_scale = 1.0;    // bytes

  std::vector<std::string> check() const;
};

/// beta * T / time_scale + (1 - beta) * B / bw_scale.
double score(double T, double B, const ScoreWeights& w);

/// pie_optimize results shared across networks that repeat a layer.
class PieMemo {
 public:
  CryptoParams get(const LinearLayerParms& layer, const PieConfig& cfg);
  std::size_t size() const;

 private:
  using Key = std::tuple<int, std::int64_t, std::int64_t, std::int64_t, std::int64_t,
                         std::int64_t, std::int64_t, std::int64_t, std::int64_t,
                         std::int64_t, int, std::int64_t>;
  static Key key(const LinearLayerParms& layer);

  mutable std::mutex mu_;
  std::map<Key, CryptoParams> params_;
  NormCache norms_;
};

/// Infeasibility of one layer of a network.
class LayerInfeasibleError : public InfeasibleError {
 public:
  LayerInfeasibleError(std::size_t layer, const InfeasibleError& cause);
  std::size_t layer() const { return layer_; }

 private:
  std::size_t layer_;
};

CostReport characterize_network(const NetworkParms& net, const PieConfig& cfg,
                                const CalibrationProfile& profile,
                                const ScoreWeights& weights = {}, PieMemo* memo = nullptr);

struct CalibrateOptions {
  std::vector<std::uint64_t> dims{1024, 2048, 4096, 8192, 16384};
  std::vector<int> words{1, 2};
  int reps = 5;
  /// t_rot = factor * t_mult; key switching is not executed by mini-BFV.
  double ks_overhead = 8.0;
  std::uint64_t seed = 1;
  /// Non-linear entries are copied from this profile.
  const CalibrationProfile* nonlinear_from = nullptr;
};

/// Wall-clock medians of mini-BFV add and plaintext multiply per (n, words)
/// row, made non-decreasing by a running maximum along n and words.
CalibrationProfile calibrate(const CalibrateOptions& opt);

}  // namespace sinfer

#endif  // SINFER_PCE_COST_HPP
