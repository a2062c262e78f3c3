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

#include "sinfer/pce/cost.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "sinfer/noise/mini_bfv.hpp"
#include "sinfer/pce/packing.hpp"

namespace sinfer {

Price price_linear(const OpCounts& counts, const CryptoParams& params,
                   const CalibrationProfile& profile) {
  const int words = profile.words(params.bits_q());
  const LinearUnitCost* c = profile.find(params.n, words);
  if (c == nullptr) {
    throw MissingProfileEntry("profile '" + profile.profile_name + "' has no row n" +
                              std::to_string(params.n) + "_w" + std::to_string(words));
  }
  Price out;
  out.t = static_cast<double>(counts.n_mult) * c->t_mult +
          static_cast<double>(counts.n_rot) * c->t_rot +
          static_cast<double>(counts.n_add) * c->t_add;
  out.b = static_cast<double>(counts.n_ct_in + counts.n_ct_out + counts.n_fresh_enc) * c->ct_bytes;
  return out;
}

Price nonlinear_cost(const NonLinearLayerParms& layer, const CalibrationProfile& profile) {
  if (layer.kind == NonLinearKind::AvgPool) return {};
  const NonLinearUnitCost* c = profile.find(layer.kind);
  if (c == nullptr) {
    throw MissingProfileEntry("profile '" + profile.profile_name + "' has no " +
                              std::string(to_string(layer.kind)) + " entry");
  }
  const double elements = static_cast<double>(layer.c_i) * static_cast<double>(layer.n_i);
  const double scale = static_cast<double>(layer.l_i) / c->ref_bits;
  return {elements * c->t_per_element * scale, elements * c->b_per_element * scale};
}

std::vector<std::string> ScoreWeights::check() const {
  std::vector<std::string> out;
  if (!(beta >= 0.0 && beta <= 1.0)) out.push_back("beta must lie in [0, 1]");
  if (!(time_scale > 0.0)) out.push_back("time_scale must be > 0");
  if (!(bw_scale > 0.0)) out.push_back("bw_scale must be > 0");
  return out;
}

double score(double T, double B, const ScoreWeights& w) {
  return w.beta * (T / w.time_scale) + (1.0 - w.beta) * (B / w.bw_scale);
}

PieMemo::Key PieMemo::key(const LinearLayerParms& l) {
  return {static_cast<int>(l.kind), l.n_i, l.n_o,  l.f_w, l.f_h, l.l_i,
          l.l_f,                    l.c_i, l.c_o,  l.stride, static_cast<int>(l.pad.mode),
          l.pad.amount};
}

CryptoParams PieMemo::get(const LinearLayerParms& layer, const PieConfig& cfg) {
  const Key k = key(layer);
  {
    std::lock_guard lock(mu_);
    if (auto it = params_.find(k); it != params_.end()) return it->second;
  }
  // Two threads may race on the same layer; both compute the same value.
  CryptoParams cp = pie_optimize(layer, cfg, &norms_);
  std::lock_guard lock(mu_);
  params_.emplace(k, cp);
  return cp;
}

std::size_t PieMemo::size() const {
  std::lock_guard lock(mu_);
  return params_.size();
}

LayerInfeasibleError::LayerInfeasibleError(std::size_t layer, const InfeasibleError& cause)
    : InfeasibleError(cause.binding(), "layer " + std::to_string(layer) + ": " + cause.what()),
      layer_(layer) {}

CostReport characterize_network(const NetworkParms& net, const PieConfig& cfg,
                                const CalibrationProfile& profile, const ScoreWeights& weights,
                                PieMemo* memo) {
  PieMemo local;
  PieMemo& pm = memo != nullptr ? *memo : local;
  CostReport report;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    LayerCost lc;
    lc.index = i;
    if (const auto* lin = std::get_if<LinearLayerParms>(&net.layers[i])) {
      CryptoParams cp;
      try {
        cp = pm.get(*lin, cfg);
      } catch (const InfeasibleError& e) {
        throw LayerInfeasibleError(i, e);
      }
      lc.kind = std::string(to_string(lin->kind));
      lc.linear = true;
      lc.ops = linear_op_counts(*lin, cp.n);
      const Price pr = price_linear(lc.ops, cp, profile);
      lc.t_layer = pr.t;
      lc.b_layer = pr.b;
      lc.crypto = cp;
    } else {
      const auto& nl = std::get<NonLinearLayerParms>(net.layers[i]);
      lc.kind = std::string(to_string(nl.kind));
      lc.n_elements = nl.c_i * nl.n_i;
      const Price pr = nonlinear_cost(nl, profile);
      lc.t_layer = pr.t;
      lc.b_layer = pr.b;
    }
    report.T += lc.t_layer;
    report.B += lc.b_layer;
    report.per_layer.push_back(std::move(lc));
  }
  report.xi = score(report.T, report.B, weights);
  return report;
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

template <typename F>
double time_median(int reps, F&& op) {
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    op();
    const auto t1 = std::chrono::steady_clock::now();
    samples.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  return median(std::move(samples));
}

}  // namespace

CalibrationProfile calibrate(const CalibrateOptions& opt) {
  if (opt.reps < 1) throw std::invalid_argument("calibrate: reps must be >= 1");
  CalibrationProfile prof;
  prof.profile_name = "calibrated";
  prof.source = CalibrationProfile::Source::Measured;
  NoiseModel model;
  for (const std::uint64_t n : opt.dims) {
    const auto p = static_cast<std::uint64_t>(gen_prime_congruent(18, BigInt(2 * n)).value);
    for (const int w : opt.words) {
      PieConfig cfg;
      const int bits = std::max(prof.limb_bits * w - 1, bit_length(BigInt(2 * n) * p) + 1);
      const auto q = ciphertext_modulus(bits, n, p, cfg);
      CryptoParams cp{n, p, q.value, model.sigma, 0};
      const MiniBfv bfv(cp, model);
      const SecretKey sk = bfv.keygen(opt.seed);
      std::vector<std::uint64_t> m(n);
      std::vector<i128> wgt(n);
      Rng rng = make_rng(derive_seed(opt.seed, n));
      for (std::size_t i = 0; i < n; ++i) {
        m[i] = rng() % p;
        wgt[i] = static_cast<i128>(rng() % p) - static_cast<i128>(p / 2);
      }
      const Ciphertext a = bfv.encrypt(sk, m, opt.seed + 1);
      const Ciphertext b = bfv.encrypt(sk, m, opt.seed + 2);
      LinearUnitCost c;
      c.t_add = time_median(opt.reps, [&] { (void)bfv.add(a, b); });
      c.t_mult = time_median(opt.reps, [&] { (void)bfv.plain_mult(a, wgt); });
      c.t_rot = opt.ks_overhead * c.t_mult;
      c.ct_bytes = 2.0 * static_cast<double>(n) * w * 8.0;
      prof.linear[{n, w}] = c;
    }
  }
  // Running maximum along n, then along words, restores monotonicity that
  // timer jitter can break.
  for (const int w : opt.words) {
    LinearUnitCost run{};
    for (const std::uint64_t n : opt.dims) {
      auto& c = prof.linear[{n, w}];
      c.t_add = run.t_add = std::max(run.t_add, c.t_add);
      c.t_mult = run.t_mult = std::max(run.t_mult, c.t_mult);
      c.t_rot = run.t_rot = std::max(run.t_rot, c.t_rot);
    }
  }
  for (const std::uint64_t n : opt.dims) {
    LinearUnitCost run{};
    for (const int w : opt.words) {
      auto& c = prof.linear[{n, w}];
      c.t_add = run.t_add = std::max(run.t_add, c.t_add);
      c.t_mult = run.t_mult = std::max(run.t_mult, c.t_mult);
      c.t_rot = run.t_rot = std::max(run.t_rot, c.t_rot);
    }
  }
  const CalibrationProfile& nl = opt.nonlinear_from ? *opt.nonlinear_from : reference_profile();
  prof.nonlinear = nl.nonlinear;
  return prof;
}

}  // namespace sinfer
