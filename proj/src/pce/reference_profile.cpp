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

#include <cmath>

#include "sinfer/core/profile.hpp"

namespace sinfer {

namespace {

// Per-coefficient-limb costs before scaling: add and plaintext multiply are
// linear in n * words; a rotation is dominated by key switching, which grows
// with n log n and quadratically in words (one decomposition digit per limb).
constexpr double kAddPerCoeff = 2.0e-9;
constexpr double kMultPerCoeff = 2.5e-8;
constexpr double kRotPerCoeffLog = 1.6e-8;
// Scales the three shapes so the 23-bit baseline's linear layers total
// 3.22 s with the search-grade pie settings (300 trials, delta 1e-2).
constexpr double kTimeScale = 2.2723;

// 55.1 us per 23-bit ReLU garbled circuit.
constexpr double kReluTime = 55.1e-6;
// Baseline bandwidth minus its linear-layer ciphertexts, over its 172032 ReLUs.
constexpr double kReluBytes = 10463.5;
// Beaver-triple squaring: two openings of a 23-bit share plus bookkeeping.
constexpr double kSquareTime = 2.0e-6;
constexpr double kSquareBytes = 64.0;

CalibrationProfile build() {
  CalibrationProfile prof;
  prof.profile_name = "reference";
  prof.source = CalibrationProfile::Source::Reference;
  prof.limb_bits = 62;
  for (std::uint64_t n = 1024; n <= 16384; n *= 2) {
    const double nd = static_cast<double>(n);
    const double logn = std::log2(nd);
    for (int w = 1; w <= 8; ++w) {
      LinearUnitCost c;
      c.t_add = kTimeScale * kAddPerCoeff * nd * w;
      c.t_mult = kTimeScale * kMultPerCoeff * nd * w;
      c.t_rot = kTimeScale * kRotPerCoeffLog * nd * logn * w * (w + 1) / 2.0;
      c.ct_bytes = 2.0 * nd * w * 8.0;
      prof.linear[{n, w}] = c;
    }
  }
  prof.nonlinear[NonLinearKind::ReLU] = {kReluTime, kReluBytes, 23};
  prof.nonlinear[NonLinearKind::Square] = {kSquareTime, kSquareBytes, 23};
  prof.nonlinear[NonLinearKind::AvgPool] = {0.0, 0.0, 23};
  return prof;
}

}  // namespace

const CalibrationProfile& reference_profile() {
  static const CalibrationProfile prof = build();
  return prof;
}

}  // namespace sinfer
