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

#ifndef SINFER_CORE_PROFILE_HPP
#define SINFER_CORE_PROFILE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sinfer/core/model.hpp"

namespace sinfer {

/// Unit costs of the three PAHE primitives for one (n, words(q)) row.
struct LinearUnitCost {
  double t_mult = 0.0;
  double t_rot = 0.0;
  double t_add = 0.0;
  double ct_bytes = 0.0;
};

/// Per-element cost of an interactive non-linear protocol, quoted at
/// `ref_bits`-bit inputs and scaled linearly in the input bitwidth.
struct NonLinearUnitCost {
  double t_per_element = 0.0;
  double b_per_element = 0.0;
  int ref_bits = 1;
};

struct CalibrationProfile {
  enum class Source { Measured, Reference };

  std::string profile_name;
  Source source = Source::Reference;
  int limb_bits = 62;
  std::map<std::pair<std::uint64_t, int>, LinearUnitCost> linear;
  std::map<NonLinearKind, NonLinearUnitCost> nonlinear;

  const LinearUnitCost* find(std::uint64_t n, int words) const;
  const NonLinearUnitCost* find(NonLinearKind kind) const;
  int words(int bits_q) const { return (bits_q + limb_bits - 1) / limb_bits; }
};

/// Empty when all entries are positive and every op cost is non-decreasing
/// in n (fixed words) and in words (fixed n).
std::vector<std::string> check_profile(const CalibrationProfile& profile);

/// Rows are keyed "n{n}_w{words}".
std::string profile_to_json(const CalibrationProfile& profile);
CalibrationProfile profile_from_json(const std::string& text);
CalibrationProfile load_profile(const std::string& path);
void save_profile(const CalibrationProfile& profile, const std::string& path);

/// Machine-independent reference profile; see reference_profile.cpp for how
/// its constants were set.
const CalibrationProfile& reference_profile();

}  // namespace sinfer

#endif  // SINFER_CORE_PROFILE_HPP
