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

#ifndef SINFER_NOISE_PLAN_HPP
#define SINFER_NOISE_PLAN_HPP

// Straight-line homomorphic programs over ciphertext registers. A plan is
// the error DAG of one linear-layer evaluation; the failure simulator and
// the reference executor both run it, consuming randomness in op order.

#include <cstdint>
#include <string>
#include <vector>

#include "sinfer/core/model.hpp"

namespace sinfer {

enum class PlanOpKind { Input, Mult, Rot, Add };

struct PlanOp {
  PlanOpKind kind = PlanOpKind::Input;
  std::uint32_t dst = 0;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  /// Plaintext operand index for Mult.
  std::uint32_t weight = 0;
  /// Slot shift for Rot.
  std::int64_t shift = 0;
  /// Re-randomization of the output share (fresh input plus its addition).
  bool blinding = false;
};

struct LinearPlan {
  std::size_t n = 0;
  std::uint32_t n_registers = 0;
  std::uint32_t n_weights = 0;
  std::uint32_t output = 0;
  std::vector<PlanOp> ops;

  /// Counts of the non-blinding ops; n_ct_out is 1 per plan.
  OpCounts counts() const;
  std::string fingerprint() const;
};

/// Appends ops and recycles registers. Registers passed to `release` must
/// not be read afterwards.
class PlanBuilder {
 public:
  explicit PlanBuilder(std::size_t n);

  std::uint32_t input(bool blinding = false);
  std::uint32_t mult(std::uint32_t a);
  /// In-place variant: dst = a * w, reusing a's register.
  std::uint32_t mult_into(std::uint32_t a);
  std::uint32_t rot(std::uint32_t a, std::int64_t shift);
  /// a <- a + b; returns a.
  std::uint32_t add_into(std::uint32_t a, std::uint32_t b, bool blinding = false);
  void release(std::uint32_t r);

  LinearPlan finish(std::uint32_t output) &&;

 private:
  std::uint32_t alloc();

  LinearPlan plan_;
  std::vector<std::uint32_t> free_;
};

}  // namespace sinfer

#endif  // SINFER_NOISE_PLAN_HPP
