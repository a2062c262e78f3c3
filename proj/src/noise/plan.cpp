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

#include "sinfer/noise/plan.hpp"

#include <sstream>

namespace sinfer {

OpCounts LinearPlan::counts() const {
  OpCounts c;
  for (const auto& op : ops) {
    switch (op.kind) {
      case PlanOpKind::Input: (op.blinding ? c.n_fresh_enc : c.n_ct_in) += 1; break;
      case PlanOpKind::Mult: c.n_mult += 1; break;
      case PlanOpKind::Rot: c.n_rot += 1; break;
      case PlanOpKind::Add:
        if (!op.blinding) c.n_add += 1;
        break;
    }
  }
  c.n_ct_out = 1;
  return c;
}

std::string LinearPlan::fingerprint() const {
  std::ostringstream os;
  os << n << ':' << n_registers << ':' << n_weights << ':' << output;
  for (const auto& op : ops) {
    os << ';' << static_cast<int>(op.kind) << ',' << op.dst << ',' << op.a << ',' << op.b << ','
       << op.weight << ',' << op.shift << ',' << op.blinding;
  }
  return os.str();
}

PlanBuilder::PlanBuilder(std::size_t n) { plan_.n = n; }

std::uint32_t PlanBuilder::alloc() {
  if (!free_.empty()) {
    const auto r = free_.back();
    free_.pop_back();
    return r;
  }
  return plan_.n_registers++;
}

std::uint32_t PlanBuilder::input(bool blinding) {
  PlanOp op;
  op.kind = PlanOpKind::Input;
  op.dst = alloc();
  op.blinding = blinding;
  plan_.ops.push_back(op);
  return op.dst;
}

std::uint32_t PlanBuilder::mult(std::uint32_t a) {
  PlanOp op;
  op.kind = PlanOpKind::Mult;
  op.dst = alloc();
  op.a = a;
  op.weight = plan_.n_weights++;
  plan_.ops.push_back(op);
  return op.dst;
}

std::uint32_t PlanBuilder::mult_into(std::uint32_t a) {
  PlanOp op;
  op.kind = PlanOpKind::Mult;
  op.dst = a;
  op.a = a;
  op.weight = plan_.n_weights++;
  plan_.ops.push_back(op);
  return a;
}

std::uint32_t PlanBuilder::rot(std::uint32_t a, std::int64_t shift) {
  PlanOp op;
  op.kind = PlanOpKind::Rot;
  op.dst = alloc();
  op.a = a;
  op.shift = shift;
  plan_.ops.push_back(op);
  return op.dst;
}

std::uint32_t PlanBuilder::add_into(std::uint32_t a, std::uint32_t b, bool blinding) {
  PlanOp op;
  op.kind = PlanOpKind::Add;
  op.dst = a;
  op.a = a;
  op.b = b;
  op.blinding = blinding;
  plan_.ops.push_back(op);
  return a;
}

void PlanBuilder::release(std::uint32_t r) { free_.push_back(r); }

LinearPlan PlanBuilder::finish(std::uint32_t output) && {
  plan_.output = output;
  return std::move(plan_);
}

}  // namespace sinfer
