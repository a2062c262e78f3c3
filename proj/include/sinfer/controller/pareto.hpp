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

#ifndef SINFER_CONTROLLER_PARETO_HPP
#define SINFER_CONTROLLER_PARETO_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace sinfer {

/// Accuracy is maximized; time and bandwidth are minimized.
struct Objectives {
  double A = 0.0;
  double T = 0.0;
  double B = 0.0;
};

/// x dominates y: no worse in every objective and strictly better in one.
bool dominates(const Objectives& x, const Objectives& y);

/// Indices of the non-dominated points, ascending. Equal points are all
/// kept, since neither dominates the other.
std::vector<std::size_t> pareto_front(std::span<const Objectives> points);

}  // namespace sinfer

#endif  // SINFER_CONTROLLER_PARETO_HPP
