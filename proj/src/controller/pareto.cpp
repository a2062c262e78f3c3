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

#include "sinfer/controller/pareto.hpp"

#include <algorithm>
#include <numeric>

namespace sinfer {

bool dominates(const Objectives& x, const Objectives& y) {
  const bool no_worse = x.A >= y.A && x.T <= y.T && x.B <= y.B;
  const bool better = x.A > y.A || x.T < y.T || x.B < y.B;
  return no_worse && better;
}

std::vector<std::size_t> pareto_front(std::span<const Objectives> points) {
  // In (-A, T, B) lexicographic order every dominator precedes the point it
  // dominates, and a dominated front candidate is itself dominated by an
  // earlier front member, so checking against the front so far is enough.
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const Objectives& a = points[i];
    const Objectives& b = points[j];
    if (a.A != b.A) return a.A > b.A;
    if (a.T != b.T) return a.T < b.T;
    return a.B < b.B;
  });
  std::vector<std::size_t> front;
  for (const std::size_t i : order) {
    const bool beaten = std::any_of(front.begin(), front.end(),
                                    [&](std::size_t f) { return dominates(points[f], points[i]); });
    if (!beaten) front.push_back(i);
  }
  std::sort(front.begin(), front.end());
  return front;
}

}  // namespace sinfer
