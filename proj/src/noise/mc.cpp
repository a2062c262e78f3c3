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

#include "sinfer/noise/failure.hpp"
#include "sinfer/pce/packing.hpp"

namespace sinfer {

FailureResult mc_failure_rate(const LinearLayerParms& layer, const CryptoParams& params,
                              std::int64_t trials, std::uint64_t seed, const NoiseModel& model,
                              int jobs, NormCache* cache) {
  NoiseModel m = model;
  m.sigma = params.sigma;
  const auto plan = output_plan(layer, params.n);
  const auto q_mod_p = static_cast<std::uint64_t>(params.q % params.p);
  const BigInt delta = params.delta();
  if (cache != nullptr) return cache->get(plan, params.p, q_mod_p, m, trials, seed, jobs)->evaluate(delta);
  return simulate_failures(plan, params.p, q_mod_p, m, trials, seed, jobs).evaluate(delta);
}

}  // namespace sinfer
