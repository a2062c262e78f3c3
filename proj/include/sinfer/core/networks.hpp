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

#ifndef SINFER_CORE_NETWORKS_HPP
#define SINFER_CORE_NETWORKS_HPP

// Reference networks on 32x32x3 inputs.

#include <cstdint>

#include "sinfer/core/model.hpp"

namespace sinfer {

/// Six 64-channel 3x3 conv+ReLU stages with two 2x2 average pools and a
/// 4096 -> 10 classifier. Conv quantizers (10, 9) and FC quantizers (6, 5)
/// give 23-bit plaintexts; ReLUs run at 23 bits.
NetworkParms gazelle_baseline();

/// Five conv+ReLU stages, two pools and a 1536 -> 10 classifier.
NetworkParms searched_network();

/// Conv(3 -> 4, 3x3) on 16x16, ReLU at 8 bits, FC 1024 -> 32. Linear
/// quantizers are l_i = l_f = bits.
NetworkParms one_conv_network(std::int64_t bits);

}  // namespace sinfer

#endif  // SINFER_CORE_NETWORKS_HPP
