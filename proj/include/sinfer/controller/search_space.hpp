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

#ifndef SINFER_CONTROLLER_SEARCH_SPACE_HPP
#define SINFER_CONTROLLER_SEARCH_SPACE_HPP

// The controller's action space: a fixed template of slots, each exposing a
// few categorical decisions, and the decoder that turns one choice per
// decision into a concrete network.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "sinfer/core/model.hpp"

namespace sinfer {

/// CR = convolution followed by ReLU, PL = 2x2 average pooling,
/// FC = fully connected (the last FC emits the class scores).
enum class SlotKind { CR, PL, FC };
std::string_view to_string(SlotKind k);

struct SlotChoices {
  std::vector<std::int64_t> filters;  // conv output channels, or hidden FC width
  std::vector<std::pair<std::int64_t, std::int64_t>> kernels;  // (f_h, f_w)
  std::vector<std::int64_t> input_bits;                        // l_i
  std::vector<std::int64_t> weight_bits;                       // l_f
};

enum class DecisionKind { Filters, Kernel, InputBits, WeightBits };
std::string_view to_string(DecisionKind k);

struct Decision {
  std::size_t slot = 0;
  DecisionKind kind = DecisionKind::Filters;
  std::size_t choices = 1;

  /// Filters and kernels fix the trained architecture; bit widths only
  /// change how stored weights are re-quantized.
  bool architectural() const {
    return kind == DecisionKind::Filters || kind == DecisionKind::Kernel;
  }
};

struct SearchSpace {
  std::vector<SlotKind> slots;
  /// One entry per slot, same order as `slots`.
  std::vector<SlotChoices> choices;
  std::int64_t input_side = 32;
  std::int64_t input_channels = 3;
  std::int64_t classes = 10;
  QuantizerBounds bounds;

  /// Decisions in sampling order: slot by slot, then Filters, Kernel,
  /// InputBits, WeightBits within a slot. PL slots contribute none, and the
  /// final FC exposes no Filters decision.
  std::vector<Decision> decisions() const;
  /// Empty when every decision has at least one choice and all values are
  /// in range.
  std::vector<std::string> check() const;
};

/// Decoding failed because the template does not fit the feature map.
struct Rejection {
  /// Offending slot; slots.size() when the assembled network fails validation.
  std::size_t slot = 0;
  std::string reason;
};

using DecodeResult = std::variant<NetworkParms, Rejection>;

/// sw_flag = (episode mod sw_period == 0). Conv layers keep the map size
/// ("same" padding); each PL halves the side. ReLU and pool layers run at the
/// quantizer of the conv feeding them. A decoded network always passes
/// validate_network, otherwise a Rejection is returned.
DecodeResult decode(std::span<const int> actions, const SearchSpace& space,
                    std::int64_t episode = 0, std::int64_t sw_period = 1);

bool sw_flag_for(std::int64_t episode, std::int64_t sw_period);

}  // namespace sinfer

#endif  // SINFER_CONTROLLER_SEARCH_SPACE_HPP
