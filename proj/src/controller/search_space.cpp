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

#include "sinfer/controller/search_space.hpp"

#include <algorithm>
#include <stdexcept>

namespace sinfer {

std::string_view to_string(SlotKind k) {
  switch (k) {
    case SlotKind::CR: return "CR";
    case SlotKind::PL: return "PL";
    case SlotKind::FC: return "FC";
  }
  return "?";
}

std::string_view to_string(DecisionKind k) {
  switch (k) {
    case DecisionKind::Filters: return "filters";
    case DecisionKind::Kernel: return "kernel";
    case DecisionKind::InputBits: return "l_i";
    case DecisionKind::WeightBits: return "l_f";
  }
  return "?";
}

namespace {

bool is_final_fc(const SearchSpace& s, std::size_t i) {
  return s.slots[i] == SlotKind::FC && i + 1 == s.slots.size();
}

}  // namespace

std::vector<Decision> SearchSpace::decisions() const {
  std::vector<Decision> out;
  const std::size_t count = std::min(slots.size(), choices.size());
  for (std::size_t i = 0; i < count; ++i) {
    const SlotChoices& c = choices[i];
    switch (slots[i]) {
      case SlotKind::CR:
        out.push_back({i, DecisionKind::Filters, c.filters.size()});
        out.push_back({i, DecisionKind::Kernel, c.kernels.size()});
        out.push_back({i, DecisionKind::InputBits, c.input_bits.size()});
        out.push_back({i, DecisionKind::WeightBits, c.weight_bits.size()});
        break;
      case SlotKind::FC:
        if (!is_final_fc(*this, i)) out.push_back({i, DecisionKind::Filters, c.filters.size()});
        out.push_back({i, DecisionKind::InputBits, c.input_bits.size()});
        out.push_back({i, DecisionKind::WeightBits, c.weight_bits.size()});
        break;
      case SlotKind::PL: break;
    }
  }
  return out;
}

std::vector<std::string> SearchSpace::check() const {
  std::vector<std::string> v;
  if (slots.empty()) v.emplace_back("template: must contain at least one slot");
  if (choices.size() != slots.size()) {
    v.push_back("choices: expected " + std::to_string(slots.size()) + " entries, got " +
                std::to_string(choices.size()));
    return v;
  }
  if (input_side < 1) v.emplace_back("input.side: must be >= 1");
  if (input_channels < 1) v.emplace_back("input.channels: must be >= 1");
  if (classes < 1) v.emplace_back("classes: must be >= 1");
  if (!slots.empty() && slots.back() != SlotKind::FC) {
    v.emplace_back("template: last slot must be FC");
  }
  for (const Decision& d : decisions()) {
    if (d.choices == 0) {
      v.push_back("choices[" + std::to_string(d.slot) + "]." + std::string(to_string(d.kind)) +
                  ": needs at least one choice");
    }
  }
  for (std::size_t i = 0; i < choices.size(); ++i) {
    const std::string at = "choices[" + std::to_string(i) + "].";
    for (const auto f : choices[i].filters) {
      if (f < 1) v.push_back(at + "filters: values must be >= 1");
    }
    for (const auto& [fh, fw] : choices[i].kernels) {
      if (fh < 1 || fw < 1) v.push_back(at + "kernels: sides must be >= 1");
    }
    auto bits = [&](const std::vector<std::int64_t>& list, const char* name) {
      for (const auto b : list) {
        if (b < bounds.min_bits || b > bounds.max_bits) {
          v.push_back(at + name + ": " + std::to_string(b) + " outside [" +
                      std::to_string(bounds.min_bits) + ", " + std::to_string(bounds.max_bits) +
                      "]");
        }
      }
    };
    bits(choices[i].input_bits, "l_i");
    bits(choices[i].weight_bits, "l_f");
  }
  return v;
}

bool sw_flag_for(std::int64_t episode, std::int64_t sw_period) {
  return sw_period <= 1 || episode % sw_period == 0;
}

DecodeResult decode(std::span<const int> actions, const SearchSpace& space, std::int64_t episode,
                    std::int64_t sw_period) {
  const auto decisions = space.decisions();
  if (actions.size() != decisions.size()) {
    throw std::invalid_argument("decode: expected " + std::to_string(decisions.size()) +
                                " actions, got " + std::to_string(actions.size()));
  }
  for (std::size_t k = 0; k < actions.size(); ++k) {
    if (actions[k] < 0 || static_cast<std::size_t>(actions[k]) >= decisions[k].choices) {
      throw std::out_of_range("decode: action " + std::to_string(k) + " out of range");
    }
  }

  NetworkParms net;
  net.episode_id = episode;
  net.sw_flag = sw_flag_for(episode, sw_period);
  std::int64_t side = space.input_side;
  std::int64_t channels = space.input_channels;
  std::int64_t bits = 8;
  std::size_t next = 0;
  auto pick = [&](const auto& list) { return list[static_cast<std::size_t>(actions[next++])]; };

  for (std::size_t i = 0; i < space.slots.size(); ++i) {
    const SlotChoices& c = space.choices[i];
    switch (space.slots[i]) {
      case SlotKind::CR: {
        const std::int64_t filters = pick(c.filters);
        const auto [fh, fw] = pick(c.kernels);
        const std::int64_t li = pick(c.input_bits);
        const std::int64_t lf = pick(c.weight_bits);
        if (side < fh || side < fw) {
          return Rejection{i, "feature map " + std::to_string(side) + "x" + std::to_string(side) +
                                  " smaller than filter " + std::to_string(fh) + "x" +
                                  std::to_string(fw)};
        }
        net.layers.emplace_back(LinearLayerParms::conv(side, channels, filters, fh, fw, li, lf));
        net.layers.emplace_back(NonLinearLayerParms::relu(side * side, filters, li));
        channels = filters;
        bits = li;
        break;
      }
      case SlotKind::PL: {
        if (side < 2 || side % 2 != 0) {
          return Rejection{i, "feature map side " + std::to_string(side) +
                                  " cannot be halved by 2x2 pooling"};
        }
        net.layers.emplace_back(NonLinearLayerParms::avg_pool(side * side, channels, 2, bits));
        side /= 2;
        break;
      }
      case SlotKind::FC: {
        const bool final = is_final_fc(space, i);
        const std::int64_t width = final ? space.classes : pick(c.filters);
        const std::int64_t li = pick(c.input_bits);
        const std::int64_t lf = pick(c.weight_bits);
        net.layers.emplace_back(LinearLayerParms::fc(side * side * channels, width, li, lf));
        if (!final) net.layers.emplace_back(NonLinearLayerParms::relu(width, 1, li));
        side = 1;
        channels = width;
        bits = li;
        break;
      }
    }
  }

  const auto violations = validate_network(net, space.bounds);
  if (!violations.empty()) {
    const Violation& v = violations.front();
    return Rejection{space.slots.size(), "layer " + std::to_string(v.layer) + ": " + v.message};
  }
  return net;
}

}  // namespace sinfer
