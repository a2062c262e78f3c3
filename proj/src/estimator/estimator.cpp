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

#include "sinfer/estimator/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <type_traits>
#include <variant>

namespace sinfer {

bool known_dataset(const std::string& tag) {
  return tag == "mnist" || tag == "fashion-mnist" || tag == "cifar10" || tag == "surrogate";
}

std::vector<std::string> AccuracyRequest::check() const {
  std::vector<std::string> v;
  if (!net.sw_flag && !weights_id) v.emplace_back("weights_id: required when sw_flag is false");
  if (!known_dataset(dataset)) v.push_back("dataset: unknown tag \"" + dataset + "\"");
  return v;
}

double quantizer_gain(std::int64_t bits) {
  return 1.0 - std::ldexp(1.0, -static_cast<int>(bits));
}

double surrogate_accuracy(const NetworkParms& net, QuantizerBounds bounds) {
  const double ceiling = quantizer_gain(bounds.max_bits);
  double depth = 0.0;
  double filters = 0.0;
  double quant = 1.0;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const auto* lin = std::get_if<LinearLayerParms>(&net.layers[i]);
    if (lin == nullptr) {
      quant *= quantizer_gain(std::get<NonLinearLayerParms>(net.layers[i]).l_i) / ceiling;
      continue;
    }
    depth += 1.0;
    const bool hidden_fc = lin->kind == LinearKind::FC && i + 1 < net.layers.size();
    if (lin->kind == LinearKind::Conv) filters += static_cast<double>(lin->c_o);
    if (hidden_fc) filters += static_cast<double>(lin->n_o);
    quant *= quantizer_gain(lin->l_i) / ceiling;
    quant *= quantizer_gain(lin->l_f) / ceiling;
  }
  const double base = 0.99 * (1.0 - std::exp(-filters / 64.0)) * (1.0 - std::exp(-depth / 2.0));
  return std::clamp(base * quant, 0.0, 1.0);
}

std::string architecture_fingerprint(const NetworkParms& net) {
  NetworkParms shape = net;
  shape.episode_id = 0;
  shape.sw_flag = true;
  for (auto& layer : shape.layers) {
    std::visit(
        [](auto& l) {
          l.l_i = 0;
          if constexpr (std::is_same_v<std::decay_t<decltype(l)>, LinearLayerParms>) {
            l.l_f = 0;
          } else {
            l.l_o = 0;
          }
        },
        layer);
  }
  // FNV-1a over the canonical serialization.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : serialize_network(shape)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

AccuracyResponse SurrogateEstimator::estimate(const AccuracyRequest& request) {
  const auto problems = request.check();
  if (!problems.empty()) throw ProtocolError(problems.front());
  const std::string fp = architecture_fingerprint(request.net);
  if (!request.net.sw_flag && *request.weights_id != fp) {
    throw ProtocolError("weights_id " + *request.weights_id +
                        " was trained for a different architecture");
  }
  return {surrogate_accuracy(request.net, bounds_), fp, request.net.sw_flag};
}

}  // namespace sinfer
