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

#include "sinfer/core/networks.hpp"

namespace sinfer {

namespace {

using L = LinearLayerParms;
using NL = NonLinearLayerParms;

}  // namespace

NetworkParms gazelle_baseline() {
  NetworkParms net;
  auto& v = net.layers;
  v.push_back(L::conv(32, 3, 64, 3, 3, 10, 9));
  v.push_back(NL::relu(1024, 64, 23));
  v.push_back(L::conv(32, 64, 64, 3, 3, 10, 9));
  v.push_back(NL::relu(1024, 64, 23));
  v.push_back(NL::avg_pool(1024, 64, 2, 23));
  v.push_back(L::conv(16, 64, 64, 3, 3, 10, 9));
  v.push_back(NL::relu(256, 64, 23));
  v.push_back(L::conv(16, 64, 64, 3, 3, 10, 9));
  v.push_back(NL::relu(256, 64, 23));
  v.push_back(NL::avg_pool(256, 64, 2, 23));
  v.push_back(L::conv(8, 64, 64, 3, 3, 10, 9));
  v.push_back(NL::relu(64, 64, 23));
  v.push_back(L::conv(8, 64, 64, 3, 3, 10, 9));
  v.push_back(NL::relu(64, 64, 23));
  v.push_back(L::fc(4096, 10, 6, 5));
  return net;
}

NetworkParms searched_network() {
  NetworkParms net;
  auto& v = net.layers;
  v.push_back(L::conv(32, 3, 24, 5, 3, 8, 8));
  v.push_back(NL::relu(1024, 24, 8));
  v.push_back(L::conv(32, 24, 48, 3, 5, 6, 7));
  v.push_back(NL::relu(1024, 48, 6));
  v.push_back(NL::avg_pool(1024, 48, 2, 8));
  v.push_back(L::conv(16, 48, 48, 5, 7, 7, 6));
  v.push_back(NL::relu(256, 48, 7));
  v.push_back(L::conv(16, 48, 36, 3, 3, 6, 5));
  v.push_back(NL::relu(256, 36, 6));
  v.push_back(NL::avg_pool(256, 36, 2, 8));
  v.push_back(L::conv(8, 36, 24, 7, 1, 4, 6));
  v.push_back(NL::relu(64, 24, 4));
  v.push_back(L::fc(1536, 10, 16, 16));
  return net;
}

NetworkParms one_conv_network(std::int64_t bits) {
  NetworkParms net;
  net.layers.push_back(L::conv(16, 3, 4, 3, 3, bits, bits));
  net.layers.push_back(NL::relu(256, 4, 8));
  net.layers.push_back(L::fc(1024, 32, bits, bits));
  return net;
}

}  // namespace sinfer
