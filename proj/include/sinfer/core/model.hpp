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

#ifndef SINFER_CORE_MODEL_HPP
#define SINFER_CORE_MODEL_HPP

// Shared data model: layers, networks, crypto parameters, cost reports.
// Everything here is a plain value type; nothing is mutated after
// construction by the modules that consume it.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sinfer/numeric/bigint.hpp"

namespace sinfer {

enum class LinearKind { Conv, FC };
enum class NonLinearKind { ReLU, Square, AvgPool };

std::string_view to_string(LinearKind k);
std::string_view to_string(NonLinearKind k);

/// Convolution padding. `Same` keeps ceil(H / stride) outputs per axis,
/// `Valid` uses no padding, `Explicit` pads `amount` on every border.
struct Padding {
  enum class Mode { Same, Valid, Explicit };
  Mode mode = Mode::Same;
  std::int64_t amount = 0;

  static Padding same() { return {}; }
  static Padding valid() { return {Mode::Valid, 0}; }
  static Padding explicit_pad(std::int64_t a) { return {Mode::Explicit, a}; }

  friend bool operator==(const Padding&, const Padding&) = default;
};

/// Parameters of one linear (PAHE-evaluated) layer. Spatial sizes are
/// flattened; convolution feature maps are square, so H = W = sqrt(n_i).
struct LinearLayerParms {
  LinearKind kind = LinearKind::Conv;
  std::int64_t n_i = 1;
  std::int64_t n_o = 1;
  std::int64_t f_w = 1;
  std::int64_t f_h = 1;
  std::int64_t l_i = 8;
  std::int64_t l_f = 8;
  std::int64_t c_i = 1;
  std::int64_t c_o = 1;
  std::int64_t stride = 1;
  Padding pad;

  /// Side of the square input map; 0 when n_i is not a perfect square.
  std::int64_t side() const;
  /// Output map size implied by the conv geometry, nullopt when undefined.
  std::optional<std::int64_t> conv_output_size() const;

  static LinearLayerParms fc(std::int64_t n_in, std::int64_t n_out, std::int64_t l_i,
                             std::int64_t l_f);
  /// Conv with "same" padding and stride 1 on a side x side map.
  static LinearLayerParms conv(std::int64_t side, std::int64_t c_in, std::int64_t c_out,
                               std::int64_t f_h, std::int64_t f_w, std::int64_t l_i,
                               std::int64_t l_f);

  friend bool operator==(const LinearLayerParms&, const LinearLayerParms&) = default;
};

struct NonLinearLayerParms {
  NonLinearKind kind = NonLinearKind::ReLU;
  std::int64_t n_i = 1;
  std::int64_t n_o = 1;
  std::int64_t l_i = 8;
  std::int64_t l_o = 8;
  std::int64_t c_i = 1;
  /// Pooling window side; 1 for element-wise kinds.
  std::int64_t window = 1;

  static NonLinearLayerParms relu(std::int64_t n, std::int64_t c, std::int64_t bits);
  static NonLinearLayerParms avg_pool(std::int64_t n_in, std::int64_t c, std::int64_t window,
                                      std::int64_t bits);

  friend bool operator==(const NonLinearLayerParms&, const NonLinearLayerParms&) = default;
};

using LayerParms = std::variant<LinearLayerParms, NonLinearLayerParms>;

struct NetworkParms {
  std::vector<LayerParms> layers;
  std::int64_t episode_id = 0;
  bool sw_flag = true;

  friend bool operator==(const NetworkParms&, const NetworkParms&) = default;
};

struct QuantizerBounds {
  std::int64_t min_bits = 2;
  std::int64_t max_bits = 16;
};

struct Violation {
  std::size_t layer = 0;
  std::string message;
};

/// Checks every layer invariant and adjacent-layer compatibility. Pure.
std::vector<Violation> validate_network(const NetworkParms& net, QuantizerBounds bounds = {});

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t line, std::string field);
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

/// Canonical structured-text form; fixed key order.
std::string serialize_network(const NetworkParms& net);
NetworkParms parse_network(std::string_view text);

/// One instantiated RLWE parameter set.
struct CryptoParams {
  std::uint64_t n = 0;
  std::uint64_t p = 0;
  BigInt q = 0;
  double sigma = 3.2;
  int security_bits = 0;

  int bits_p() const { return bit_length(p); }
  int bits_q() const { return bit_length(q); }
  /// floor(q / p)
  BigInt delta() const { return q / p; }

  friend bool operator==(const CryptoParams&, const CryptoParams&) = default;
};

/// Structural invariants: power-of-two n in the supported set, p and q
/// prime and both = 1 mod congruence_base. Security is checked by the pie.
std::vector<std::string> check_crypto_params(const CryptoParams& params,
                                             std::uint64_t congruence_base);

struct OpCounts {
  std::int64_t n_mult = 0;
  std::int64_t n_rot = 0;
  std::int64_t n_add = 0;
  std::int64_t n_ct_in = 0;
  std::int64_t n_ct_out = 0;
  std::int64_t n_fresh_enc = 0;

  OpCounts& operator+=(const OpCounts& o);
  OpCounts scaled(std::int64_t k) const;
  friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

struct LayerCost {
  std::size_t index = 0;
  std::string kind;
  OpCounts ops;
  std::int64_t n_elements = 0;
  double t_layer = 0.0;
  double b_layer = 0.0;
  std::optional<CryptoParams> crypto;
  bool linear = false;
};

struct CostReport {
  double T = 0.0;
  double B = 0.0;
  double xi = 0.0;
  std::vector<LayerCost> per_layer;

  double linear_time() const;
  double nonlinear_time() const;
};

std::string cost_report_text(const CostReport& r);
/// index,kind,n,bits_p,bits_q,n_mult,n_rot,n_add,t_layer_s,b_layer_bytes
std::string cost_report_csv(const CostReport& r);

}  // namespace sinfer

#endif  // SINFER_CORE_MODEL_HPP
