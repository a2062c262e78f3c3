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

#include "sinfer/core/model.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "sinfer/numeric/primes.hpp"

namespace sinfer {

using ojson = nlohmann::ordered_json;

std::string_view to_string(LinearKind k) { return k == LinearKind::Conv ? "Conv" : "FC"; }

std::string_view to_string(NonLinearKind k) {
  switch (k) {
    case NonLinearKind::ReLU: return "ReLU";
    case NonLinearKind::Square: return "Square";
    case NonLinearKind::AvgPool: return "AvgPool";
  }
  return "?";
}

std::int64_t LinearLayerParms::side() const {
  const auto s = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(n_i))));
  return s * s == n_i ? s : 0;
}

std::optional<std::int64_t> LinearLayerParms::conv_output_size() const {
  const std::int64_t h = side();
  if (h == 0 || stride < 1) return std::nullopt;
  auto axis = [&](std::int64_t f) -> std::optional<std::int64_t> {
    switch (pad.mode) {
      case Padding::Mode::Same: return (h + stride - 1) / stride;
      case Padding::Mode::Valid:
        if (h < f) return std::nullopt;
        return (h - f) / stride + 1;
      case Padding::Mode::Explicit:
        if (h + 2 * pad.amount < f) return std::nullopt;
        return (h + 2 * pad.amount - f) / stride + 1;
    }
    return std::nullopt;
  };
  const auto oh = axis(f_h);
  const auto ow = axis(f_w);
  if (!oh || !ow) return std::nullopt;
  return *oh * *ow;
}

LinearLayerParms LinearLayerParms::fc(std::int64_t n_in, std::int64_t n_out, std::int64_t li,
                                      std::int64_t lf) {
  LinearLayerParms l;
  l.kind = LinearKind::FC;
  l.n_i = n_in;
  l.n_o = n_out;
  l.f_w = n_in;
  l.f_h = 1;
  l.l_i = li;
  l.l_f = lf;
  l.c_i = 1;
  l.c_o = 1;
  l.pad = Padding::valid();
  return l;
}

LinearLayerParms LinearLayerParms::conv(std::int64_t side, std::int64_t c_in, std::int64_t c_out,
                                        std::int64_t fh, std::int64_t fw, std::int64_t li,
                                        std::int64_t lf) {
  LinearLayerParms l;
  l.kind = LinearKind::Conv;
  l.n_i = side * side;
  l.n_o = side * side;
  l.f_h = fh;
  l.f_w = fw;
  l.l_i = li;
  l.l_f = lf;
  l.c_i = c_in;
  l.c_o = c_out;
  return l;
}

NonLinearLayerParms NonLinearLayerParms::relu(std::int64_t n, std::int64_t c, std::int64_t bits) {
  return {NonLinearKind::ReLU, n, n, bits, bits, c, 1};
}

NonLinearLayerParms NonLinearLayerParms::avg_pool(std::int64_t n_in, std::int64_t c,
                                                  std::int64_t window, std::int64_t bits) {
  return {NonLinearKind::AvgPool, n_in, n_in / (window * window), bits, bits, c, window};
}

// ---------------------------------------------------------------------------
// validation

namespace {

std::int64_t out_channels(const LayerParms& l) {
  if (const auto* lin = std::get_if<LinearLayerParms>(&l)) return lin->c_o;
  return std::get<NonLinearLayerParms>(l).c_i;
}

std::int64_t out_size(const LayerParms& l) {
  if (const auto* lin = std::get_if<LinearLayerParms>(&l)) return lin->n_o;
  return std::get<NonLinearLayerParms>(l).n_o;
}

void check_linear(const LinearLayerParms& l, std::size_t idx, QuantizerBounds qb,
                  std::vector<Violation>& out) {
  auto bad = [&](std::string msg) { out.push_back({idx, std::move(msg)}); };
  for (auto [name, v] : {std::pair{"n_i", l.n_i}, {"n_o", l.n_o}, {"f_w", l.f_w}, {"f_h", l.f_h},
                         {"c_i", l.c_i}, {"c_o", l.c_o}, {"stride", l.stride}}) {
    if (v < 1) bad(std::string(name) + " must be >= 1");
  }
  for (auto [name, v] : {std::pair{"l_i", l.l_i}, {"l_f", l.l_f}}) {
    if (v < qb.min_bits || v > qb.max_bits) {
      bad(std::string(name) + " outside [" + std::to_string(qb.min_bits) + ", " +
          std::to_string(qb.max_bits) + "]");
    }
  }
  if (l.kind == LinearKind::FC) {
    if (l.c_i != 1) bad("FC requires c_i=1");
    if (l.c_o != 1) bad("FC requires c_o=1");
    if (l.f_w != l.n_i) bad("FC requires f_w=n_i");
    if (l.f_h != 1) bad("FC requires f_h=1");
    return;
  }
  if (l.pad.mode == Padding::Mode::Explicit && l.pad.amount < 0) bad("pad must be >= 0");
  if (l.side() == 0) {
    bad("Conv n_i must be a square feature map");
    return;
  }
  const auto expect = l.conv_output_size();
  if (!expect) {
    bad("Conv filter larger than padded feature map");
  } else if (*expect != l.n_o) {
    bad("Conv n_o=" + std::to_string(l.n_o) + " but geometry gives " + std::to_string(*expect));
  }
}

void check_nonlinear(const NonLinearLayerParms& l, std::size_t idx, QuantizerBounds qb,
                     std::vector<Violation>& out) {
  auto bad = [&](std::string msg) { out.push_back({idx, std::move(msg)}); };
  for (auto [name, v] : {std::pair{"n_i", l.n_i}, {"n_o", l.n_o}, {"c_i", l.c_i},
                         {"window", l.window}}) {
    if (v < 1) bad(std::string(name) + " must be >= 1");
  }
  for (auto [name, v] : {std::pair{"l_i", l.l_i}, {"l_o", l.l_o}}) {
    if (v < qb.min_bits || v > qb.max_bits) {
      bad(std::string(name) + " outside [" + std::to_string(qb.min_bits) + ", " +
          std::to_string(qb.max_bits) + "]");
    }
  }
  if (l.kind == NonLinearKind::AvgPool) {
    const std::int64_t area = l.window * l.window;
    if (area < 1 || l.n_i % area != 0) {
      bad("AvgPool window area must divide n_i exactly");
    } else if (l.n_o != l.n_i / area) {
      bad("AvgPool requires n_o = n_i / window_area");
    }
  } else if (l.n_o != l.n_i) {
    bad(std::string(to_string(l.kind)) + " requires n_o = n_i");
  }
}

}  // namespace

std::vector<Violation> validate_network(const NetworkParms& net, QuantizerBounds bounds) {
  std::vector<Violation> out;
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    std::visit(
        [&](const auto& l) {
          using T = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<T, LinearLayerParms>) {
            check_linear(l, k, bounds, out);
          } else {
            check_nonlinear(l, k, bounds, out);
          }
        },
        net.layers[k]);
    if (k == 0) continue;
    const auto& prev = net.layers[k - 1];
    const auto& cur = net.layers[k];
    const std::int64_t prev_total = out_size(prev) * out_channels(prev);
    const auto* lin = std::get_if<LinearLayerParms>(&cur);
    if (lin && lin->kind == LinearKind::FC) {
      if (lin->n_i != prev_total) {
        out.push_back({k, "dimension mismatch: previous layer emits " + std::to_string(prev_total) +
                              " values, FC expects n_i=" + std::to_string(lin->n_i)});
      }
      continue;
    }
    const std::int64_t cur_n = lin ? lin->n_i : std::get<NonLinearLayerParms>(cur).n_i;
    const std::int64_t cur_c = lin ? lin->c_i : std::get<NonLinearLayerParms>(cur).c_i;
    if (cur_n != out_size(prev) || cur_c != out_channels(prev)) {
      out.push_back({k, "dimension mismatch: previous layer emits " +
                            std::to_string(out_channels(prev)) + "x" +
                            std::to_string(out_size(prev)) + ", layer expects " +
                            std::to_string(cur_c) + "x" + std::to_string(cur_n)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// serialization

ParseError::ParseError(std::string message, std::size_t line, std::string field)
    : std::runtime_error(std::move(message)), line_(line), field_(std::move(field)) {}

namespace {

ojson pad_to_json(const Padding& p) {
  switch (p.mode) {
    case Padding::Mode::Same: return "same";
    case Padding::Mode::Valid: return "valid";
    case Padding::Mode::Explicit: return p.amount;
  }
  return "same";
}

ojson layer_to_json(const LayerParms& layer) {
  ojson j;
  if (const auto* l = std::get_if<LinearLayerParms>(&layer)) {
    j["kind"] = to_string(l->kind);
    j["n_i"] = l->n_i;
    j["n_o"] = l->n_o;
    j["f_w"] = l->f_w;
    j["f_h"] = l->f_h;
    j["l_i"] = l->l_i;
    j["l_f"] = l->l_f;
    j["c_i"] = l->c_i;
    j["c_o"] = l->c_o;
    j["stride"] = l->stride;
    j["pad"] = pad_to_json(l->pad);
  } else {
    const auto& n = std::get<NonLinearLayerParms>(layer);
    j["kind"] = to_string(n.kind);
    j["n_i"] = n.n_i;
    j["n_o"] = n.n_o;
    j["l_i"] = n.l_i;
    j["l_o"] = n.l_o;
    j["c_i"] = n.c_i;
    j["window"] = n.window;
  }
  return j;
}

// Line number of the first occurrence of `needle` after the n-th "kind" key;
// best-effort location for field-level errors.
std::size_t locate_layer_line(std::string_view text, std::size_t layer_idx) {
  std::size_t pos = text.find("\"layers\"");
  if (pos == std::string_view::npos) return 1;
  for (std::size_t k = 0; k <= layer_idx; ++k) {
    pos = text.find('{', pos + 1);
    if (pos == std::string_view::npos) return 1;
  }
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

struct LayerReader {
  const ojson& obj;
  std::string path;
  std::size_t line;

  std::int64_t integer(const char* key) const {
    const auto it = obj.find(key);
    if (it == obj.end()) {
      throw ParseError("missing field \"" + std::string(key) + "\" at " + path + " (line " +
                           std::to_string(line) + ")",
                       line, key);
    }
    if (!it->is_number_integer()) {
      throw ParseError("field \"" + std::string(key) + "\" at " + path + " must be an integer",
                       line, key);
    }
    return it->get<std::int64_t>();
  }

  void exact_keys(std::initializer_list<const char*> keys) const {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool known = false;
      for (const char* k : keys) known = known || it.key() == k;
      if (!known) {
        throw ParseError("unknown field \"" + it.key() + "\" at " + path, line, it.key());
      }
    }
  }
};

Padding parse_pad(const LayerReader& r) {
  const auto it = r.obj.find("pad");
  if (it == r.obj.end()) {
    throw ParseError("missing field \"pad\" at " + r.path + " (line " + std::to_string(r.line) + ")",
                     r.line, "pad");
  }
  if (it->is_string()) {
    const auto s = it->get<std::string>();
    if (s == "same") return Padding::same();
    if (s == "valid") return Padding::valid();
  } else if (it->is_number_integer()) {
    return Padding::explicit_pad(it->get<std::int64_t>());
  }
  throw ParseError("field \"pad\" at " + r.path + " must be \"same\", \"valid\" or an integer",
                   r.line, "pad");
}

LayerParms layer_from_json(const ojson& j, std::size_t idx, std::string_view text) {
  const std::string path = "layers[" + std::to_string(idx) + "]";
  const std::size_t line = locate_layer_line(text, idx);
  if (!j.is_object()) throw ParseError(path + " must be an object", line, path);
  LayerReader r{j, path, line};
  const auto kit = j.find("kind");
  if (kit == j.end() || !kit->is_string()) {
    throw ParseError("missing field \"kind\" at " + path, line, "kind");
  }
  const auto kind = kit->get<std::string>();
  if (kind == "Conv" || kind == "FC") {
    r.exact_keys({"kind", "n_i", "n_o", "f_w", "f_h", "l_i", "l_f", "c_i", "c_o", "stride", "pad"});
    LinearLayerParms l;
    l.kind = kind == "Conv" ? LinearKind::Conv : LinearKind::FC;
    l.n_i = r.integer("n_i");
    l.n_o = r.integer("n_o");
    l.f_w = r.integer("f_w");
    l.f_h = r.integer("f_h");
    l.l_i = r.integer("l_i");
    l.l_f = r.integer("l_f");
    l.c_i = r.integer("c_i");
    l.c_o = r.integer("c_o");
    l.stride = r.integer("stride");
    l.pad = parse_pad(r);
    return l;
  }
  NonLinearLayerParms n;
  if (kind == "ReLU") {
    n.kind = NonLinearKind::ReLU;
  } else if (kind == "Square") {
    n.kind = NonLinearKind::Square;
  } else if (kind == "AvgPool") {
    n.kind = NonLinearKind::AvgPool;
  } else {
    throw ParseError("unknown layer kind \"" + kind + "\" at " + path, line, "kind");
  }
  r.exact_keys({"kind", "n_i", "n_o", "l_i", "l_o", "c_i", "window"});
  n.n_i = r.integer("n_i");
  n.n_o = r.integer("n_o");
  n.l_i = r.integer("l_i");
  n.l_o = r.integer("l_o");
  n.c_i = r.integer("c_i");
  n.window = r.integer("window");
  return n;
}

}  // namespace

std::string serialize_network(const NetworkParms& net) {
  ojson doc;
  doc["layers"] = ojson::array();
  for (const auto& l : net.layers) doc["layers"].push_back(layer_to_json(l));
  doc["episode_id"] = net.episode_id;
  doc["sw_flag"] = net.sw_flag;
  return doc.dump(2) + "\n";
}

NetworkParms parse_network(std::string_view text) {
  ojson doc;
  try {
    doc = ojson::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line =
        1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
    throw ParseError("malformed network document at line " + std::to_string(line) + ": " + e.what(),
                     line, "");
  }
  if (!doc.is_object()) throw ParseError("network document must be an object", 1, "");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (it.key() != "layers" && it.key() != "episode_id" && it.key() != "sw_flag") {
      throw ParseError("unknown top-level field \"" + it.key() + "\"", 1, it.key());
    }
  }
  NetworkParms net;
  const auto layers = doc.find("layers");
  if (layers == doc.end() || !layers->is_array()) {
    throw ParseError("missing field \"layers\"", 1, "layers");
  }
  for (std::size_t k = 0; k < layers->size(); ++k) {
    net.layers.push_back(layer_from_json((*layers)[k], k, text));
  }
  const auto eps = doc.find("episode_id");
  if (eps == doc.end() || !eps->is_number_integer()) {
    throw ParseError("missing field \"episode_id\"", 1, "episode_id");
  }
  net.episode_id = eps->get<std::int64_t>();
  const auto sw = doc.find("sw_flag");
  if (sw == doc.end() || !sw->is_boolean()) {
    throw ParseError("missing field \"sw_flag\"", 1, "sw_flag");
  }
  net.sw_flag = sw->get<bool>();
  return net;
}

// ---------------------------------------------------------------------------

std::vector<std::string> check_crypto_params(const CryptoParams& params,
                                             std::uint64_t congruence_base) {
  std::vector<std::string> out;
  const auto& n = params.n;
  if (n != 1024 && n != 2048 && n != 4096 && n != 8192 && n != 16384) {
    out.push_back("n=" + std::to_string(n) + " not in {1024..16384}");
  }
  if (congruence_base == 0) {
    out.push_back("congruence base must be positive");
    return out;
  }
  if (!is_prime(params.p)) out.push_back("p is not prime");
  if (!is_prime(params.q)) out.push_back("q is not prime");
  if (params.p % congruence_base != 1) out.push_back("p != 1 mod congruence base");
  if (params.q % congruence_base != 1) out.push_back("q != 1 mod congruence base");
  if (params.q <= params.p) out.push_back("q must exceed p");
  if (!(params.sigma >= 0.0)) out.push_back("sigma must be >= 0");
  return out;
}

OpCounts& OpCounts::operator+=(const OpCounts& o) {
  n_mult += o.n_mult;
  n_rot += o.n_rot;
  n_add += o.n_add;
  n_ct_in += o.n_ct_in;
  n_ct_out += o.n_ct_out;
  n_fresh_enc += o.n_fresh_enc;
  return *this;
}

OpCounts OpCounts::scaled(std::int64_t k) const {
  return {n_mult * k, n_rot * k, n_add * k, n_ct_in * k, n_ct_out * k, n_fresh_enc * k};
}

double CostReport::linear_time() const {
  double t = 0.0;
  for (const auto& l : per_layer) {
    if (l.linear) t += l.t_layer;
  }
  return t;
}

double CostReport::nonlinear_time() const {
  double t = 0.0;
  for (const auto& l : per_layer) {
    if (!l.linear) t += l.t_layer;
  }
  return t;
}

std::string cost_report_text(const CostReport& r) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "layer  kind     n      bits_p bits_q  mult   rot    add    elements   time_s      bytes\n";
  for (const auto& l : r.per_layer) {
    os << std::left << std::setw(7) << l.index << std::setw(9) << l.kind;
    if (l.crypto) {
      os << std::setw(7) << l.crypto->n << std::setw(7) << l.crypto->bits_p() << std::setw(8)
         << l.crypto->bits_q();
    } else {
      os << std::setw(7) << "-" << std::setw(7) << "-" << std::setw(8) << "-";
    }
    os << std::setw(7) << l.ops.n_mult << std::setw(7) << l.ops.n_rot << std::setw(7)
       << l.ops.n_add << std::setw(11) << l.n_elements << std::setw(12) << l.t_layer
       << l.b_layer << "\n";
    if (l.crypto) {
      os << "       p=" << l.crypto->p << " q=" << l.crypto->q << "\n";
    }
  }
  os << "linear (PAHE) time: " << r.linear_time() << " s\n";
  os << "non-linear (GC) time: " << r.nonlinear_time() << " s\n";
  os << "total time T: " << r.T << " s\n";
  os << "bandwidth B: " << r.B << " bytes\n";
  os << "score xi: " << r.xi << "\n";
  return os.str();
}

std::string cost_report_csv(const CostReport& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "index,kind,n,bits_p,bits_q,n_mult,n_rot,n_add,t_layer_s,b_layer_bytes\n";
  for (const auto& l : r.per_layer) {
    os << l.index << ',' << l.kind << ',';
    if (l.crypto) {
      os << l.crypto->n << ',' << l.crypto->bits_p() << ',' << l.crypto->bits_q() << ',';
    } else {
      os << "0,0,0,";
    }
    os << l.ops.n_mult << ',' << l.ops.n_rot << ',' << l.ops.n_add << ',' << l.t_layer << ','
       << l.b_layer << "\n";
  }
  return os.str();
}

}  // namespace sinfer
