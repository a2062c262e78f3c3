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

#include "sinfer/pce/packing.hpp"

#include <algorithm>
#include <string>

namespace sinfer {

namespace {

void require_ring(std::uint64_t n) {
  if (!is_power_of_two(n) || n < 2) throw PackingError("ring dimension must be a power of two");
}

std::int64_t pad_before(const LinearLayerParms& l, std::int64_t f) {
  switch (l.pad.mode) {
    case Padding::Mode::Same: return (f - 1) / 2;
    case Padding::Mode::Valid: return 0;
    case Padding::Mode::Explicit: return l.pad.amount < f ? l.pad.amount : f - 1;
  }
  return 0;
}

}  // namespace

FcGeometry fc_geometry(const LinearLayerParms& layer, std::uint64_t n) {
  require_ring(n);
  if (layer.kind != LinearKind::FC) throw PackingError("fc_geometry: layer is not FC");
  const auto nn = static_cast<std::int64_t>(n);
  FcGeometry g;
  g.n_i_pad = static_cast<std::int64_t>(next_power_of_two(static_cast<std::uint64_t>(layer.n_i)));
  g.blocks = (g.n_i_pad + nn - 1) / nn;
  const auto n_o_pad =
      static_cast<std::int64_t>(next_power_of_two(static_cast<std::uint64_t>(layer.n_o)));
  if (n_o_pad <= nn) {
    g.row_blocks = 1;
    g.rows_per_block = layer.n_o;
    g.last_rows = layer.n_o;
  } else {
    g.row_blocks = (layer.n_o + nn - 1) / nn;
    g.rows_per_block = nn;
    g.last_rows = layer.n_o - (g.row_blocks - 1) * nn;
  }
  return g;
}

std::int64_t fc_sum_steps(std::int64_t n_i_pad, std::int64_t rows, std::uint64_t n) {
  const auto span = std::min<std::int64_t>(static_cast<std::int64_t>(n), n_i_pad);
  const auto rows_pad =
      static_cast<std::int64_t>(next_power_of_two(static_cast<std::uint64_t>(rows)));
  if (span <= rows_pad) return 0;
  return ceil_log2(static_cast<std::uint64_t>(span / rows_pad));
}

OpCounts fc_op_counts(const LinearLayerParms& layer, std::uint64_t n) {
  const auto g = fc_geometry(layer, n);
  OpCounts c;
  auto row_block = [&](std::int64_t rows) {
    const std::int64_t rs = fc_sum_steps(g.n_i_pad, rows, n);
    c.n_mult += g.blocks * rows;
    c.n_rot += g.blocks * (rows - 1 + rs);
    c.n_add += g.blocks * (rows - 1 + rs) + (g.blocks - 1);
  };
  for (std::int64_t r = 0; r + 1 < g.row_blocks; ++r) row_block(g.rows_per_block);
  row_block(g.last_rows);
  c.n_ct_in = g.blocks;
  c.n_ct_out = g.row_blocks;
  c.n_fresh_enc = c.n_ct_out;
  return c;
}

ConvGeometry conv_geometry(const LinearLayerParms& layer, std::uint64_t n) {
  require_ring(n);
  if (layer.kind != LinearKind::Conv) throw PackingError("conv_geometry: layer is not Conv");
  const auto nn = static_cast<std::int64_t>(n);
  if (layer.n_i > nn) {
    throw PackingError("Conv n_i=" + std::to_string(layer.n_i) + " exceeds ring dimension " +
                       std::to_string(n) + "; raise n");
  }
  ConvGeometry g;
  g.channels_per_ct = std::max<std::int64_t>(1, nn / layer.n_i);
  g.ct_in = (layer.c_i + g.channels_per_ct - 1) / g.channels_per_ct;
  g.ct_out = (layer.c_o + g.channels_per_ct - 1) / g.channels_per_ct;
  g.sum_steps = ceil_log2(static_cast<std::uint64_t>(g.channels_per_ct));
  return g;
}

OpCounts conv_op_counts(const LinearLayerParms& layer, std::uint64_t n) {
  const auto g = conv_geometry(layer, n);
  const std::int64_t taps = layer.f_h * layer.f_w;
  OpCounts c;
  c.n_rot = g.ct_in * (taps - 1) + g.ct_out * g.sum_steps;
  c.n_mult = g.ct_in * g.ct_out * taps;
  c.n_add = c.n_mult - g.ct_out + g.ct_out * g.sum_steps;
  c.n_ct_in = g.ct_in;
  c.n_ct_out = g.ct_out;
  c.n_fresh_enc = c.n_ct_out;
  return c;
}

OpCounts linear_op_counts(const LinearLayerParms& layer, std::uint64_t n) {
  return layer.kind == LinearKind::FC ? fc_op_counts(layer, n) : conv_op_counts(layer, n);
}

std::uint64_t min_ring_dimension(const LinearLayerParms& layer) {
  const std::uint64_t need = next_power_of_two(static_cast<std::uint64_t>(layer.n_i));
  if (layer.kind == LinearKind::Conv && need > kMaxRingDim) {
    throw PackingError("Conv n_i=" + std::to_string(layer.n_i) + " exceeds the largest ring");
  }
  return std::clamp(need, kMinRingDim, kMaxRingDim);
}

LinearPlan output_plan(const LinearLayerParms& layer, std::uint64_t n) {
  PlanBuilder b(n);
  std::uint32_t acc = 0;
  if (layer.kind == LinearKind::FC) {
    const auto g = fc_geometry(layer, n);
    const std::int64_t rows = g.rows_per_block;
    const std::int64_t rs = fc_sum_steps(g.n_i_pad, rows, n);
    const auto span = std::min<std::int64_t>(static_cast<std::int64_t>(n), g.n_i_pad);
    for (std::int64_t blk = 0; blk < g.blocks; ++blk) {
      const auto u = b.input();
      std::uint32_t part = b.mult(u);
      for (std::int64_t i = 1; i < rows; ++i) {
        const auto r = b.rot(u, i);
        b.mult_into(r);
        b.add_into(part, r);
        b.release(r);
      }
      b.release(u);
      std::int64_t shift = span / 2;
      for (std::int64_t s = 0; s < rs; ++s, shift /= 2) {
        const auto r = b.rot(part, shift);
        b.add_into(part, r);
        b.release(r);
      }
      if (blk == 0) {
        acc = part;
      } else {
        b.add_into(acc, part);
        b.release(part);
      }
    }
  } else {
    const auto g = conv_geometry(layer, n);
    const std::int64_t side = layer.side();
    const std::int64_t ph = pad_before(layer, layer.f_h);
    const std::int64_t pw = pad_before(layer, layer.f_w);
    const auto nn = static_cast<std::int64_t>(n);
    bool first = true;
    for (std::int64_t c = 0; c < g.ct_in; ++c) {
      const auto u = b.input();
      for (std::int64_t dy = 0; dy < layer.f_h; ++dy) {
        for (std::int64_t dx = 0; dx < layer.f_w; ++dx) {
          const std::int64_t offset = (dy - ph) * side + (dx - pw);
          const auto t = offset == 0 ? b.mult(u) : b.mult_into(b.rot(u, ((offset % nn) + nn) % nn));
          if (first) {
            acc = t;
            first = false;
          } else {
            b.add_into(acc, t);
            b.release(t);
          }
        }
      }
      b.release(u);
    }
    for (std::int64_t s = 0; s < g.sum_steps; ++s) {
      const std::int64_t shift = layer.n_i << s;
      const auto r = b.rot(acc, shift % nn);
      b.add_into(acc, r);
      b.release(r);
    }
  }
  const auto blind = b.input(true);
  b.add_into(acc, blind, true);
  b.release(blind);
  return std::move(b).finish(acc);
}

}  // namespace sinfer
