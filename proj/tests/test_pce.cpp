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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "sinfer/core/networks.hpp"
#include "sinfer/pce/cost.hpp"
#include "sinfer/pce/packing.hpp"

using namespace sinfer;

namespace {

using L = LinearLayerParms;

// ---------------------------------------------------------------------------
// Op-by-op walkers over the packing strategy; the closed forms must agree.

OpCounts walk_fc(const L& layer, std::uint64_t n) {
  const auto nn = static_cast<std::int64_t>(n);
  std::int64_t n_i_pad = 1;
  while (n_i_pad < layer.n_i) n_i_pad *= 2;
  std::int64_t n_o_pad = 1;
  while (n_o_pad < layer.n_o) n_o_pad *= 2;
  const std::int64_t blocks = (n_i_pad + nn - 1) / nn;
  std::vector<std::int64_t> row_blocks;
  if (n_o_pad <= nn) {
    row_blocks.push_back(layer.n_o);
  } else {
    for (std::int64_t left = layer.n_o; left > 0; left -= nn) row_blocks.push_back(std::min(left, nn));
  }
  const std::int64_t span = std::min(nn, n_i_pad);
  OpCounts c;
  for (const std::int64_t rows : row_blocks) {
    std::int64_t rows_pad = 1;
    while (rows_pad < rows) rows_pad *= 2;
    for (std::int64_t blk = 0; blk < blocks; ++blk) {
      for (std::int64_t i = 0; i < rows; ++i) {
        if (i > 0) ++c.n_rot;
        ++c.n_mult;
        if (i > 0) ++c.n_add;
      }
      for (std::int64_t shift = span / 2; shift >= rows_pad; shift /= 2) {
        ++c.n_rot;
        ++c.n_add;
      }
      if (blk > 0) ++c.n_add;
    }
  }
  c.n_ct_in = blocks;
  c.n_ct_out = static_cast<std::int64_t>(row_blocks.size());
  c.n_fresh_enc = c.n_ct_out;
  return c;
}

OpCounts walk_conv(const L& layer, std::uint64_t n) {
  const auto nn = static_cast<std::int64_t>(n);
  const std::int64_t cn = std::max<std::int64_t>(1, nn / layer.n_i);
  const std::int64_t ct_in = (layer.c_i + cn - 1) / cn;
  const std::int64_t ct_out = (layer.c_o + cn - 1) / cn;
  OpCounts c;
  // Rotated taps of each input ciphertext are shared by all outputs.
  for (std::int64_t g = 0; g < ct_in; ++g) {
    for (std::int64_t dy = 0; dy < layer.f_h; ++dy) {
      for (std::int64_t dx = 0; dx < layer.f_w; ++dx) {
        const bool centre = dy == (layer.f_h - 1) / 2 && dx == (layer.f_w - 1) / 2;
        if (!centre) ++c.n_rot;
      }
    }
  }
  for (std::int64_t o = 0; o < ct_out; ++o) {
    bool first = true;
    for (std::int64_t g = 0; g < ct_in; ++g) {
      for (std::int64_t t = 0; t < layer.f_h * layer.f_w; ++t) {
        ++c.n_mult;
        if (!first) ++c.n_add;
        first = false;
      }
    }
    for (std::int64_t width = 1; width < cn; width *= 2) {
      ++c.n_rot;
      ++c.n_add;
    }
  }
  c.n_ct_in = ct_in;
  c.n_ct_out = ct_out;
  c.n_fresh_enc = ct_out;
  return c;
}

// ---------------------------------------------------------------------------
// Slot-level execution: vectors of n slots, rot(x, k)[j] = x[(j + k) mod n].

using Slots = std::vector<std::int64_t>;

struct SlotMachine {
  std::size_t n;
  OpCounts ops;

  Slots rot(const Slots& x, std::int64_t k) {
    ++ops.n_rot;
    Slots out(n);
    const auto nn = static_cast<std::int64_t>(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = x[static_cast<std::size_t>(((static_cast<std::int64_t>(j) + k) % nn + nn) % nn)];
    return out;
  }
  Slots mult(const Slots& x, const Slots& w) {
    ++ops.n_mult;
    Slots out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = x[j] * w[j];
    return out;
  }
  void add(Slots& acc, const Slots& x) {
    ++ops.n_add;
    for (std::size_t j = 0; j < n; ++j) acc[j] += x[j];
  }
};

// Hybrid diagonal matvec for power-of-two n_o (one row block).
std::vector<std::int64_t> fc_slots(const std::vector<std::vector<std::int64_t>>& W,
                                   const std::vector<std::int64_t>& u, std::size_t n, OpCounts& ops) {
  const std::size_t rows = W.size();
  const std::size_t cols = u.size();
  std::size_t cols_pad = 1;
  while (cols_pad < cols) cols_pad *= 2;
  const std::size_t span = std::min(n, cols_pad);
  const std::size_t blocks = (cols_pad + n - 1) / n;
  SlotMachine m{n, {}};
  Slots total;
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    // The block's columns, replicated with period `span`.
    Slots x(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t col = blk * n + j % span;
      x[j] = col < cols ? u[col] : 0;
    }
    Slots acc;
    for (std::size_t i = 0; i < rows; ++i) {
      Slots diag(n, 0);
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t col = blk * n + (j + i) % span;
        diag[j] = col < cols ? W[j % rows][col] : 0;
      }
      if (i == 0) {
        acc = m.mult(x, diag);
      } else {
        m.add(acc, m.mult(m.rot(x, static_cast<std::int64_t>(i)), diag));
      }
    }
    for (std::size_t shift = span / 2; shift >= rows; shift /= 2) m.add(acc, m.rot(acc, static_cast<std::int64_t>(shift)));
    if (blk == 0) {
      total = acc;
    } else {
      m.add(total, acc);
    }
  }
  ops = m.ops;
  ops.n_ct_in = static_cast<std::int64_t>(blocks);
  ops.n_ct_out = 1;
  ops.n_fresh_enc = 1;
  return {total.begin(), total.begin() + static_cast<std::ptrdiff_t>(rows)};
}

// One channel per ciphertext ("same" padding, stride 1).
using Maps = std::vector<std::vector<std::int64_t>>;  // [channel][position]

Maps conv_slots(const L& layer, const Maps& x, const std::vector<std::vector<std::vector<std::int64_t>>>& w,
                std::size_t n, OpCounts& ops) {
  const std::int64_t side = layer.side();
  const std::int64_t ph = (layer.f_h - 1) / 2;
  const std::int64_t pw = (layer.f_w - 1) / 2;
  SlotMachine m{n, {}};
  std::vector<std::vector<Slots>> rotated(static_cast<std::size_t>(layer.c_i));
  for (std::int64_t c = 0; c < layer.c_i; ++c) {
    Slots in(n, 0);
    for (std::int64_t j = 0; j < layer.n_i; ++j) in[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)];
    for (std::int64_t dy = 0; dy < layer.f_h; ++dy) {
      for (std::int64_t dx = 0; dx < layer.f_w; ++dx) {
        const std::int64_t off = (dy - ph) * side + (dx - pw);
        rotated[static_cast<std::size_t>(c)].push_back(off == 0 ? in : m.rot(in, off));
      }
    }
  }
  Maps out(static_cast<std::size_t>(layer.c_o));
  for (std::int64_t o = 0; o < layer.c_o; ++o) {
    Slots acc;
    bool first = true;
    for (std::int64_t c = 0; c < layer.c_i; ++c) {
      for (std::int64_t dy = 0; dy < layer.f_h; ++dy) {
        for (std::int64_t dx = 0; dx < layer.f_w; ++dx) {
          // Plaintext weight: the tap value where the tap stays inside the map.
          Slots pt(n, 0);
          for (std::int64_t y = 0; y < side; ++y) {
            for (std::int64_t xx = 0; xx < side; ++xx) {
              const std::int64_t sy = y + dy - ph;
              const std::int64_t sx = xx + dx - pw;
              if (sy >= 0 && sy < side && sx >= 0 && sx < side) {
                pt[static_cast<std::size_t>(y * side + xx)] = w[static_cast<std::size_t>(o)][static_cast<std::size_t>(c)][static_cast<std::size_t>(dy * layer.f_w + dx)];
              }
            }
          }
          const auto prod = m.mult(rotated[static_cast<std::size_t>(c)][static_cast<std::size_t>(dy * layer.f_w + dx)], pt);
          if (first) {
            acc = prod;
            first = false;
          } else {
            m.add(acc, prod);
          }
        }
      }
    }
    out[static_cast<std::size_t>(o)].assign(acc.begin(), acc.begin() + layer.n_i);
  }
  ops = m.ops;
  ops.n_ct_in = layer.c_i;
  ops.n_ct_out = layer.c_o;
  ops.n_fresh_enc = layer.c_o;
  return out;
}

Maps conv_direct(const L& layer, const Maps& x, const std::vector<std::vector<std::vector<std::int64_t>>>& w) {
  const std::int64_t side = layer.side();
  const std::int64_t ph = (layer.f_h - 1) / 2;
  const std::int64_t pw = (layer.f_w - 1) / 2;
  Maps out(static_cast<std::size_t>(layer.c_o), std::vector<std::int64_t>(static_cast<std::size_t>(layer.n_i), 0));
  for (std::int64_t o = 0; o < layer.c_o; ++o)
    for (std::int64_t y = 0; y < side; ++y)
      for (std::int64_t xx = 0; xx < side; ++xx)
        for (std::int64_t c = 0; c < layer.c_i; ++c)
          for (std::int64_t dy = 0; dy < layer.f_h; ++dy)
            for (std::int64_t dx = 0; dx < layer.f_w; ++dx) {
              const std::int64_t sy = y + dy - ph;
              const std::int64_t sx = xx + dx - pw;
              if (sy < 0 || sy >= side || sx < 0 || sx >= side) continue;
              out[static_cast<std::size_t>(o)][static_cast<std::size_t>(y * side + xx)] +=
                  w[static_cast<std::size_t>(o)][static_cast<std::size_t>(c)][static_cast<std::size_t>(dy * layer.f_w + dx)] *
                  x[static_cast<std::size_t>(c)][static_cast<std::size_t>(sy * side + sx)];
            }
  return out;
}

CryptoParams params_at(std::uint64_t n, int bits_q) {
  CryptoParams cp;
  cp.n = n;
  cp.p = 65537;
  cp.q = (BigInt(1) << (bits_q - 1)) + 1;
  return cp;
}

}  // namespace

TEST_CASE("toy matvec counts and the 1025-column doubling") {
  const auto toy = L::fc(1024, 10, 8, 8);
  const auto c = fc_op_counts(toy, 1024);
  CHECK(c.n_mult == 10);
  CHECK(c.n_rot == 9 + 6);
  CHECK(c.n_add == 9 + 6);
  CHECK(c.n_ct_in == 1);
  CHECK(c.n_ct_out == 1);

  const auto wide = L::fc(1025, 10, 8, 8);
  CHECK(min_ring_dimension(toy) == 1024);
  CHECK(min_ring_dimension(wide) == 2048);
  const auto& prof = reference_profile();
  const auto a = price_linear(c, params_at(1024, 40), prof);
  const auto b = price_linear(fc_op_counts(wide, 2048), params_at(2048, 40), prof);
  CHECK(b.t >= 2.0 * a.t);
  CHECK(b.b >= 2.0 * a.b);
}

TEST_CASE("single-row FC and trivial convolutions") {
  for (std::uint64_t n : {64u, 1024u, 4096u}) {
    const auto c = fc_op_counts(L::fc(static_cast<std::int64_t>(n), 1, 4, 4), n);
    CHECK(c.n_mult == 1);
    CHECK(c.n_rot == static_cast<std::int64_t>(std::log2(n)));
  }
  const auto id = conv_op_counts(L::conv(8, 1, 1, 1, 1, 4, 4), 64);
  CHECK(id.n_mult == 1);
  CHECK(id.n_rot == 0);
  const auto c3 = conv_op_counts(L::conv(8, 1, 1, 3, 3, 4, 4), 64);
  CHECK(c3.n_mult == 9);
  CHECK(c3.n_rot == 8);
  CHECK_THROWS_AS(conv_op_counts(L::conv(16, 1, 1, 3, 3, 4, 4), 128), PackingError);
}

TEST_CASE("closed forms equal the plan walker") {
  SUBCASE("FC layers up to 64 inputs") {
    for (std::uint64_t n : {16u, 32u, 64u}) {
      for (std::int64_t ni = 1; ni <= 64; ++ni) {
        for (std::int64_t no = 1; no <= 70; no += 3) {
          const auto layer = L::fc(ni, no, 4, 4);
          CAPTURE(n);
          CAPTURE(ni);
          CAPTURE(no);
          REQUIRE(fc_op_counts(layer, n) == walk_fc(layer, n));
        }
      }
    }
  }
  SUBCASE("conv layers up to 64 elements and 4 channels") {
    for (std::uint64_t n : {16u, 32u, 64u}) {
      for (std::int64_t side = 1; side * side <= static_cast<std::int64_t>(n); ++side) {
        for (std::int64_t ci = 1; ci <= 4; ++ci) {
          for (std::int64_t co = 1; co <= 4; ++co) {
            for (std::int64_t fh : {1, 2, 3}) {
              for (std::int64_t fw : {1, 3}) {
                const auto layer = L::conv(side, ci, co, fh, fw, 4, 4);
                CAPTURE(n);
                CAPTURE(side);
                CAPTURE(ci);
                CAPTURE(co);
                CAPTURE(fh);
                CAPTURE(fw);
                REQUIRE(conv_op_counts(layer, n) == walk_conv(layer, n));
              }
            }
          }
        }
      }
    }
  }
  SUBCASE("CR(48x3x5) on 24-channel 16x16 maps") {
    const auto layer = L::conv(16, 24, 48, 3, 5, 6, 7);
    for (std::uint64_t n : {1024u, 2048u, 4096u, 8192u}) {
      const auto c = conv_op_counts(layer, n);
      CHECK(c == walk_conv(layer, n));
      const std::int64_t cn = static_cast<std::int64_t>(n) / 256;
      const std::int64_t ci = (24 + cn - 1) / cn;
      const std::int64_t co = (48 + cn - 1) / cn;
      const std::int64_t steps = static_cast<std::int64_t>(std::log2(cn));
      CHECK(c.n_rot == ci * 14 + co * steps);
      CHECK(c.n_mult == ci * co * 15);
      CHECK(c.n_add == c.n_mult - co + co * steps);
      CHECK(c.n_ct_in == ci);
    }
  }
}

TEST_CASE("the failure-simulation plan covers one output ciphertext") {
  // Plan counts leave out the blinding input and its addition.
  for (const auto& layer : {L::fc(64, 8, 4, 4), L::fc(200, 3, 4, 4), L::conv(4, 3, 2, 3, 3, 4, 4)}) {
    for (std::uint64_t n : {32u, 64u}) {
      if (layer.kind == LinearKind::Conv && layer.n_i > static_cast<std::int64_t>(n)) continue;
      auto single = layer;
      if (single.kind == LinearKind::Conv) single.c_o = 1;
      const auto want = linear_op_counts(single, n);
      const auto got = output_plan(layer, n).counts();
      CAPTURE(n);
      CHECK(got.n_mult == want.n_mult);
      CHECK(got.n_rot == want.n_rot);
      CHECK(got.n_add == want.n_add);
    }
  }
}

TEST_CASE("slot-level FC matvec computes W u with the counted operations") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> val(-9, 9);
  for (std::size_t n : {16u, 64u}) {
    for (std::size_t cols : {5u, 16u, 47u, 64u, 100u}) {
      for (std::size_t rows : {1u, 2u, 4u, 8u}) {
        if (rows > n) continue;
        std::vector<std::vector<std::int64_t>> W(rows, std::vector<std::int64_t>(cols));
        std::vector<std::int64_t> u(cols);
        for (auto& r : W) for (auto& v : r) v = val(rng);
        for (auto& v : u) v = val(rng);
        OpCounts ops;
        const auto got = fc_slots(W, u, n, ops);
        for (std::size_t r = 0; r < rows; ++r) {
          std::int64_t dot = 0;
          for (std::size_t c = 0; c < cols; ++c) dot += W[r][c] * u[c];
          CHECK(got[r] == dot);
        }
        const auto layer = L::fc(static_cast<std::int64_t>(cols), static_cast<std::int64_t>(rows), 4, 4);
        CAPTURE(n);
        CAPTURE(cols);
        CAPTURE(rows);
        CHECK(ops == fc_op_counts(layer, n));
      }
    }
  }
}

TEST_CASE("slot-level convolution with one channel per ciphertext") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> val(-5, 5);
  struct Case { std::int64_t side, ci, co, fh, fw; std::size_t n; };
  for (const auto& k : {Case{6, 2, 3, 3, 3, 64}, Case{5, 1, 2, 3, 1, 32}, Case{7, 3, 1, 5, 5, 64},
                        Case{3, 2, 2, 3, 3, 16}}) {
    const auto layer = L::conv(k.side, k.ci, k.co, k.fh, k.fw, 4, 4);
    REQUIRE(conv_geometry(layer, k.n).channels_per_ct == 1);
    Maps x(static_cast<std::size_t>(k.ci), std::vector<std::int64_t>(static_cast<std::size_t>(layer.n_i)));
    for (auto& ch : x) for (auto& v : ch) v = val(rng);
    std::vector<std::vector<std::vector<std::int64_t>>> w(
        static_cast<std::size_t>(k.co),
        std::vector<std::vector<std::int64_t>>(static_cast<std::size_t>(k.ci),
                                               std::vector<std::int64_t>(static_cast<std::size_t>(k.fh * k.fw))));
    for (auto& a : w) for (auto& b : a) for (auto& v : b) v = val(rng);
    OpCounts ops;
    CHECK(conv_slots(layer, x, w, k.n, ops) == conv_direct(layer, x, w));
    CHECK(ops == conv_op_counts(layer, k.n));
  }
}

TEST_CASE("non-linear pricing") {
  const auto& prof = reference_profile();
  const auto r = nonlinear_cost(NonLinearLayerParms::relu(10000, 1, 23), prof);
  CHECK(r.t == doctest::Approx(0.551).epsilon(1e-9));
  const auto half = nonlinear_cost(NonLinearLayerParms::relu(10000, 1, 23 * 2), prof);
  CHECK(half.t == doctest::Approx(2 * r.t));
  CHECK(half.b == doctest::Approx(2 * r.b));
  auto empty = NonLinearLayerParms::relu(1, 1, 8);
  empty.n_i = 0;
  const auto z = nonlinear_cost(empty, prof);
  CHECK(z.t == 0.0);
  CHECK(z.b == 0.0);
  const auto pool = nonlinear_cost(NonLinearLayerParms::avg_pool(1024, 64, 2, 23), prof);
  CHECK(pool.t == 0.0);
  CHECK(pool.b == 0.0);
  CalibrationProfile bare = prof;
  bare.nonlinear.erase(NonLinearKind::ReLU);
  CHECK_THROWS_AS(nonlinear_cost(NonLinearLayerParms::relu(4, 1, 8), bare), MissingProfileEntry);
}

TEST_CASE("linear pricing") {
  const auto& prof = reference_profile();
  CHECK(check_profile(prof).empty());
  const auto cp = params_at(4096, 60);
  const auto zero = price_linear(OpCounts{}, cp, prof);
  CHECK(zero.t == 0.0);
  CHECK(zero.b == 0.0);
  const auto c = fc_op_counts(L::fc(1024, 10, 8, 8), 4096);
  const auto one = price_linear(c, cp, prof);
  OpCounts twice = c.scaled(2);
  const auto two = price_linear(twice, cp, prof);
  CHECK(two.t == doctest::Approx(2 * one.t).epsilon(1e-15));
  CHECK(two.b == doctest::Approx(2 * one.b).epsilon(1e-15));
  // 62 -> 63 bits adds a limb.
  const auto a = price_linear(c, params_at(4096, 62), prof);
  const auto b = price_linear(c, params_at(4096, 63), prof);
  CHECK(b.t > a.t);
  CHECK(b.b > a.b);
  CHECK(prof.find(4096, 2)->ct_bytes == 131072);
  CHECK_THROWS_AS(price_linear(c, params_at(512, 40), prof), MissingProfileEntry);
}

TEST_CASE("score is the weighted sum of normalized time and bandwidth") {
  const ScoreWeights w{0.5, 2.0, 1e6};
  CHECK(score(2.0, 1e6, w) == doctest::Approx(1.0));
  CHECK(score(3.0, 5e6, {1.0, 2.0, 1e6}) == doctest::Approx(1.5));
  CHECK(score(3.0, 5e6, {0.0, 2.0, 1e6}) == doctest::Approx(5.0));
  CHECK(score(3.0, 5e6, {0.3, 1.0, 1.0}) == doctest::Approx(0.3 * 3.0 + 0.7 * 5e6));
  CHECK_FALSE(ScoreWeights{1.5, 1, 1}.check().empty());
  CHECK_FALSE(ScoreWeights{0.5, 0, 1}.check().empty());
  // argmin over candidates is unchanged when both scales grow by the same factor
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::pair<double, double>> cand(8);
    for (auto& [t, b] : cand) t = u(rng), b = u(rng) * 1e6;
    const ScoreWeights base{u(rng) / 10.0, 1.5, 2e6};
    ScoreWeights scaled = base;
    scaled.time_scale *= 37.0;
    scaled.bw_scale *= 37.0;
    auto argmin = [&](const ScoreWeights& sw) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < cand.size(); ++i) {
        if (score(cand[i].first, cand[i].second, sw) < score(cand[best].first, cand[best].second, sw)) best = i;
      }
      return best;
    };
    CHECK(argmin(base) == argmin(scaled));
  }
}

TEST_CASE("network characterization") {
  PieConfig cfg;
  cfg.mc_trials = 300;
  cfg.delta = 1e-2;
  const auto& prof = reference_profile();
  SUBCASE("empty network") {
    const auto r = characterize_network(NetworkParms{}, cfg, prof);
    CHECK(r.T == 0.0);
    CHECK(r.B == 0.0);
  }
  SUBCASE("totals are the per-layer sums and B ignores timing fields") {
    const auto net = one_conv_network(4);
    PieMemo memo;
    const auto r = characterize_network(net, cfg, prof, {}, &memo);
    double t = 0, b = 0;
    for (const auto& l : r.per_layer) t += l.t_layer, b += l.b_layer;
    CHECK(r.T == t);
    CHECK(r.B == b);
    CHECK(r.per_layer.size() == net.layers.size());
    CHECK(memo.size() == 2);
    CalibrationProfile slow = prof;
    for (auto& [k, c] : slow.linear) c.t_mult *= 3, c.t_rot *= 5, c.t_add *= 7;
    for (auto& [k, c] : slow.nonlinear) c.t_per_element *= 11;
    const auto s = characterize_network(net, cfg, slow, {}, &memo);
    CHECK(s.B == r.B);
    CHECK(s.T > r.T);
  }
  SUBCASE("infeasibility carries the layer index") {
    auto tight = cfg;
    tight.n_candidates = {1024};
    NetworkParms net;
    net.layers.push_back(NonLinearLayerParms::relu(1024, 1, 8));
    net.layers.push_back(L::fc(1024, 10, 8, 8));
    try {
      characterize_network(net, tight, prof);
      FAIL("expected infeasibility");
    } catch (const LayerInfeasibleError& e) {
      CHECK(e.layer() == 1);
    }
  }
}

TEST_CASE("cost grows with the ring when the packing does not change") {
  // Layers that fit one ciphertext at both n and 2n keep their counts, so a
  // monotone profile prices them strictly higher at 2n.
  const auto& prof = reference_profile();
  int compared = 0;
  for (const auto& layer : {L::fc(1024, 10, 4, 4), L::fc(512, 64, 4, 4), L::conv(16, 1, 4, 3, 3, 4, 4),
                            L::conv(32, 1, 1, 5, 5, 4, 4)}) {
    for (std::uint64_t n = 1024; n < 16384; n *= 2) {
      if (static_cast<std::uint64_t>(layer.n_i) > n) continue;
      const auto lo = linear_op_counts(layer, n);
      const auto hi = linear_op_counts(layer, 2 * n);
      if (!(lo.n_mult == hi.n_mult && lo.n_ct_in == hi.n_ct_in && lo.n_ct_out == hi.n_ct_out)) continue;
      for (int bits : {40, 100}) {
        const auto a = price_linear(lo, params_at(n, bits), prof);
        const auto b = price_linear(hi, params_at(2 * n, bits), prof);
        CHECK(b.t > a.t);
        CHECK(b.b > a.b);
        ++compared;
      }
    }
  }
  CHECK(compared >= 12);
}

TEST_CASE("calibration on mini-BFV") {
  CalibrateOptions opt;
  opt.dims = {2048, 8192};
  opt.words = {1, 2};
  opt.reps = 3;
  const auto prof = calibrate(opt);
  CHECK(prof.source == CalibrationProfile::Source::Measured);
  CHECK(check_profile(prof).empty());
  CHECK(prof.find(8192, 1)->t_mult > prof.find(2048, 1)->t_mult);
  CHECK(prof.find(2048, 2)->ct_bytes == 2 * 2048 * 2 * 8);
  CHECK(prof.find(NonLinearKind::ReLU) != nullptr);
  const auto back = profile_from_json(profile_to_json(prof));
  CHECK(back.find(8192, 2)->t_rot == doctest::Approx(prof.find(8192, 2)->t_rot));
}
