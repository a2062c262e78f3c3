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

#include "sinfer/pie/pie.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "sinfer/numeric/primes.hpp"
#include "sinfer/pce/packing.hpp"

namespace sinfer {

SecurityTable::SecurityTable(std::vector<SecurityRow> rows, std::string secret)
    : rows_(std::move(rows)), secret_(std::move(secret)) {
  std::sort(rows_.begin(), rows_.end(), [](const SecurityRow& a, const SecurityRow& b) {
    return a.security_bits != b.security_bits ? a.security_bits < b.security_bits : a.n < b.n;
  });
}

SecurityTable SecurityTable::standard() {
  const std::uint64_t dims[] = {1024, 2048, 4096, 8192, 16384};
  const int l128[] = {27, 54, 109, 218, 438};
  const int l192[] = {19, 37, 75, 152, 305};
  const int l256[] = {14, 29, 58, 118, 237};
  std::vector<SecurityRow> rows;
  for (int i = 0; i < 5; ++i) {
    rows.push_back({dims[i], l128[i], 128});
    rows.push_back({dims[i], l192[i], 192});
    rows.push_back({dims[i], l256[i], 256});
  }
  return SecurityTable(std::move(rows), "ternary");
}

std::optional<int> SecurityTable::max_log2_q(std::uint64_t n, int lambda) const {
  for (const auto& r : rows_) {
    if (r.n == n && r.security_bits == lambda) return r.max_log2_q;
  }
  return std::nullopt;
}

std::vector<std::string> SecurityTable::check() const {
  std::vector<std::string> out;
  std::map<int, const SecurityRow*> last;
  for (const auto& r : rows_) {
    if (!is_power_of_two(r.n)) out.push_back("row n=" + std::to_string(r.n) + ": n must be a power of two");
    if (r.max_log2_q < 1) out.push_back("row n=" + std::to_string(r.n) + ": max_log2_q must be >= 1");
    const auto it = last.find(r.security_bits);
    if (it != last.end() && r.max_log2_q <= it->second->max_log2_q) {
      out.push_back("lambda=" + std::to_string(r.security_bits) + ": max_log2_q not increasing at n=" +
                    std::to_string(r.n));
    }
    last[r.security_bits] = &r;
  }
  return out;
}

SecurityTable security_table_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  std::vector<SecurityRow> rows;
  for (const auto& r : j.at("rows")) {
    rows.push_back({r.at("n").get<std::uint64_t>(), r.at("max_log2_q").get<int>(),
                    r.at("security_bits").get<int>()});
  }
  SecurityTable t(std::move(rows), j.value("secret", std::string("ternary")));
  const auto bad = t.check();
  if (!bad.empty()) throw std::runtime_error("security table: " + bad.front());
  return t;
}

SecurityTable load_security_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open security table " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return security_table_from_json(ss.str());
}

bool security_gate(std::uint64_t n, int log2_q, const SecurityTable& table, int lambda) {
  const auto limit = table.max_log2_q(n, lambda);
  if (!limit) {
    throw std::out_of_range("security table has no row for n=" + std::to_string(n) +
                            " lambda=" + std::to_string(lambda));
  }
  return log2_q <= *limit;
}

std::vector<std::string> PieConfig::check() const {
  std::vector<std::string> out;
  if (!(delta >= 1e-3 && delta <= 1e-2)) out.push_back("delta must lie in [1e-3, 1e-2]");
  if (lambda != 128 && lambda != 192 && lambda != 256) out.push_back("lambda must be 128, 192 or 256");
  if (mc_trials < 1) out.push_back("mc_trials must be >= 1");
  if (q_bit_step < 1) out.push_back("q_bit_step must be >= 1");
  if (n_candidates.empty()) out.push_back("n_candidates must not be empty");
  for (auto n : n_candidates) {
    if (!table.max_log2_q(n, lambda)) {
      out.push_back("n_candidates: no security row for n=" + std::to_string(n));
    }
  }
  if (!std::is_sorted(n_candidates.begin(), n_candidates.end())) {
    out.push_back("n_candidates must be ascending");
  }
  if (!(noise.sigma >= 0)) out.push_back("sigma must be >= 0");
  return out;
}

int plaintext_bitwidth(std::int64_t l_i, std::int64_t l_f, std::int64_t f_h, std::int64_t f_w) {
  if (l_i < 1 || l_f < 1 || f_h < 1 || f_w < 1) {
    throw std::invalid_argument("plaintext_bitwidth: arguments must be >= 1");
  }
  return static_cast<int>(l_i + l_f) + ceil_log2(static_cast<std::uint64_t>(f_h * f_w));
}

int plaintext_bitwidth(const LinearLayerParms& layer) {
  return plaintext_bitwidth(layer.l_i, layer.l_f, layer.f_h, layer.f_w);
}

CongruentPrime gen_prime_congruent(int bits, const BigInt& base) {
  if (base < 1) throw std::invalid_argument("gen_prime_congruent: base must be >= 1");
  // Narrowest width holding a value 1 + k*base with k >= 1.
  const int min_bits = bit_length(BigInt(base + 1));
  const int requested = bits;
  int width = std::max(bits, min_bits);
  constexpr std::int64_t kCap = std::int64_t{1} << 20;
  for (;; ++width) {
    const BigInt lo = BigInt(1) << (width - 1);  // exclusive
    const BigInt hi = BigInt(1) << width;        // exclusive (a prime is never 2^width)
    // smallest candidate 1 + k*base > lo
    BigInt k = (lo - 1) / base + 1;
    if (k < 1) k = 1;
    std::int64_t tried = 0;
    for (BigInt cand = k * base + 1; cand < hi; cand += base) {
      if (++tried > kCap) {
        throw std::runtime_error("gen_prime_congruent: no prime within 2^20 candidates at " +
                                 std::to_string(width) + " bits");
      }
      if (is_prime(cand)) return {cand, width, width != requested};
    }
  }
}

BigInt worst_case_error(const LinearLayerParms& layer, std::uint64_t n, std::uint64_t p,
                        const NoiseModel& model) {
  const auto b = plan_bounds(output_plan(layer, n), p, model);
  // |K| <= (|M| + (p - 1) / 2) / p
  const BigInt carry = (b.message + (p - 1) / 2) / p;
  return b.error + carry;
}

int initial_q_estimate(const LinearLayerParms& layer, std::uint64_t n, std::uint64_t p,
                       const NoiseModel& model) {
  return q_bits_for_error(p, worst_case_error(layer, n, p, model));
}

int q_bits_for_error(std::uint64_t p, const BigInt& g) {
  return bit_length(p) + bit_length(BigInt(2 * g)) + 1;
}

std::string_view to_string(BindingConstraint c) {
  switch (c) {
    case BindingConstraint::Packing: return "packing";
    case BindingConstraint::Security: return "security";
    case BindingConstraint::DecryptionFailure: return "decryption-failure";
  }
  return "?";
}

CongruentPrime ciphertext_modulus(int bits, std::uint64_t n, std::uint64_t p, const PieConfig& cfg) {
  // q = 1 (mod p) pins q mod p to 1, so the failure profile is shared by
  // every candidate q of this (n, p).
  return gen_prime_congruent(bits, BigInt(cfg.congruence_base(n)) * p);
}

PieStep evaluate_candidate(const LinearLayerParms& layer, std::uint64_t n, std::uint64_t p,
                           const BigInt& q, const PieConfig& cfg, NormCache& cache) {
  PieStep step;
  step.n = n;
  step.q_bits = bit_length(q);
  step.secure = security_gate(n, step.q_bits, cfg.table, cfg.lambda);
  if (cfg.delta >= 1.0) {
    step.failure = {0, 0, 0.0};
    return step;
  }
  CryptoParams cp;
  cp.n = n;
  cp.p = p;
  cp.q = q;
  cp.sigma = cfg.noise.sigma;
  step.failure = mc_failure_rate(layer, cp, cfg.mc_trials, cfg.seed, cfg.noise, cfg.jobs, &cache);
  return step;
}

namespace {

bool passes(const PieStep& s, const PieConfig& cfg) { return s.secure && s.failure.ucb95 < cfg.delta; }

constexpr std::int64_t kProbeTrials = 32;

// Failures are non-increasing in q and trial t draws from the same stream
// whatever the trial count, so if the first kProbeTrials trials already
// hold enough failures at the widest secure q to push ucb95 over delta,
// no secure q at this n passes. The full run would reach the same verdict.
bool hopeless(const LinearLayerParms& layer, std::uint64_t n, std::uint64_t p, const BigInt& q_max,
              const PieConfig& cfg, NormCache& memo) {
  if (cfg.delta >= 1.0 || cfg.mc_trials <= kProbeTrials) return false;
  std::int64_t needed = 0;
  while (clopper_pearson_upper(needed, cfg.mc_trials) < cfg.delta) ++needed;
  if (needed > kProbeTrials) return false;
  NoiseModel m = cfg.noise;
  const auto plan = output_plan(layer, n);
  const auto q_mod_p = static_cast<std::uint64_t>(q_max % p);
  const auto profile = memo.get(plan, p, q_mod_p, m, kProbeTrials, cfg.seed, cfg.jobs);
  return profile->failures(q_max / p) >= needed;
}

// Widest admissible q of at most `limit` bits, or none.
std::optional<CongruentPrime> widest_modulus(int limit, std::uint64_t n, std::uint64_t p,
                                             const PieConfig& cfg) {
  for (int b = limit; b > bit_length(p); --b) {
    auto c = ciphertext_modulus(b, n, p, cfg);
    if (c.bits <= limit) return c;
  }
  return std::nullopt;
}

}  // namespace

PieOutcome pie_search(const LinearLayerParms& layer, const PieConfig& cfg, NormCache* cache) {
  NormCache local;
  NormCache& memo = cache != nullptr ? *cache : local;
  std::uint64_t n_min = 0;
  try {
    n_min = min_ring_dimension(layer);
  } catch (const PackingError& e) {
    throw InfeasibleError(BindingConstraint::Packing, e.what());
  }
  const int p_bits = plaintext_bitwidth(layer);
  PieOutcome out;
  BindingConstraint binding = BindingConstraint::Packing;
  std::string why = "no candidate ring dimension packs the layer";
  for (const std::uint64_t n : cfg.n_candidates) {
    if (n < n_min) continue;
    const int limit = *cfg.table.max_log2_q(n, cfg.lambda);
    const auto p = gen_prime_congruent(p_bits, BigInt(cfg.congruence_base(n)));
    if (bit_length(p.value) > 62) {
      throw InfeasibleError(BindingConstraint::Packing, "plaintext modulus exceeds 62 bits");
    }
    const auto pv = static_cast<std::uint64_t>(p.value);
    const int q_floor = bit_length(BigInt(BigInt(cfg.congruence_base(n)) * pv + 1));
    if (q_floor > limit) {
      binding = BindingConstraint::Security;
      why = "n=" + std::to_string(n) + ": smallest admissible q (" + std::to_string(q_floor) +
            " bits) exceeds the " + std::to_string(limit) + "-bit security limit";
      continue;
    }
    const auto widest = widest_modulus(limit, n, pv, cfg);
    if (widest && hopeless(layer, n, pv, widest->value, cfg, memo)) {
      binding = BindingConstraint::DecryptionFailure;
      why = "n=" + std::to_string(n) + ": failure bound " + std::to_string(cfg.delta) +
            " not met by any q within the " + std::to_string(limit) + "-bit security limit";
      continue;
    }
    const int start = std::min(initial_q_estimate(layer, n, pv, cfg.noise), limit);
    auto q = ciphertext_modulus(start, n, pv, cfg);
    if (q.bits > limit) {
      binding = BindingConstraint::Security;
      why = "n=" + std::to_string(n) + ": no admissible q within the security limit";
      continue;
    }
    auto step = evaluate_candidate(layer, n, pv, q.value, cfg, memo);
    out.trace.push_back(step);
    // Raise q until the failure gate passes or security is exhausted.
    while (!passes(step, cfg)) {
      const int next_bits = q.bits + cfg.q_bit_step;
      if (next_bits > limit) break;
      q = ciphertext_modulus(next_bits, n, pv, cfg);
      if (q.bits > limit) break;
      step = evaluate_candidate(layer, n, pv, q.value, cfg, memo);
      out.trace.push_back(step);
    }
    if (!passes(step, cfg)) {
      binding = BindingConstraint::DecryptionFailure;
      why = "n=" + std::to_string(n) + ": failure bound " + std::to_string(cfg.delta) +
            " not met by any q within the " + std::to_string(limit) + "-bit security limit";
      continue;
    }
    // Tighten q while both gates hold; widths without an admissible prime
    // are skipped.
    for (int lower = q.bits - cfg.q_bit_step; lower > bit_length(pv); lower -= cfg.q_bit_step) {
      const auto cand = ciphertext_modulus(lower, n, pv, cfg);
      if (cand.bits >= q.bits) continue;
      const auto s = evaluate_candidate(layer, n, pv, cand.value, cfg, memo);
      out.trace.push_back(s);
      if (!passes(s, cfg)) break;
      q = cand;
      step = s;
      lower = q.bits;
    }
    out.params.n = n;
    out.params.p = pv;
    out.params.q = q.value;
    out.params.sigma = cfg.noise.sigma;
    out.params.security_bits = cfg.lambda;
    out.failure = step.failure;
    return out;
  }
  throw InfeasibleError(binding, "infeasible (" + std::string(to_string(binding)) + "): " + why);
}

CryptoParams pie_optimize(const LinearLayerParms& layer, const PieConfig& cfg, NormCache* cache) {
  return pie_search(layer, cfg, cache).params;
}

}  // namespace sinfer
