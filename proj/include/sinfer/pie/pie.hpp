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

#ifndef SINFER_PIE_PIE_HPP
#define SINFER_PIE_PIE_HPP

// Parameter instantiation: plaintext modulus from the layer's bitwidth,
// ciphertext modulus from the failure simulation, ring dimension from the
// security table.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sinfer/core/model.hpp"
#include "sinfer/noise/error.hpp"
#include "sinfer/noise/failure.hpp"

namespace sinfer {

struct SecurityRow {
  std::uint64_t n = 0;
  int max_log2_q = 0;
  int security_bits = 0;
};

class SecurityTable {
 public:
  SecurityTable() = default;
  SecurityTable(std::vector<SecurityRow> rows, std::string secret = "ternary");

  /// 128/192/256-bit classical limits for ternary secrets.
  static SecurityTable standard();

  const std::vector<SecurityRow>& rows() const { return rows_; }
  const std::string& secret() const { return secret_; }
  std::optional<int> max_log2_q(std::uint64_t n, int lambda) const;
  /// Violations of "max_log2_q strictly increasing in n per security level".
  std::vector<std::string> check() const;

 private:
  std::vector<SecurityRow> rows_;
  std::string secret_ = "ternary";
};

SecurityTable security_table_from_json(const std::string& text);
SecurityTable load_security_table(const std::string& path);

/// pass iff log2_q <= max_log2_q(n) at lambda. Throws std::out_of_range
/// when the table has no row for (n, lambda).
bool security_gate(std::uint64_t n, int log2_q, const SecurityTable& table, int lambda = 128);

struct PieConfig {
  double delta = 1e-3;
  int lambda = 128;
  std::int64_t mc_trials = 10000;
  std::vector<std::uint64_t> n_candidates{1024, 2048, 4096, 8192, 16384};
  int q_bit_step = 1;
  /// Congruence modulus n instead of 2n.
  bool literal_mod_n = false;
  std::uint64_t seed = 1;
  NoiseModel noise;
  int jobs = 1;
  SecurityTable table = SecurityTable::standard();

  std::uint64_t congruence_base(std::uint64_t n) const { return literal_mod_n ? n : 2 * n; }
  /// Range checks for loaded configurations.
  std::vector<std::string> check() const;
};

/// l_i + l_f + ceil(log2(f_h * f_w)).
int plaintext_bitwidth(std::int64_t l_i, std::int64_t l_f, std::int64_t f_h, std::int64_t f_w);
int plaintext_bitwidth(const LinearLayerParms& layer);

struct CongruentPrime {
  BigInt value;
  int bits = 0;
  bool promoted = false;
};

/// Smallest prime = 1 (mod base) with bit length `bits`, promoting to wider
/// bit lengths when none exists. Requests below the narrowest feasible width
/// start there. Throws std::runtime_error after 2^20 candidates at one width.
CongruentPrime gen_prime_congruent(int bits, const BigInt& base);

/// Worst-case error magnitude G of the layer's output plan when q = 1 (mod p):
/// |E| + |K| bounded op by op.
BigInt worst_case_error(const LinearLayerParms& layer, std::uint64_t n, std::uint64_t p,
                        const NoiseModel& model);

/// bits(p) + bits(2G) + 1: any q of that width has delta > 2G, so decoding
/// cannot fail.
int q_bits_for_error(std::uint64_t p, const BigInt& g);
int initial_q_estimate(const LinearLayerParms& layer, std::uint64_t n, std::uint64_t p,
                       const NoiseModel& model);

enum class BindingConstraint { Packing, Security, DecryptionFailure };
std::string_view to_string(BindingConstraint c);

class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(BindingConstraint binding, std::string message)
      : std::runtime_error(std::move(message)), binding_(binding) {}
  BindingConstraint binding() const { return binding_; }

 private:
  BindingConstraint binding_;
};

struct PieStep {
  std::uint64_t n = 0;
  int q_bits = 0;
  bool secure = false;
  FailureResult failure;
};

struct PieOutcome {
  CryptoParams params;
  FailureResult failure;
  std::vector<PieStep> trace;
};

/// Candidate q of width `bits` for dimension n and plaintext modulus p:
/// q = 1 (mod lcm(congruence base, p)).
CongruentPrime ciphertext_modulus(int bits, std::uint64_t n, std::uint64_t p, const PieConfig& cfg);

/// Runs both gates on one candidate.
PieStep evaluate_candidate(const LinearLayerParms& layer, std::uint64_t n, std::uint64_t p,
                           const BigInt& q, const PieConfig& cfg, NormCache& cache);

PieOutcome pie_search(const LinearLayerParms& layer, const PieConfig& cfg, NormCache* cache = nullptr);
CryptoParams pie_optimize(const LinearLayerParms& layer, const PieConfig& cfg,
                          NormCache* cache = nullptr);

}  // namespace sinfer

#endif  // SINFER_PIE_PIE_HPP
