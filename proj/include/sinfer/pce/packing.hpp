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

#ifndef SINFER_PCE_PACKING_HPP
#define SINFER_PCE_PACKING_HPP

// Ciphertext packing model for linear layers: closed-form operation counts
// and the per-output-ciphertext plan the failure simulator executes.

#include <cstdint>
#include <stdexcept>

#include "sinfer/core/model.hpp"
#include "sinfer/noise/plan.hpp"

namespace sinfer {

inline constexpr std::uint64_t kMinRingDim = 1024;
inline constexpr std::uint64_t kMaxRingDim = 16384;

/// Layer does not fit the packing at the requested ring dimension.
class PackingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// FC geometry at ring dimension n. Rows are split into row blocks of at
/// most n rows when the padded output exceeds the slot count.
struct FcGeometry {
  std::int64_t n_i_pad = 0;
  std::int64_t blocks = 0;      // input ciphertexts
  std::int64_t row_blocks = 0;  // output ciphertexts
  std::int64_t rows_per_block = 0;
  std::int64_t last_rows = 0;
};

struct ConvGeometry {
  std::int64_t channels_per_ct = 0;
  std::int64_t ct_in = 0;
  std::int64_t ct_out = 0;
  std::int64_t sum_steps = 0;  // ceil(log2 channels_per_ct)
};

FcGeometry fc_geometry(const LinearLayerParms& layer, std::uint64_t n);
ConvGeometry conv_geometry(const LinearLayerParms& layer, std::uint64_t n);

/// log2(min(n, n_i') / rows'), clamped at 0.
std::int64_t fc_sum_steps(std::int64_t n_i_pad, std::int64_t rows, std::uint64_t n);

OpCounts fc_op_counts(const LinearLayerParms& layer, std::uint64_t n);
OpCounts conv_op_counts(const LinearLayerParms& layer, std::uint64_t n);
OpCounts linear_op_counts(const LinearLayerParms& layer, std::uint64_t n);

/// Smallest supported ring dimension that packs the layer.
std::uint64_t min_ring_dimension(const LinearLayerParms& layer);

/// Error DAG producing one output ciphertext, including the blinding
/// re-randomization. For FC this is the first (largest) row block.
LinearPlan output_plan(const LinearLayerParms& layer, std::uint64_t n);

}  // namespace sinfer

#endif  // SINFER_PCE_PACKING_HPP
