// Copyright 2026 The hdkg Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hdkg/kg_data.hpp"
#include "hdkg/model.hpp"
#include "hdkg/tensor.hpp"

namespace hdkg {

/// Signed two's-complement fixed point with `frac_bits` fractional bits.
/// Rounds to nearest (ties to even) and saturates at the code range.
struct FixedPointSpec {
  int total_bits = 8;
  int frac_bits = 4;

  void validate() const;  // ArgumentError unless 2 <= total <= 62, 0 <= frac < total
  double step() const;
  double min_value() const;
  double max_value() const;
};

double quantize_fixed(double x, const FixedPointSpec& spec);
void quantize_fixed_inplace(std::span<double> values, const FixedPointSpec& spec);
Matrix quantize_fixed(const Matrix& values, const FixedPointSpec& spec);

/// Tables for scoring under post-training quantization. Embeddings, the base
/// matrix, hypervectors, every bound neighbor product, memory vectors, the
/// bias and each query vector are all rounded to the spec. Sums run in a wide
/// accumulator and are rounded once when stored.
struct QuantizedModel {
  FixedPointSpec spec;
  Matrix H_v;
  Matrix H_r;
  Matrix M_v;
  double bias = 0.0;
  ScoreSign sign = ScoreSign::kDistance;

  ScoreView view() const;
};

QuantizedModel quantize_model(const ModelState& state, const KnowledgeGraph& kg,
                              const FixedPointSpec& spec);

/// Shannon entropy (bits) of a `bins`-bin histogram of each column, bins
/// spanning that column's [min, max]. Constant columns have entropy 0.
std::vector<double> dimension_entropy(const Matrix& values, std::size_t bins = 32);

enum class DropStrategy { kLowEntropy, kRandom };

struct DimensionMask {
  std::vector<bool> keep;
  std::vector<double> entropy;

  std::size_t kept() const;
  std::vector<std::size_t> kept_indices() const;
};

/// Keeps ceil((1 - fraction) * D) dimensions. Low-entropy drops the columns of
/// M_v with the smallest entropy (lower index first on ties); random drops a
/// uniformly chosen subset drawn from the "drop-random" stream of `seed`.
DimensionMask make_drop_mask(const Matrix& M_v, double fraction, DropStrategy strategy,
                             std::uint64_t seed, std::size_t bins = 32);

/// Score tables restricted to the kept dimensions. Encoding and memorization
/// are unchanged; only the score function sees fewer dimensions.
struct ReducedModel {
  Matrix M_v;
  Matrix H_r;
  double bias = 0.0;
  ScoreSign sign = ScoreSign::kDistance;

  ScoreView view() const;
};

Matrix select_columns(const Matrix& values, const DimensionMask& mask);
ReducedModel drop_dims(const ModelState& state, const DimensionMask& mask);

}  // namespace hdkg
