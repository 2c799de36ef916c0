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

#include "hdkg/tensor.hpp"

namespace hdkg {

/// Fixed d x D Gaussian projection used by kernel encoding. Never trained.
struct BaseMatrix {
  std::size_t d = 0;
  std::size_t D = 0;
  std::uint64_t seed = 0;
  Matrix data;  // d x D
};

/// Draws every entry i.i.d. N(0, 1) from Rng(seed), row-major order.
BaseMatrix make_base_matrix(std::size_t d, std::size_t D, std::uint64_t seed);

enum class Activation { kTanh, kIdentity };

/// H = act(E * base). Each output entry is one dot product summed in index
/// order, so results do not depend on how rows are distributed over workers.
Matrix encode(const Matrix& embeddings, const BaseMatrix& base,
              Activation act = Activation::kTanh);

/// Elementwise (Hadamard) product.
std::vector<double> bind(std::span<const double> a, std::span<const double> b);

/// Elementwise sum; an empty list bundles to the zero vector of length dim.
std::vector<double> bundle(std::span<const std::vector<double>> vs,
                           std::size_t dim);

enum class SimilarityMetric { kCosine, kNegL1, kSignHamming };

double similarity(std::span<const double> a, std::span<const double> b,
                  SimilarityMetric metric);

}  // namespace hdkg
