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

#include "hdkg/hdc.hpp"

#include <cmath>

#include "hdkg/error.hpp"
#include "hdkg/rng.hpp"

namespace hdkg {

BaseMatrix make_base_matrix(std::size_t d, std::size_t D, std::uint64_t seed) {
  if (d == 0 || D == 0) throw ArgumentError("base matrix dimensions must be positive");
  BaseMatrix b{d, D, seed, Matrix(d, D)};
  Rng rng(seed);
  for (double& x : b.data.data()) x = rng.normal();
  return b;
}

Matrix encode(const Matrix& embeddings, const BaseMatrix& base, Activation act) {
  if (embeddings.cols() != base.d)
    throw ShapeError("encode: embedding width " + std::to_string(embeddings.cols()) +
                     " != base d " + std::to_string(base.d));
  const std::size_t rows = embeddings.rows();
  const std::size_t d = base.d;
  const std::size_t D = base.D;
  Matrix out(rows, D);
  for (std::size_t i = 0; i < rows; ++i) {
    auto e = embeddings.row(i);
    auto o = out.row(i);
    for (std::size_t m = 0; m < d; ++m) {
      const double em = e[m];
      auto b = base.data.row(m);
      for (std::size_t k = 0; k < D; ++k) o[k] += em * b[k];
    }
    if (act == Activation::kTanh)
      for (double& x : o) x = std::tanh(x);
  }
  return out;
}

std::vector<double> bind(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("bind: dimension mismatch");
  std::vector<double> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
  return out;
}

std::vector<double> bundle(std::span<const std::vector<double>> vs, std::size_t dim) {
  std::vector<double> out(dim, 0.0);
  for (const auto& v : vs) {
    if (v.size() != dim) throw ShapeError("bundle: mixed dimensions");
    for (std::size_t k = 0; k < dim; ++k) out[k] += v[k];
  }
  return out;
}

namespace {
int sign_of(double x) { return (x > 0) - (x < 0); }
}  // namespace

double similarity(std::span<const double> a, std::span<const double> b,
                  SimilarityMetric metric) {
  if (a.size() != b.size()) throw ShapeError("similarity: dimension mismatch");
  switch (metric) {
    case SimilarityMetric::kCosine: {
      double dot = 0, na = 0, nb = 0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        dot += a[k] * b[k];
        na += a[k] * a[k];
        nb += b[k] * b[k];
      }
      if (na == 0.0 || nb == 0.0)
        throw UndefinedSimilarityError("cosine similarity with a zero vector");
      double c = dot / (std::sqrt(na) * std::sqrt(nb));
      return std::clamp(c, -1.0, 1.0);
    }
    case SimilarityMetric::kNegL1: {
      double s = 0;
      for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
      return -s;
    }
    case SimilarityMetric::kSignHamming: {
      if (a.empty()) return 1.0;
      std::size_t same = 0;
      for (std::size_t k = 0; k < a.size(); ++k) same += sign_of(a[k]) == sign_of(b[k]);
      return static_cast<double>(same) / static_cast<double>(a.size());
    }
  }
  throw ArgumentError("unknown similarity metric");
}

}  // namespace hdkg
