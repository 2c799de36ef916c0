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

#include "hdkg/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hdkg/error.hpp"
#include "hdkg/hdc.hpp"
#include "hdkg/rng.hpp"

namespace hdkg {

void FixedPointSpec::validate() const {
  if (total_bits < 2 || total_bits > 62)
    throw ArgumentError("fixed point: total bits must be in [2, 62], got " +
                        std::to_string(total_bits));
  if (frac_bits < 0 || frac_bits >= total_bits)
    throw ArgumentError("fixed point: fractional bits must be in [0, total bits), got " +
                        std::to_string(frac_bits));
}

double FixedPointSpec::step() const { return std::ldexp(1.0, -frac_bits); }

double FixedPointSpec::min_value() const {
  return -std::ldexp(1.0, total_bits - 1) * step();
}

double FixedPointSpec::max_value() const {
  return (std::ldexp(1.0, total_bits - 1) - 1.0) * step();
}

double quantize_fixed(double x, const FixedPointSpec& spec) {
  if (std::isnan(x)) throw NumericError("cannot quantize NaN");
  const double lo = -std::ldexp(1.0, spec.total_bits - 1);
  const double hi = std::ldexp(1.0, spec.total_bits - 1) - 1.0;
  // nearbyint honors the default round-to-nearest-even mode.
  double code = std::nearbyint(std::ldexp(x, spec.frac_bits));
  code = std::clamp(code, lo, hi);
  return std::ldexp(code, -spec.frac_bits);
}

void quantize_fixed_inplace(std::span<double> values, const FixedPointSpec& spec) {
  spec.validate();
  for (double& v : values) v = quantize_fixed(v, spec);
}

Matrix quantize_fixed(const Matrix& values, const FixedPointSpec& spec) {
  Matrix out = values;
  quantize_fixed_inplace(out.data(), spec);
  return out;
}

ScoreView QuantizedModel::view() const {
  ScoreView v{&M_v, &H_r, bias, sign, {}};
  const FixedPointSpec s = spec;
  v.query_transform = [s](std::span<double> q) {
    for (double& x : q) x = quantize_fixed(x, s);
  };
  return v;
}

QuantizedModel quantize_model(const ModelState& state, const KnowledgeGraph& kg,
                              const FixedPointSpec& spec) {
  spec.validate();
  if (kg.num_entities() != state.num_entities() || kg.num_relations() != state.num_relations())
    throw ShapeError("quantize_model: graph and model sizes differ");

  BaseMatrix base = state.base;
  base.data = quantize_fixed(base.data, spec);
  const Matrix ev = quantize_fixed(state.e_v, spec);
  const Matrix er = quantize_fixed(state.e_r, spec);

  QuantizedModel q;
  q.spec = spec;
  q.sign = state.config.score_sign;
  q.bias = quantize_fixed(state.bias, spec);
  q.H_v = quantize_fixed(encode(ev, base, state.config.activation), spec);
  q.H_r = quantize_fixed(encode(er, base, state.config.activation), spec);

  const std::size_t D = q.H_v.cols();
  q.M_v = Matrix(q.H_v.rows(), D);
  for (std::size_t i = 0; i < kg.num_entities(); ++i) {
    auto m = q.M_v.row(i);
    for (const Neighbor& n : kg.neighbors(static_cast<EntityId>(i))) {
      auto hv = q.H_v.row(n.vertex);
      auto hr = q.H_r.row(n.rel);
      for (std::size_t k = 0; k < D; ++k) m[k] += quantize_fixed(hv[k] * hr[k], spec);
    }
    for (double& x : m) x = quantize_fixed(x, spec);
  }
  return q;
}

std::vector<double> dimension_entropy(const Matrix& values, std::size_t bins) {
  if (bins == 0) throw ArgumentError("entropy: bin count must be positive");
  if (values.rows() < 2) throw ArgumentError("entropy: need at least two rows");
  const std::size_t n = values.rows();
  std::vector<double> out(values.cols(), 0.0);
  std::vector<std::size_t> counts(bins);
  for (std::size_t k = 0; k < values.cols(); ++k) {
    double lo = values(0, k), hi = values(0, k);
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, values(i, k));
      hi = std::max(hi, values(i, k));
    }
    if (!(hi > lo)) continue;
    std::fill(counts.begin(), counts.end(), 0);
    const double width = hi - lo;
    for (std::size_t i = 0; i < n; ++i) {
      auto b = static_cast<std::size_t>((values(i, k) - lo) / width * static_cast<double>(bins));
      ++counts[std::min(b, bins - 1)];
    }
    double h = 0.0;
    for (std::size_t c : counts) {
      if (c == 0) continue;
      const double p = static_cast<double>(c) / static_cast<double>(n);
      h -= p * std::log2(p);
    }
    out[k] = h;
  }
  return out;
}

std::size_t DimensionMask::kept() const {
  return static_cast<std::size_t>(std::count(keep.begin(), keep.end(), true));
}

std::vector<std::size_t> DimensionMask::kept_indices() const {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < keep.size(); ++k)
    if (keep[k]) idx.push_back(k);
  return idx;
}

DimensionMask make_drop_mask(const Matrix& M_v, double fraction, DropStrategy strategy,
                             std::uint64_t seed, std::size_t bins) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ArgumentError("drop fraction must be in (0, 1)");
  const std::size_t D = M_v.cols();
  const auto keep_count =
      static_cast<std::size_t>(std::ceil((1.0 - fraction) * static_cast<double>(D)));
  if (keep_count == 0) throw ArgumentError("drop fraction leaves no dimensions");

  DimensionMask mask;
  mask.entropy = dimension_entropy(M_v, bins);
  mask.keep.assign(D, true);
  std::vector<std::size_t> order(D);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (strategy == DropStrategy::kLowEntropy) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return mask.entropy[a] < mask.entropy[b];
    });
  } else {
    Rng rng = Rng::stream(seed, "drop-random");
    rng.shuffle(order);
  }
  for (std::size_t i = 0; i < D - keep_count; ++i) mask.keep[order[i]] = false;
  return mask;
}

Matrix select_columns(const Matrix& values, const DimensionMask& mask) {
  if (mask.keep.size() != values.cols()) throw ShapeError("dimension mask length mismatch");
  const auto idx = mask.kept_indices();
  Matrix out(values.rows(), idx.size());
  for (std::size_t i = 0; i < values.rows(); ++i)
    for (std::size_t k = 0; k < idx.size(); ++k) out(i, k) = values(i, idx[k]);
  return out;
}

ScoreView ReducedModel::view() const { return ScoreView{&M_v, &H_r, bias, sign, {}}; }

ReducedModel drop_dims(const ModelState& state, const DimensionMask& mask) {
  if (!state.memory_fresh()) throw StalenessError("drop_dims: memory hypervectors are stale");
  if (mask.kept() == 0) throw ArgumentError("dimension mask keeps nothing");
  ReducedModel r;
  r.M_v = select_columns(state.M_v, mask);
  r.H_r = select_columns(state.H_r, mask);
  r.bias = state.bias;
  r.sign = state.config.score_sign;
  return r;
}

}  // namespace hdkg
