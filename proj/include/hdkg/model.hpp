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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hdkg/hdc.hpp"
#include "hdkg/kg_data.hpp"
#include "hdkg/rng.hpp"
#include "hdkg/tensor.hpp"

namespace hdkg {

/// How backward() maps score gradients onto the original embeddings.
enum class GradientMode {
  /// Exact chain rule, including the tanh derivative (1 - H^2).
  kReference,
  /// Accelerator dataflow: dH/de is taken as base^T (no tanh derivative).
  /// Routing is otherwise identical, so with an identity activation the two
  /// modes agree exactly.
  kHardware,
};

/// raw = bias - |R|_1 (kDistance, closer candidates score higher) or the
/// literal raw = |R|_1 + bias (kLiteral, kept for comparison only).
enum class ScoreSign { kDistance, kLiteral };

struct ModelConfig {
  std::size_t d = 128;
  std::size_t D = 256;
  std::uint64_t seed = 0;
  GradientMode mode = GradientMode::kReference;
  ScoreSign score_sign = ScoreSign::kDistance;
  Activation activation = Activation::kTanh;
  double init_scale = 0.1;
  bool freeze_bias = false;
};

/// Embeddings plus the tensors derived from them. Derived tensors carry the
/// embedding version they were computed from; mutate embeddings only through
/// touch() so staleness is tracked.
struct ModelState {
  ModelState() = default;
  /// Embeddings uniform in [-init_scale, init_scale] from the "init" stream;
  /// base matrix from the "base-matrix" stream.
  ModelState(const ModelConfig& cfg, std::size_t num_entities,
             std::size_t num_relations);

  ModelConfig config;
  Matrix e_v;  // |V| x d
  Matrix e_r;  // |R| x d
  BaseMatrix base;
  double bias = 0.0;

  Matrix H_v;  // |V| x D
  Matrix H_r;  // |R| x D
  Matrix M_v;  // |V| x D
  Matrix G;    // |V| x D, sum of each vertex's edge relation hypervectors

  std::uint64_t version = 1;
  std::uint64_t encoded_version = 0;
  std::uint64_t memory_version = 0;

  std::size_t num_entities() const noexcept { return e_v.rows(); }
  std::size_t num_relations() const noexcept { return e_r.rows(); }
  bool encoded_fresh() const noexcept { return encoded_version == version; }
  bool memory_fresh() const noexcept { return memory_version == version; }

  /// Call after changing e_v / e_r / bias.
  void touch() noexcept { ++version; }

  void encode();
  void memorize(const KnowledgeGraph& kg);
  void refresh(const KnowledgeGraph& kg) {
    encode();
    memorize(kg);
  }
};

struct Memorization {
  Matrix M_v;
  Matrix G;
};

/// M[i] = sum over (j, r) in N(i) of H_v[j] o H_r[r]; G[i] = sum of H_r[r].
Memorization memorize_edge_list(const KnowledgeGraph& kg, const Matrix& H_v,
                                const Matrix& H_r);

/// M = sum_r (A^r H_v) o E^r, E^r the row broadcast of H_r[r].
Matrix memorize_matrix_form(const KnowledgeGraph& kg, const Matrix& H_v,
                            const Matrix& H_r);

struct QueryBatch {
  std::vector<EntityId> subjects;
  std::vector<RelationId> relations;
  /// Known true tails per member (training labels); may be empty for eval.
  std::vector<std::vector<EntityId>> targets;

  std::size_t size() const noexcept { return subjects.size(); }
};

/// Read-only inputs to the score function. Robustness views substitute
/// reduced or quantized tables here.
struct ScoreView {
  const Matrix* M_v = nullptr;
  const Matrix* H_r = nullptr;
  double bias = 0.0;
  ScoreSign sign = ScoreSign::kDistance;
  /// Optional transform of each query vector M_v[s] + H_r[k] before scoring.
  std::function<void(std::span<double>)> query_transform;
};

ScoreView score_view(const ModelState& state);

/// Pre-sigmoid scores, |B| x |V|.
Matrix score_raw(const ScoreView& view, std::span<const EntityId> subjects,
                 std::span<const RelationId> relations);

double sigmoid(double x) noexcept;

enum class SignSource { kCached, kRecompute };

struct TrainingSignals {
  std::vector<EntityId> subjects;
  std::vector<RelationId> relations;
  std::size_t num_candidates = 0;
  std::size_t dim = 0;

  Matrix P;          // |B| x |V|
  Matrix raw_norms;  // |B| x |V|
  Matrix delta;      // |B| x |V|, filled by loss_and_delta

  /// sign(R) for every (member, candidate, dimension), row-major. Empty when
  /// sign_source is kRecompute.
  std::vector<std::int8_t> signs;
  SignSource sign_source = SignSource::kCached;

  /// Per member, sum over candidates of dN/dM_v[subject] and dN/dH_r[relation].
  Matrix subject_grad;   // |B| x D
  Matrix relation_grad;  // |B| x D

  std::uint64_t state_version = 0;

  std::size_t batch() const noexcept { return subjects.size(); }
  std::int8_t sign(std::size_t j, std::size_t c, std::size_t k) const {
    return signs[(j * num_candidates + c) * dim + k];
  }
};

/// Forward pass. With cache_signs the full sign tensor is kept for backward;
/// otherwise backward recomputes identical signs from the model state.
TrainingSignals score_batch(const QueryBatch& q, const ModelState& state,
                            bool cache_signs = true);

/// Mean binary cross-entropy against multi-hot targets smoothed as
/// y = (1 - eps) * y + eps / |V|. Fills signals.delta = (P - y) / (|B| |V|).
double loss_and_delta(TrainingSignals& signals,
                      const std::vector<std::vector<EntityId>>& targets,
                      double label_smoothing = 0.0);

struct Gradients {
  Matrix e_v;
  Matrix e_r;
  double bias = 0.0;
};

Gradients backward(const TrainingSignals& signals, const KnowledgeGraph& kg,
                   const ModelState& state);

/// Same result as backward(), processing candidate columns in blocks of
/// `chunk` so each block touches only its own vertices' memory gradients.
Gradients chunked_backward(const TrainingSignals& signals,
                           const KnowledgeGraph& kg, const ModelState& state,
                           std::size_t chunk);

std::vector<std::size_t> chunk_widths(std::size_t num_candidates,
                                      std::size_t chunk);

enum class OptimizerKind { kSgd, kMomentum, kAdagrad };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kSgd;
  double lr = 0.05;
  double momentum = 0.9;
  double epsilon = 1e-10;
};

class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig cfg) : cfg_(cfg) {}
  void step(ModelState& state, const Gradients& g);
  const OptimizerConfig& config() const noexcept { return cfg_; }

 private:
  void apply(std::vector<double>& x, const std::vector<double>& g,
             std::vector<double>& slot);

  OptimizerConfig cfg_;
  std::vector<double> slot_v_, slot_r_, slot_b_;
};

/// One 1-vs-all query per distinct (subject, relation) in the training split.
struct TrainingQueries {
  std::vector<EntityId> subjects;
  std::vector<RelationId> relations;
  std::vector<std::vector<EntityId>> tails;

  std::size_t size() const noexcept { return subjects.size(); }
};

TrainingQueries build_training_queries(const KnowledgeGraph& kg);

struct TrainConfig {
  std::size_t batch_size = 128;
  std::size_t chunk = 32;
  double label_smoothing = 0.1;
};

struct StageTimes {
  double encode = 0, memorize = 0, score = 0, loss = 0, backward = 0, update = 0;
};

struct EpochStats {
  double mean_loss = 0.0;
  std::size_t batches = 0;
  StageTimes seconds;
};

/// Requires a reciprocal-augmented graph. Per batch: encode, memorize, score,
/// loss, chunked backward, optimizer step. Batch order is drawn from rng.
EpochStats train_epoch(const KnowledgeGraph& kg, const TrainingQueries& queries,
                       ModelState& state, Optimizer& opt,
                       const TrainConfig& cfg, Rng& rng);

}  // namespace hdkg
