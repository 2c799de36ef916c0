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

#include "hdkg/model.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <numeric>

#include "hdkg/error.hpp"

namespace hdkg {

namespace {

inline std::int8_t sign_of(double x) noexcept {
  return static_cast<std::int8_t>((x > 0) - (x < 0));
}

// dN/d|R|: -1 when raw = bias - |R|_1, +1 for the literal form.
inline double norm_factor(ScoreSign s) noexcept {
  return s == ScoreSign::kDistance ? -1.0 : 1.0;
}

inline double combine(double bias, double l1, ScoreSign s) noexcept {
  return s == ScoreSign::kDistance ? bias - l1 : l1 + bias;
}

void check_ids(std::span<const EntityId> subjects,
               std::span<const RelationId> relations, std::size_t nv,
               std::size_t nr) {
  if (subjects.size() != relations.size())
    throw ArgumentError("query batch: subject/relation count mismatch");
  if (subjects.empty()) throw ArgumentError("query batch is empty");
  for (std::size_t j = 0; j < subjects.size(); ++j) {
    if (subjects[j] < 0 || static_cast<std::size_t>(subjects[j]) >= nv)
      throw ArgumentError("query subject id out of range: " + std::to_string(subjects[j]));
    if (relations[j] < 0 || static_cast<std::size_t>(relations[j]) >= nr)
      throw ArgumentError("query relation id out of range: " +
                          std::to_string(relations[j]));
  }
}

Matrix query_vectors(const Matrix& M_v, const Matrix& H_r,
                     std::span<const EntityId> subjects,
                     std::span<const RelationId> relations) {
  const std::size_t D = M_v.cols();
  Matrix q(subjects.size(), D);
  for (std::size_t j = 0; j < subjects.size(); ++j) {
    auto ms = M_v.row(subjects[j]);
    auto hr = H_r.row(relations[j]);
    auto out = q.row(j);
    for (std::size_t k = 0; k < D; ++k) out[k] = ms[k] + hr[k];
  }
  return q;
}

Matrix activation_backward(const Matrix& grad_h, const Matrix& H,
                           const ModelConfig& cfg) {
  Matrix g = grad_h;
  if (cfg.mode == GradientMode::kReference && cfg.activation == Activation::kTanh) {
    auto& gd = g.data();
    const auto& hd = H.data();
    for (std::size_t i = 0; i < gd.size(); ++i) gd[i] *= 1.0 - hd[i] * hd[i];
  }
  return g;
}

// grad_pre (rows x D) times base^T (D x d).
Matrix project_to_embedding(const Matrix& grad_pre, const BaseMatrix& base) {
  Matrix out(grad_pre.rows(), base.d);
  for (std::size_t i = 0; i < grad_pre.rows(); ++i) {
    auto g = grad_pre.row(i);
    auto o = out.row(i);
    for (std::size_t m = 0; m < base.d; ++m) {
      auto b = base.data.row(m);
      double s = 0.0;
      for (std::size_t k = 0; k < base.D; ++k) s += g[k] * b[k];
      o[m] = s;
    }
  }
  return out;
}

}  // namespace

ModelState::ModelState(const ModelConfig& cfg, std::size_t num_entities,
                       std::size_t num_relations)
    : config(cfg),
      e_v(num_entities, cfg.d),
      e_r(num_relations, cfg.d),
      base(make_base_matrix(cfg.d, cfg.D, stream_seed(cfg.seed, "base-matrix"))) {
  Rng init = Rng::stream(cfg.seed, "init");
  for (double& x : e_v.data()) x = init.uniform(-cfg.init_scale, cfg.init_scale);
  for (double& x : e_r.data()) x = init.uniform(-cfg.init_scale, cfg.init_scale);
}

void ModelState::encode() {
  H_v = hdkg::encode(e_v, base, config.activation);
  H_r = hdkg::encode(e_r, base, config.activation);
  encoded_version = version;
}

void ModelState::memorize(const KnowledgeGraph& kg) {
  if (!encoded_fresh()) throw StalenessError("memorize: hypervectors are stale");
  if (kg.num_entities() != num_entities() || kg.num_relations() != num_relations())
    throw ShapeError("memorize: graph and model sizes differ");
  auto m = memorize_edge_list(kg, H_v, H_r);
  M_v = std::move(m.M_v);
  G = std::move(m.G);
  memory_version = version;
}

Memorization memorize_edge_list(const KnowledgeGraph& kg, const Matrix& H_v,
                                const Matrix& H_r) {
  if (H_v.rows() != kg.num_entities() || H_r.rows() != kg.num_relations() ||
      H_v.cols() != H_r.cols())
    throw ShapeError("memorize_edge_list: hypervector shapes do not match graph");
  const std::size_t D = H_v.cols();
  Memorization out{Matrix(H_v.rows(), D), Matrix(H_v.rows(), D)};
  for (std::size_t i = 0; i < kg.num_entities(); ++i) {
    auto m = out.M_v.row(i);
    auto g = out.G.row(i);
    for (const Neighbor& n : kg.neighbors(static_cast<EntityId>(i))) {
      auto hv = H_v.row(n.vertex);
      auto hr = H_r.row(n.rel);
      for (std::size_t k = 0; k < D; ++k) {
        m[k] += hv[k] * hr[k];
        g[k] += hr[k];
      }
    }
  }
  return out;
}

Matrix memorize_matrix_form(const KnowledgeGraph& kg, const Matrix& H_v,
                            const Matrix& H_r) {
  if (H_v.rows() != kg.num_entities() || H_r.rows() != kg.num_relations() ||
      H_v.cols() != H_r.cols())
    throw ShapeError("memorize_matrix_form: hypervector shapes do not match graph");
  const std::size_t D = H_v.cols();
  Matrix M(H_v.rows(), D);
  std::vector<double> agg(D);
  for (std::size_t r = 0; r < kg.num_relations(); ++r) {
    const RelationCsr& a = kg.csr()[r];
    auto e = H_r.row(r);
    for (std::size_t i = 0; i < kg.num_entities(); ++i) {
      auto cols = a.row(static_cast<EntityId>(i));
      if (cols.empty()) continue;
      // (A^r H_v)[i]
      std::fill(agg.begin(), agg.end(), 0.0);
      for (EntityId j : cols) {
        auto hv = H_v.row(j);
        for (std::size_t k = 0; k < D; ++k) agg[k] += hv[k];
      }
      auto m = M.row(i);
      for (std::size_t k = 0; k < D; ++k) m[k] += agg[k] * e[k];
    }
  }
  return M;
}

ScoreView score_view(const ModelState& state) {
  if (!state.memory_fresh()) throw StalenessError("memory hypervectors are stale");
  return ScoreView{&state.M_v, &state.H_r, state.bias, state.config.score_sign, {}};
}

double sigmoid(double x) noexcept {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix score_raw(const ScoreView& view, std::span<const EntityId> subjects,
                 std::span<const RelationId> relations) {
  const Matrix& M = *view.M_v;
  check_ids(subjects, relations, M.rows(), view.H_r->rows());
  Matrix q = query_vectors(M, *view.H_r, subjects, relations);
  if (view.query_transform)
    for (std::size_t j = 0; j < q.rows(); ++j) view.query_transform(q.row(j));

  const std::size_t nv = M.rows();
  const std::size_t D = M.cols();
  Matrix raw(subjects.size(), nv);
  for (std::size_t j = 0; j < subjects.size(); ++j) {
    auto qj = q.row(j);
    for (std::size_t c = 0; c < nv; ++c) {
      auto mc = M.row(c);
      double l1 = 0.0;
      for (std::size_t k = 0; k < D; ++k) l1 += std::abs(qj[k] - mc[k]);
      raw(j, c) = combine(view.bias, l1, view.sign);
    }
  }
  return raw;
}

TrainingSignals score_batch(const QueryBatch& batch, const ModelState& state,
                            bool cache_signs) {
  if (!state.memory_fresh()) throw StalenessError("score_batch: memory hypervectors are stale");
  check_ids(batch.subjects, batch.relations, state.num_entities(), state.num_relations());

  const std::size_t B = batch.size();
  const std::size_t nv = state.num_entities();
  const std::size_t D = state.M_v.cols();
  const ScoreSign sgn = state.config.score_sign;
  const double nf = norm_factor(sgn);

  TrainingSignals s;
  s.subjects = batch.subjects;
  s.relations = batch.relations;
  s.num_candidates = nv;
  s.dim = D;
  s.P = Matrix(B, nv);
  s.raw_norms = Matrix(B, nv);
  s.subject_grad = Matrix(B, D);
  s.relation_grad = Matrix(B, D);
  s.sign_source = cache_signs ? SignSource::kCached : SignSource::kRecompute;
  if (cache_signs) s.signs.assign(B * nv * D, 0);
  s.state_version = state.version;

  Matrix q = query_vectors(state.M_v, state.H_r, batch.subjects, batch.relations);
  for (std::size_t j = 0; j < B; ++j) {
    auto qj = q.row(j);
    auto sub = s.subject_grad.row(j);
    auto rel = s.relation_grad.row(j);
    for (std::size_t c = 0; c < nv; ++c) {
      auto mc = state.M_v.row(c);
      std::int8_t* sg = cache_signs ? &s.signs[(j * nv + c) * D] : nullptr;
      double l1 = 0.0;
      for (std::size_t k = 0; k < D; ++k) {
        const double r = qj[k] - mc[k];
        l1 += std::abs(r);
        const std::int8_t si = sign_of(r);
        if (sg) sg[k] = si;
        // dN/dR = nf * sign(R); R = M[s] + H_r[k] - M[c].
        sub[k] += nf * si;  // dR/dM[s] = +1
        rel[k] += nf * si;  // dR/dH_r[k] = +1
      }
      const double raw = combine(state.bias, l1, sgn);
      s.raw_norms(j, c) = raw;
      s.P(j, c) = sigmoid(raw);
    }
  }
  return s;
}

namespace {

double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

double bce(double p, double raw, double y) {
  if (std::isfinite(raw)) {
    // softplus(raw) - y * raw, the logit form of -[y ln p + (1-y) ln(1-p)].
    const double sp = raw > 0 ? raw + std::log1p(std::exp(-raw)) : std::log1p(std::exp(raw));
    return sp - y * raw;
  }
  return -(xlogy(y, p) + xlogy(1.0 - y, 1.0 - p));
}

}  // namespace

double loss_and_delta(TrainingSignals& signals,
                      const std::vector<std::vector<EntityId>>& targets,
                      double label_smoothing) {
  const std::size_t B = signals.batch();
  const std::size_t nv = signals.num_candidates;
  if (targets.size() != B) throw ArgumentError("loss: one target list per batch member required");
  if (label_smoothing < 0.0 || label_smoothing >= 1.0)
    throw ArgumentError("label smoothing must be in [0, 1)");

  Matrix y(B, nv, label_smoothing / static_cast<double>(nv));
  for (std::size_t j = 0; j < B; ++j) {
    for (EntityId t : targets[j]) {
      if (t < 0 || static_cast<std::size_t>(t) >= nv)
        throw ArgumentError("target id out of range: " + std::to_string(t));
      y(j, t) = (1.0 - label_smoothing) + label_smoothing / static_cast<double>(nv);
    }
  }

  const double scale = 1.0 / (static_cast<double>(B) * static_cast<double>(nv));
  signals.delta = Matrix(B, nv);
  double total = 0.0;
  for (std::size_t j = 0; j < B; ++j) {
    for (std::size_t c = 0; c < nv; ++c) {
      const double p = signals.P(j, c);
      total += bce(p, signals.raw_norms(j, c), y(j, c));
      signals.delta(j, c) = (p - y(j, c)) * scale;
    }
  }
  const double loss = total * scale;
  if (std::isnan(loss)) throw NumericError("loss is NaN");
  return loss;
}

std::vector<std::size_t> chunk_widths(std::size_t num_candidates, std::size_t chunk) {
  if (chunk == 0) throw ArgumentError("chunk size must be positive");
  std::vector<std::size_t> w;
  for (std::size_t c = 0; c < num_candidates; c += chunk)
    w.push_back(std::min(chunk, num_candidates - c));
  return w;
}

Gradients chunked_backward(const TrainingSignals& signals, const KnowledgeGraph& kg,
                           const ModelState& state, std::size_t chunk) {
  const auto widths = chunk_widths(signals.num_candidates, chunk);
  const std::size_t B = signals.batch();
  const std::size_t nv = signals.num_candidates;
  const std::size_t D = signals.dim;

  if (signals.state_version != state.version || !state.memory_fresh())
    throw StalenessError("backward: model changed since the forward pass");
  if (state.G.rows() != nv || state.G.cols() != D)
    throw StalenessError("backward: memorization gradient G was not cached");
  if (signals.sign_source == SignSource::kCached && signals.signs.size() != B * nv * D)
    throw StalenessError("backward: sign cache S is missing");
  if (signals.delta.rows() != B || signals.delta.cols() != nv)
    throw StalenessError("backward: delta has not been computed");

  const double nf = norm_factor(state.config.score_sign);
  const bool recompute = signals.sign_source == SignSource::kRecompute;
  Matrix q;
  if (recompute) q = query_vectors(state.M_v, state.H_r, signals.subjects, signals.relations);

  // dL/dM_v from the candidate side, and per-member Q_j = sum_c delta * dN/dR.
  Matrix gM(nv, D);
  Matrix Q(B, D);
  std::vector<std::int8_t> sbuf(D);
  std::size_t c0 = 0;
  for (std::size_t width : widths) {
    for (std::size_t c = c0; c < c0 + width; ++c) {
      auto gmc = gM.row(c);
      auto mc = state.M_v.row(c);
      for (std::size_t j = 0; j < B; ++j) {
        const double w = signals.delta(j, c) * nf;
        if (w == 0.0) continue;
        const std::int8_t* sg;
        if (recompute) {
          auto qj = q.row(j);
          for (std::size_t k = 0; k < D; ++k) sbuf[k] = sign_of(qj[k] - mc[k]);
          sg = sbuf.data();
        } else {
          sg = &signals.signs[(j * nv + c) * D];
        }
        auto qacc = Q.row(j);
        for (std::size_t k = 0; k < D; ++k) {
          if (sg[k] == 0) continue;
          const double v = sg[k] > 0 ? w : -w;
          gmc[k] -= v;  // dR/dM[c] = -1
          qacc[k] += v;
        }
      }
    }
    c0 += width;
  }

  Matrix gHr(state.num_relations(), D);
  for (std::size_t j = 0; j < B; ++j) {
    auto qj = Q.row(j);
    auto gs = gM.row(signals.subjects[j]);
    for (std::size_t k = 0; k < D; ++k) gs[k] += qj[k];
  }
  // The score adds M[s] and H_r[k], so the relation reuses the subject's Q_j.
  for (std::size_t j = 0; j < B; ++j) {
    auto src = Q.row(j);
    auto gr = gHr.row(signals.relations[j]);
    for (std::size_t k = 0; k < D; ++k) gr[k] += src[k];
  }

  // Through memorization: M[i] = sum H_v[j] o H_r[r].
  Matrix gHv(state.num_entities(), D);
  for (std::size_t i = 0; i < nv; ++i) {
    auto gi = gM.row(i);
    for (const Neighbor& n : kg.neighbors(static_cast<EntityId>(i))) {
      auto hr = state.H_r.row(n.rel);
      auto hv = state.H_v.row(n.vertex);
      auto gv = gHv.row(n.vertex);
      auto gr = gHr.row(n.rel);
      for (std::size_t k = 0; k < D; ++k) {
        gv[k] += gi[k] * hr[k];
        gr[k] += gi[k] * hv[k];
      }
    }
  }

  Gradients out;
  out.e_v = project_to_embedding(activation_backward(gHv, state.H_v, state.config), state.base);
  out.e_r = project_to_embedding(activation_backward(gHr, state.H_r, state.config), state.base);
  if (!state.config.freeze_bias) {
    double b = 0.0;
    for (double x : signals.delta.data()) b += x;
    out.bias = b;
  }
  return out;
}

Gradients backward(const TrainingSignals& signals, const KnowledgeGraph& kg,
                   const ModelState& state) {
  return chunked_backward(signals, kg, state, std::max<std::size_t>(1, signals.num_candidates));
}

void Optimizer::apply(std::vector<double>& x, const std::vector<double>& g,
                      std::vector<double>& slot) {
  if (slot.size() != x.size()) slot.assign(x.size(), 0.0);
  switch (cfg_.kind) {
    case OptimizerKind::kSgd:
      for (std::size_t i = 0; i < x.size(); ++i) x[i] -= cfg_.lr * g[i];
      break;
    case OptimizerKind::kMomentum:
      for (std::size_t i = 0; i < x.size(); ++i) {
        slot[i] = cfg_.momentum * slot[i] + g[i];
        x[i] -= cfg_.lr * slot[i];
      }
      break;
    case OptimizerKind::kAdagrad:
      for (std::size_t i = 0; i < x.size(); ++i) {
        slot[i] += g[i] * g[i];
        x[i] -= cfg_.lr * g[i] / (std::sqrt(slot[i]) + cfg_.epsilon);
      }
      break;
  }
}

void Optimizer::step(ModelState& state, const Gradients& g) {
  if (g.e_v.rows() != state.e_v.rows() || g.e_r.rows() != state.e_r.rows())
    throw ShapeError("optimizer: gradient shape mismatch");
  apply(state.e_v.data(), g.e_v.data(), slot_v_);
  apply(state.e_r.data(), g.e_r.data(), slot_r_);
  if (!state.config.freeze_bias) {
    std::vector<double> b{state.bias};
    apply(b, {g.bias}, slot_b_);
    state.bias = b[0];
  }
  state.touch();
}

TrainingQueries build_training_queries(const KnowledgeGraph& kg) {
  std::map<std::pair<EntityId, RelationId>, std::vector<EntityId>> groups;
  for (const Triple& t : kg.train()) groups[{t.head, t.rel}].push_back(t.tail);
  TrainingQueries q;
  for (auto& [key, tails] : groups) {
    std::sort(tails.begin(), tails.end());
    tails.erase(std::unique(tails.begin(), tails.end()), tails.end());
    q.subjects.push_back(key.first);
    q.relations.push_back(key.second);
    q.tails.push_back(std::move(tails));
  }
  return q;
}

EpochStats train_epoch(const KnowledgeGraph& kg, const TrainingQueries& queries,
                       ModelState& state, Optimizer& opt, const TrainConfig& cfg,
                       Rng& rng) {
  if (!kg.reciprocal()) throw ArgumentError("training requires a reciprocal-augmented graph");
  if (cfg.batch_size == 0) throw ArgumentError("batch size must be positive");
  if (cfg.chunk == 0) throw ArgumentError("chunk size must be positive");

  using clock = std::chrono::steady_clock;
  auto seconds_since = [](clock::time_point t0) {
    return std::chrono::duration<double>(clock::now() - t0).count();
  };

  std::vector<std::size_t> order(queries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);

  EpochStats stats;
  double weighted = 0.0;
  std::size_t members = 0;
  for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
    const std::size_t end = std::min(order.size(), start + cfg.batch_size);
    QueryBatch batch;
    for (std::size_t i = start; i < end; ++i) {
      batch.subjects.push_back(queries.subjects[order[i]]);
      batch.relations.push_back(queries.relations[order[i]]);
      batch.targets.push_back(queries.tails[order[i]]);
    }

    auto t0 = clock::now();
    state.encode();
    stats.seconds.encode += seconds_since(t0);

    t0 = clock::now();
    state.memorize(kg);
    stats.seconds.memorize += seconds_since(t0);

    t0 = clock::now();
    TrainingSignals sig = score_batch(batch, state, /*cache_signs=*/false);
    stats.seconds.score += seconds_since(t0);

    t0 = clock::now();
    const double loss = loss_and_delta(sig, batch.targets, cfg.label_smoothing);
    stats.seconds.loss += seconds_since(t0);

    t0 = clock::now();
    Gradients g = chunked_backward(sig, kg, state, cfg.chunk);
    stats.seconds.backward += seconds_since(t0);

    t0 = clock::now();
    opt.step(state, g);
    stats.seconds.update += seconds_since(t0);

    weighted += loss * static_cast<double>(batch.size());
    members += batch.size();
    ++stats.batches;
  }
  stats.mean_loss = members ? weighted / static_cast<double>(members) : 0.0;
  return stats;
}

}  // namespace hdkg
