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

// Acceptance runner: one PASS / FAIL / SKIP line per criterion. Exits nonzero
// only when a criterion fails.
//
// Dataset-backed criteria read HDKG_DATA_ROOT/<name>/{train,valid,test}.txt.
// The multi-hour training criteria additionally need HDKG_ACCEPT_EXTENDED=1.
// Without the datasets, the scheduler/cache/latency criteria are exercised on
// synthetic graphs with the same vertex, relation and triple counts; those
// results are printed for information and the line is marked SKIP unless an
// invariant breaks (which is a FAIL regardless of the data).

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "hdkg/accel_sim.hpp"
#include "hdkg/error.hpp"
#include "hdkg/eval.hpp"
#include "hdkg/hdc.hpp"
#include "hdkg/model.hpp"
#include "hdkg/robustness.hpp"
#include "hdkg/run.hpp"
#include "hdkg/synthetic.hpp"

namespace {

using namespace hdkg;
namespace fs = std::filesystem;

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

Outcome verdict(bool ok, std::string detail) {
  return {ok ? Status::kPass : Status::kFail, std::move(detail)};
}

struct TempDir {
  TempDir() {
    static int n = 0;
    path = fs::temp_directory_path() /
           ("hdkg_accept_" + std::to_string(::getpid()) + "_" + std::to_string(n++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path path;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::optional<fs::path> dataset_dir(const std::string& name) {
  const char* root = std::getenv("HDKG_DATA_ROOT");
  if (!root || !*root) return std::nullopt;
  const fs::path dir = fs::path(root) / name;
  if (!fs::exists(dir / "train.txt")) return std::nullopt;
  return dir;
}

bool extended_enabled() {
  const char* v = std::getenv("HDKG_ACCEPT_EXTENDED");
  return v && std::string(v) == "1";
}

// Vertex, relation and training-triple counts of the public benchmarks.
struct BenchmarkShape {
  const char* name;
  std::size_t entities, relations, train;
};
constexpr BenchmarkShape kFb{"FB15K-237", 14541, 237, 272115};
constexpr BenchmarkShape kWn{"WN18RR", 40943, 11, 86835};
constexpr BenchmarkShape kYago{"YAGO3-10", 123182, 37, 1079040};

struct Graph {
  KnowledgeGraph kg;
  bool real = false;
};

Graph benchmark_graph(const BenchmarkShape& b) {
  if (auto dir = dataset_dir(b.name)) return {add_reciprocal(load_dataset(*dir)), true};
  synthetic::PowerLawSpec spec;
  spec.entities = b.entities;
  spec.relations = b.relations;
  spec.train = b.train;
  spec.seed = 1;
  return {add_reciprocal(synthetic::power_law_graph(spec)), false};
}

// ---------------------------------------------------------------- 1
double loss_of(const KnowledgeGraph& kg, ModelState& s, const QueryBatch& q, double eps) {
  s.touch();
  s.refresh(kg);
  auto sig = score_batch(q, s);
  return loss_and_delta(sig, q.targets, eps);
}

Outcome gradient_check() {
  const auto kg = synthetic::random_graph(20, 3, 4, 5);
  ModelConfig cfg;
  cfg.d = 8;
  cfg.D = 32;
  cfg.seed = 5;
  cfg.init_scale = 0.5;
  ModelState s(cfg, 20, 3);
  s.bias = 0.3;
  s.refresh(kg);
  QueryBatch q;
  Rng rng(99);
  for (int j = 0; j < 4; ++j) {
    q.subjects.push_back(static_cast<EntityId>(rng.below(20)));
    q.relations.push_back(static_cast<RelationId>(rng.below(3)));
    q.targets.push_back({static_cast<EntityId>(rng.below(20))});
  }
  const double eps = 0.1;
  auto sig = score_batch(q, s);
  loss_and_delta(sig, q.targets, eps);
  const Gradients g = backward(sig, kg, s);

  const double h = 1e-5;
  std::vector<double> analytic, numeric;
  auto probe = [&](double& x, double a) {
    const double keep = x;
    x = keep + h;
    const double up = loss_of(kg, s, q, eps);
    x = keep - h;
    const double dn = loss_of(kg, s, q, eps);
    x = keep;
    analytic.push_back(a);
    numeric.push_back((up - dn) / (2 * h));
  };
  for (std::size_t i = 0; i < s.e_v.size(); ++i) probe(s.e_v.data()[i], g.e_v.data()[i]);
  for (std::size_t i = 0; i < s.e_r.size(); ++i) probe(s.e_r.data()[i], g.e_r.data()[i]);
  probe(s.bias, g.bias);

  double scale = 0.0;
  for (double a : analytic) scale = std::max(scale, std::abs(a));
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-3 * scale});
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
  }
  return verdict(worst < 1e-4, fmt("max relative error %.3g over %zu parameters (bound 1e-4)",
                                   worst, analytic.size()));
}

// ---------------------------------------------------------------- 2
Outcome memorization_equivalence() {
  double worst = 0.0;
  Rng rng(2024);
  for (int t = 0; t < 100; ++t) {
    const std::size_t nv = 2 + rng.below(49), nr = 1 + rng.below(5);
    std::vector<Triple> triples;
    const std::size_t ne = rng.below(4 * nv);
    for (std::size_t e = 0; e < ne; ++e)
      triples.push_back({static_cast<EntityId>(rng.below(nv)), static_cast<RelationId>(rng.below(nr)),
                         static_cast<EntityId>(rng.below(nv))});
    const auto kg = KnowledgeGraph::from_ids(nv, nr, triples);
    const std::size_t D = 16 + rng.below(48);
    Matrix Hv(nv, D), Hr(nr, D);
    for (double& x : Hv.data()) x = rng.uniform(-1, 1);
    for (double& x : Hr.data()) x = rng.uniform(-1, 1);
    const auto a = memorize_edge_list(kg, Hv, Hr).M_v;
    const auto b = memorize_matrix_form(kg, Hv, Hr);
    for (std::size_t i = 0; i < a.size(); ++i)
      worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  }
  return verdict(worst <= 1e-10, fmt("max |edge-list - matrix form| = %.3g over 100 graphs (bound 1e-10)", worst));
}

// ---------------------------------------------------------------- 3
Outcome chunked_equivalence() {
  const auto kg = add_reciprocal(synthetic::random_graph(40, 3, 4, 8));
  ModelConfig cfg;
  cfg.d = 8;
  cfg.D = 48;
  cfg.seed = 8;
  cfg.init_scale = 0.5;
  ModelState s(cfg, kg.num_entities(), kg.num_relations());
  s.refresh(kg);
  QueryBatch q;
  Rng rng(3);
  for (int j = 0; j < 6; ++j) {
    q.subjects.push_back(static_cast<EntityId>(rng.below(40)));
    q.relations.push_back(static_cast<RelationId>(rng.below(kg.num_relations())));
    q.targets.push_back({static_cast<EntityId>(rng.below(40))});
  }
  auto sig = score_batch(q, s);
  loss_and_delta(sig, q.targets, 0.1);
  const Gradients mono = backward(sig, kg, s);
  double worst = 0.0;
  for (std::size_t T : {std::size_t{1}, std::size_t{7}, kg.num_entities()}) {
    const Gradients c = chunked_backward(sig, kg, s, T);
    for (std::size_t i = 0; i < mono.e_v.size(); ++i)
      worst = std::max(worst, std::abs(mono.e_v.data()[i] - c.e_v.data()[i]));
    for (std::size_t i = 0; i < mono.e_r.size(); ++i)
      worst = std::max(worst, std::abs(mono.e_r.data()[i] - c.e_r.data()[i]));
    worst = std::max(worst, std::abs(mono.bias - c.bias));
  }
  return verdict(worst <= 1e-12, fmt("max |chunked - monolithic| = %.3g for T in {1, 7, |V|} (bound 1e-12)", worst));
}

// ---------------------------------------------------------------- 4
double cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ab += a[k] * b[k];
    aa += a[k] * a[k];
    bb += b[k] * b[k];
  }
  return ab / std::sqrt(aa * bb);
}

Outcome reconstruction() {
  std::size_t above = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto kg = synthetic::random_graph(50, 3, 5, seed);
    ModelConfig cfg;
    cfg.d = 32;
    cfg.D = 8192;
    cfg.seed = seed;
    ModelState s(cfg, 50, 3);
    s.refresh(kg);
    for (EntityId i = 0; i < 50; ++i) {
      const auto nb = kg.neighbors(i);
      for (const auto& n : nb) {
        std::vector<double> bound(cfg.D);
        auto score = [&](EntityId j) {
          for (std::size_t k = 0; k < cfg.D; ++k) bound[k] = s.H_v(j, k) * s.H_r(n.rel, k);
          return cosine(s.M_v.row(i), bound);
        };
        std::vector<double> others;
        for (EntityId j = 0; j < 50; ++j) {
          const bool linked = std::any_of(nb.begin(), nb.end(), [&](const Neighbor& m) {
            return m.vertex == j && m.rel == n.rel;
          });
          if (!linked) others.push_back(score(j));
        }
        std::sort(others.begin(), others.end());
        const std::size_t m = others.size();
        const double median = m % 2 ? others[m / 2] : 0.5 * (others[m / 2 - 1] + others[m / 2]);
        above += score(n.vertex) > median;
        ++total;
      }
    }
  }
  const double frac = static_cast<double>(above) / static_cast<double>(total);
  return verdict(frac >= 0.95, fmt("%.4f of %zu true (j, r) pairs score above the median non-neighbor (bound 0.95)", frac, total));
}

// ---------------------------------------------------------------- 5
Outcome forward_caching() {
  const auto kg = add_reciprocal(synthetic::random_graph(30, 3, 5, 12));
  ModelConfig cfg;
  cfg.d = 8;
  cfg.D = 64;
  cfg.seed = 12;
  cfg.init_scale = 0.5;
  ModelState s(cfg, kg.num_entities(), kg.num_relations());
  s.refresh(kg);
  QueryBatch q;
  Rng rng(4);
  for (int j = 0; j < 8; ++j) {
    q.subjects.push_back(static_cast<EntityId>(rng.below(30)));
    q.relations.push_back(static_cast<RelationId>(rng.below(kg.num_relations())));
    q.targets.push_back({});
  }
  const auto sig = score_batch(q, s, true);
  const std::size_t nv = kg.num_entities(), D = cfg.D;
  std::size_t sign_mismatch = 0, sum_mismatch = 0, g_mismatch = 0, equal_mismatch = 0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    std::vector<double> naive(D, 0.0);
    for (std::size_t c = 0; c < nv; ++c) {
      for (std::size_t k = 0; k < D; ++k) {
        const double r = s.M_v(q.subjects[j], k) + s.H_r(q.relations[j], k) - s.M_v(c, k);
        const int sg = (r > 0) - (r < 0);
        sign_mismatch += sig.sign(j, c, k) != sg;
        naive[k] -= sg;  // raw = bias - |R|_1
      }
    }
    for (std::size_t k = 0; k < D; ++k) {
      sum_mismatch += sig.subject_grad(j, k) != naive[k];
      equal_mismatch += sig.subject_grad(j, k) != sig.relation_grad(j, k);
    }
  }
  for (std::size_t i = 0; i < nv; ++i) {
    std::vector<double> g(D, 0.0);
    for (const auto& n : kg.neighbors(static_cast<EntityId>(i)))
      for (std::size_t k = 0; k < D; ++k) g[k] += s.H_r(n.rel, k);
    for (std::size_t k = 0; k < D; ++k) g_mismatch += s.G(i, k) != g[k];
  }
  const bool ok = !sign_mismatch && !sum_mismatch && !g_mismatch && !equal_mismatch;
  return verdict(ok, fmt("mismatches: signs %zu, per-member sums %zu, G %zu, subject vs relation %zu",
                         sign_mismatch, sum_mismatch, g_mismatch, equal_mismatch));
}

// ---------------------------------------------------------------- 6, 7
struct FbTraining {
  bool attempted = false;
  std::string skip_reason;
  std::vector<double> losses;
  double mrr = 0.0;
  std::optional<ModelState> state;
  std::optional<KnowledgeGraph> kg;
};

FbTraining& fb_training() {
  static FbTraining t = [] {
    FbTraining r;
    const auto dir = dataset_dir(kFb.name);
    if (!dir) {
      r.skip_reason = "FB15K-237 not found under HDKG_DATA_ROOT";
      return r;
    }
    if (!extended_enabled()) {
      r.skip_reason = "extended run (hours); set HDKG_ACCEPT_EXTENDED=1";
      return r;
    }
    r.attempted = true;
    r.kg = add_reciprocal(load_dataset(*dir));
    run::RunConfig cfg;
    cfg.load_file(fs::path(HDKG_SOURCE_DIR) / "presets" / "fb15k237.cfg");
    ModelState s(cfg.model_config(), r.kg->num_entities(), r.kg->num_relations());
    Optimizer opt({cfg.optimizer == "adagrad" ? OptimizerKind::kAdagrad : OptimizerKind::kSgd, cfg.lr});
    TrainConfig tc{cfg.batch, cfg.chunk, cfg.label_smoothing};
    const auto queries = build_training_queries(*r.kg);
    Rng rng = Rng::stream(cfg.seed, "shuffle");
    const FilterIndex filter(*r.kg);
    for (std::size_t e = 1; e <= std::min<std::size_t>(cfg.epochs, 50); ++e) {
      r.losses.push_back(train_epoch(*r.kg, queries, s, opt, tc, rng).mean_loss);
      std::printf("  [FB15K-237] epoch %zu loss %.6f\n", e, r.losses.back());
      std::fflush(stdout);
    }
    s.refresh(*r.kg);
    r.mrr = metrics(rank_queries(r.kg->test(), s, filter)).mrr;
    r.state = std::move(s);
    return r;
  }();
  return t;
}

Outcome end_to_end_accuracy() {
  auto& t = fb_training();
  if (!t.attempted) return {Status::kSkip, t.skip_reason};
  bool decreasing = t.losses.size() >= 10;
  for (std::size_t e = 1; e < std::min<std::size_t>(10, t.losses.size()); ++e)
    decreasing = decreasing && t.losses[e] < t.losses[e - 1];
  return verdict(decreasing && t.mrr >= 0.12,
                 fmt("filtered test MRR %.4f (floor 0.12), loss strictly decreasing over first 10 epochs: %s",
                     t.mrr, decreasing ? "yes" : "no"));
}

// Integer bits sized to the largest magnitude among the score tables.
FixedPointSpec calibrated(const ModelState& s, int total_bits) {
  double m = 0.0;
  for (const Matrix* t : {&s.e_v, &s.e_r, &s.H_v, &s.H_r, &s.M_v})
    for (double x : t->data()) m = std::max(m, std::abs(x));
  const int int_bits = m > 0 ? std::max(0, static_cast<int>(std::ceil(std::log2(m + 1e-12)))) : 0;
  return {total_bits, std::clamp(total_bits - 1 - int_bits, 0, total_bits - 1)};
}

Outcome quantization_robustness() {
  auto& t = fb_training();
  if (!t.attempted) return {Status::kSkip, t.skip_reason};
  const FilterIndex filter(*t.kg);
  auto drop_at = [&](int bits) {
    const auto spec = calibrated(*t.state, bits);
    const auto qm = quantize_model(*t.state, *t.kg, spec);
    const double mrr = metrics(rank_queries(t.kg->test(), qm.view(), filter)).mrr;
    return std::make_pair(spec, (t.mrr - mrr) / t.mrr);
  };
  auto [s8, d8] = drop_at(8);
  auto [s4, d4] = drop_at(4);
  return verdict(d8 <= 0.10 && d4 <= 0.15,
                 fmt("relative MRR drop fix-8 (frac %d) %.4f (bound 0.10), fix-4 (frac %d) %.4f (bound 0.15)",
                     s8.frac_bits, d8, s4.frac_bits, d4));
}

// ---------------------------------------------------------------- 8
Outcome dimension_drop() {
  synthetic::ClusteredSpec cs;
  cs.entities = 100;
  cs.relations = 4;
  cs.clusters = 8;
  cs.edges_per_entity = 3;
  cs.seed = 1;
  const auto kg = add_reciprocal(synthetic::clustered_graph(cs));
  const FilterIndex filter(kg);
  const auto queries = build_training_queries(kg);
  double low = 0.0, rnd = 0.0, full = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ModelConfig cfg;
    cfg.d = 32;
    cfg.D = 64;
    cfg.seed = seed;
    ModelState s(cfg, kg.num_entities(), kg.num_relations());
    Optimizer opt({OptimizerKind::kAdagrad, 0.05});
    Rng rng = Rng::stream(seed, "shuffle");
    for (int e = 0; e < 30; ++e) train_epoch(kg, queries, s, opt, TrainConfig{}, rng);
    s.refresh(kg);
    full += metrics(rank_queries(kg.test(), s, filter)).mrr;
    for (auto [strategy, acc] : {std::pair{DropStrategy::kLowEntropy, &low}, {DropStrategy::kRandom, &rnd}}) {
      const auto reduced = drop_dims(s, make_drop_mask(s.M_v, 0.25, strategy, seed));
      *acc += metrics(rank_queries(kg.test(), reduced.view(), filter)).mrr;
    }
  }
  return verdict(low >= rnd, fmt("mean filtered MRR over 5 seeds: low-entropy %.4f, random %.4f (full %.4f); "
                                 "synthetic clustered graph, 100 entities",
                                 low / 5, rnd / 5, full / 5));
}

// ---------------------------------------------------------------- 9, 10, 11
struct Schedules {
  std::vector<sim::ScheduleBatch> first, second;
};

Schedules two_epochs(const KnowledgeGraph& kg, const sim::CostConfig& cost) {
  sim::EncodedRegistry reg(cost.slot_bytes());
  Schedules s;
  s.first = sim::schedule_epoch(kg, cost.n_c, reg);
  s.second = sim::schedule_epoch(kg, cost.n_c, reg);
  return s;
}

Outcome from_graph(bool real, bool invariant_ok, bool trend_ok, const std::string& detail) {
  if (!invariant_ok) return {Status::kFail, detail};
  if (real) return verdict(trend_ok, detail);
  return {Status::kSkip, "FB15K-237 not available; synthetic stand-in with the same counts: " +
                             std::string(trend_ok ? "holds" : "does NOT hold") + "; " + detail};
}

Outcome scheduler_invariants() {
  const Graph g = benchmark_graph(kFb);
  const auto cost = sim::cost_preset("u50");
  const auto s = two_epochs(g.kg, cost);
  std::size_t bad_batches = 0, tails = 0, encodes2 = 0;
  std::vector<int> seen(g.kg.num_entities(), 0);
  for (const auto& b : s.first) {
    tails += b.tail;
    if (b.members.size() > cost.n_c) ++bad_batches;
    for (auto v : b.members) {
      ++seen[v];
      if (!b.tail && g.kg.degree(v) != b.degree) ++bad_batches;
    }
  }
  std::size_t coverage_errors = 0;
  for (std::size_t v = 0; v < seen.size(); ++v)
    coverage_errors += seen[v] != (g.kg.degree(static_cast<EntityId>(v)) > 0 ? 1 : 0);
  for (const auto& b : s.second)
    for (auto f : b.encode_needed) encodes2 += f;
  const bool ok = !bad_batches && !coverage_errors && !encodes2;
  return from_graph(g.real, ok, ok,
                    fmt("%zu batches (%zu tail), malformed %zu, coverage errors %zu, epoch-2 encodes %zu",
                        s.first.size(), tails, bad_batches, coverage_errors, encodes2));
}

Outcome cache_trends() {
  const Graph g = benchmark_graph(kFb);
  const auto cost = sim::cost_preset("u50");
  const auto s = two_epochs(g.kg, cost);
  const std::vector<std::size_t> caps{32, 64, 128, 256};
  const auto rows = sim::capacity_sweep(
      s.first, g.kg, cost, caps, {sim::CachePolicy::kLru, sim::CachePolicy::kLfu, sim::CachePolicy::kRandom}, 1);
  std::map<std::pair<sim::CachePolicy, std::size_t>, sim::SweepRow> at;
  for (const auto& r : rows) at[{r.policy, r.capacity}] = r;

  bool monotone = true, traffic_exact = true, lfu_beats_random = true;
  for (auto p : {sim::CachePolicy::kLru, sim::CachePolicy::kLfu})
    for (std::size_t i = 1; i < caps.size(); ++i)
      monotone = monotone && at[{p, caps[i]}].hit_rate >= at[{p, caps[i - 1]}].hit_rate;
  std::string margins;
  for (auto c : caps) {
    const auto& lfu = at[{sim::CachePolicy::kLfu, c}];
    const auto& rnd = at[{sim::CachePolicy::kRandom, c}];
    lfu_beats_random = lfu_beats_random && lfu.hit_rate >= rnd.hit_rate;
    margins += fmt("%s%zu: LFU %.3f vs Random %.3f", margins.empty() ? "" : ", ", c, lfu.hit_rate, rnd.hit_rate);
  }
  for (auto p : {sim::CachePolicy::kLru, sim::CachePolicy::kLfu, sim::CachePolicy::kRandom}) {
    const auto r = sim::simulate(s.first, g.kg, sim::CacheConfig{64, p, 1}, cost);
    traffic_exact = traffic_exact && r.bytes_neighbor_fetch == r.cache_misses * cost.D * cost.element_bytes;
  }
  return from_graph(g.real, monotone && traffic_exact, lfu_beats_random,
                    fmt("monotone LRU/LFU: %s; traffic = misses x D x bytes: %s; ", monotone ? "yes" : "no",
                        traffic_exact ? "yes" : "no") + margins);
}

Outcome latency_ratios() {
  const auto cost = sim::cost_preset("u50");
  std::map<std::string, double> ms;
  bool all_real = true;
  for (const auto& b : {kFb, kWn, kYago}) {
    const Graph g = benchmark_graph(b);
    all_real = all_real && g.real;
    const auto s = two_epochs(g.kg, cost);
    sim::Cache cache(cost.cache_slots, sim::CachePolicy::kLfu, 1);
    sim::simulate(s.first, g.kg, cache, cost);
    ms[b.name] = sim::simulate(s.second, g.kg, cache, cost).latency_s * 1e3;
  }
  const double wn = ms[kWn.name] / ms[kFb.name], yago = ms[kYago.name] / ms[kFb.name];
  const bool ok = wn >= 1.0 && wn <= 2.2 && yago >= 3.0 && yago <= 7.0;
  return from_graph(all_real, true, ok,
                    fmt("modeled single-batch latency FB %.2f ms, WN18RR %.2f ms, YAGO3-10 %.2f ms; "
                        "WN18RR/FB %.2f (window 1.0-2.2), YAGO3-10/FB %.2f (window 3-7)",
                        ms[kFb.name], ms[kWn.name], ms[kYago.name], wn, yago));
}

// ---------------------------------------------------------------- 12
void write_split(const fs::path& p, const KnowledgeGraph& kg, const std::vector<Triple>& ts) {
  std::ofstream out(p);
  for (const auto& t : ts)
    out << kg.entities().name(t.head) << '\t' << kg.relations().name(t.rel) << '\t'
        << kg.entities().name(t.tail) << '\n';
}

Outcome determinism() {
  TempDir dir;
  synthetic::ClusteredSpec cs;
  cs.entities = 48;
  cs.seed = 4;
  const auto kg = synthetic::clustered_graph(cs);
  const fs::path ds = dir.path / "ds";
  fs::create_directories(ds);
  write_split(ds / "train.txt", kg, kg.train());
  write_split(ds / "valid.txt", kg, kg.valid());
  write_split(ds / "test.txt", kg, kg.test());

  auto run_all = [&](const std::string& name) {
    run::RunConfig cfg;
    cfg.dataset = ds.string();
    cfg.out_dir = (dir.path / name).string();
    cfg.d = 16;
    cfg.D = 64;
    cfg.seed = 21;
    cfg.epochs = 3;
    cfg.policy = "random";
    cfg.sweep = {4, 8, 16};
    for (auto cmd : run::kCommands) {
      if (cmd == "reconstruct") cfg.vertex = kg.entities().name(0);
      run::run_command(cmd, cfg);
    }
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir.path / name)) files[e.path().filename().string()] = slurp(e.path());
    return files;
  };
  const auto a = run_all("a"), b = run_all("b");
  std::size_t differing = 0;
  for (const auto& [name, bytes] : a) {
    auto it = b.find(name);
    differing += it == b.end() || it->second != bytes;
  }
  const bool has_all = a.count("checkpoint.hdck") && a.count("train_metrics.jsonl") && a.count("metrics.csv") &&
                       a.count("sim_report.json");
  return verdict(!differing && has_all && a.size() == b.size(),
                 fmt("%zu artifacts per run (checkpoint, metrics, sim reports included), %zu differ", a.size(),
                     differing));
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"gradient-correctness", gradient_check},
      {"memorization-equivalence", memorization_equivalence},
      {"chunked-backward-equivalence", chunked_equivalence},
      {"reconstruction-property", reconstruction},
      {"forward-gradient-caching", forward_caching},
      {"end-to-end-accuracy-floor", end_to_end_accuracy},
      {"quantization-robustness", quantization_robustness},
      {"dimension-drop-direction", dimension_drop},
      {"scheduler-invariants", scheduler_invariants},
      {"cache-simulator-trends", cache_trends},
      {"latency-ratios", latency_ratios},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {Status::kFail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.status == Status::kPass ? "PASS" : o.status == Status::kFail ? "FAIL" : "SKIP";
    failures += o.status == Status::kFail;
    std::printf("%-4s %2zu %-30s %s\n", tag, i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures ? 1 : 0;
}
