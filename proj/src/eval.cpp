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

#include "hdkg/eval.hpp"

#include <algorithm>
#include <limits>

#include "hdkg/error.hpp"

namespace hdkg {

FilterIndex::FilterIndex(const KnowledgeGraph& kg) {
  for (const auto* split : {&kg.train(), &kg.valid(), &kg.test()})
    for (const Triple& t : *split) tails_[key(t.head, t.rel)].push_back(t.tail);
  for (auto& [k, v] : tails_) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
}

std::span<const EntityId> FilterIndex::tails(EntityId s, RelationId r) const {
  auto it = tails_.find(key(s, r));
  if (it == tails_.end()) return {};
  return it->second;
}

std::size_t pessimistic_rank(std::span<const double> scores, EntityId target,
                             std::span<const EntityId> masked) {
  if (target < 0 || static_cast<std::size_t>(target) >= scores.size())
    throw ArgumentError("rank: target out of range");
  std::vector<char> skip;
  if (!masked.empty()) {
    skip.assign(scores.size(), 0);
    for (EntityId m : masked)
      if (m != target && m >= 0 && static_cast<std::size_t>(m) < scores.size()) skip[m] = 1;
  }
  const double st = scores[target];
  std::size_t rank = 1;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    if (static_cast<EntityId>(c) == target) continue;
    if (!skip.empty() && skip[c]) continue;
    if (scores[c] >= st) ++rank;
  }
  return rank;
}

std::vector<RankRecord> rank_queries(std::span<const Triple> split, const ScoreView& view,
                                     const FilterIndex& filter, const RankOptions& opts) {
  if (opts.batch_size == 0) throw ArgumentError("rank: batch size must be positive");
  std::vector<RankRecord> out;
  out.reserve(split.size());
  for (std::size_t start = 0; start < split.size(); start += opts.batch_size) {
    const std::size_t end = std::min(split.size(), start + opts.batch_size);
    std::vector<EntityId> subjects;
    std::vector<RelationId> relations;
    for (std::size_t i = start; i < end; ++i) {
      subjects.push_back(split[i].head);
      relations.push_back(split[i].rel);
    }
    // Raw (pre-sigmoid) scores rank identically to P without saturation ties.
    Matrix raw = score_raw(view, subjects, relations);
    for (std::size_t i = start; i < end; ++i) {
      const Triple& t = split[i];
      std::span<const EntityId> masked;
      if (opts.filtered) masked = filter.tails(t.head, t.rel);
      out.push_back(RankRecord{t, pessimistic_rank(raw.row(i - start), t.tail, masked),
                               opts.filtered});
    }
  }
  return out;
}

std::vector<RankRecord> rank_queries(std::span<const Triple> split, const ModelState& state,
                                     const FilterIndex& filter, const RankOptions& opts) {
  return rank_queries(split, score_view(state), filter, opts);
}

Metrics metrics(std::span<const RankRecord> records) {
  if (records.empty()) throw ArgumentError("metrics: no rank records");
  Metrics m;
  m.count = records.size();
  for (const auto& r : records) {
    m.mrr += 1.0 / static_cast<double>(r.rank);
    m.hits1 += r.rank <= 1;
    m.hits3 += r.rank <= 3;
    m.hits10 += r.rank <= 10;
  }
  const double n = static_cast<double>(records.size());
  m.mrr /= n;
  m.hits1 /= n;
  m.hits3 /= n;
  m.hits10 /= n;
  return m;
}

std::vector<Candidate> reconstruct_neighbors(const ModelState& state, EntityId vertex,
                                             std::optional<RelationId> relation,
                                             SimilarityMetric metric) {
  if (!state.memory_fresh()) throw StalenessError("reconstruct: memory hypervectors are stale");
  if (vertex < 0 || static_cast<std::size_t>(vertex) >= state.num_entities())
    throw ArgumentError("reconstruct: vertex out of range");
  if (relation && (*relation < 0 || static_cast<std::size_t>(*relation) >= state.num_relations()))
    throw ArgumentError("reconstruct: relation out of range");

  auto memory = state.M_v.row(vertex);
  std::vector<Candidate> out;
  out.reserve(state.num_entities());
  for (std::size_t j = 0; j < state.num_entities(); ++j) {
    double s;
    if (relation) {
      auto probe = bind(state.H_v.row(j), state.H_r.row(*relation));
      s = similarity(memory, probe, metric);
    } else {
      s = similarity(memory, state.H_v.row(j), metric);
    }
    out.push_back(Candidate{static_cast<EntityId>(j), s});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
  return out;
}

}  // namespace hdkg
