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
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "hdkg/hdc.hpp"
#include "hdkg/kg_data.hpp"
#include "hdkg/model.hpp"

namespace hdkg {

struct RankRecord {
  Triple query;
  std::size_t rank = 0;
  bool filtered = false;
};

/// Known true tails per (subject, relation) over train, valid and test.
class FilterIndex {
 public:
  FilterIndex() = default;
  explicit FilterIndex(const KnowledgeGraph& kg);

  std::span<const EntityId> tails(EntityId s, RelationId r) const;

 private:
  static std::uint64_t key(EntityId s, RelationId r) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s)) << 32) |
           static_cast<std::uint32_t>(r);
  }
  std::unordered_map<std::uint64_t, std::vector<EntityId>> tails_;
};

/// Pessimistic rank of `target`: 1 + #{c != t : s_c >= s_t}. Entries listed in
/// `masked` (other than the target) are excluded.
std::size_t pessimistic_rank(std::span<const double> scores, EntityId target,
                             std::span<const EntityId> masked = {});

struct RankOptions {
  bool filtered = true;
  std::size_t batch_size = 128;
};

std::vector<RankRecord> rank_queries(std::span<const Triple> split,
                                     const ScoreView& view,
                                     const FilterIndex& filter,
                                     const RankOptions& opts = {});

std::vector<RankRecord> rank_queries(std::span<const Triple> split,
                                     const ModelState& state,
                                     const FilterIndex& filter,
                                     const RankOptions& opts = {});

struct Metrics {
  double mrr = 0.0;
  double hits1 = 0.0;
  double hits3 = 0.0;
  double hits10 = 0.0;
  std::size_t count = 0;
};

Metrics metrics(std::span<const RankRecord> records);

struct Candidate {
  EntityId vertex = 0;
  double score = 0.0;
};

/// Candidates j ordered by similarity(M_v[i], H_v[j]) or, with a relation,
/// similarity(M_v[i], H_v[j] o H_r[r]). Descending score, ties by id.
std::vector<Candidate> reconstruct_neighbors(
    const ModelState& state, EntityId vertex,
    std::optional<RelationId> relation = std::nullopt,
    SimilarityMetric metric = SimilarityMetric::kCosine);

}  // namespace hdkg
