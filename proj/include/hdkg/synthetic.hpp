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

#include "hdkg/kg_data.hpp"

namespace hdkg::synthetic {

/// Every vertex gets between 1 and max_degree distinct out-edges (j, r) with
/// j != i, drawn uniformly. All edges go to the training split.
KnowledgeGraph random_graph(std::size_t num_entities, std::size_t num_relations,
                            std::size_t max_degree, std::uint64_t seed);

/// Entities are split into clusters; relation r maps cluster c to cluster
/// (c + r + 1) mod clusters and picks a tail inside it through a fixed
/// per-relation offset, so the tail is a function of (head, relation).
struct ClusteredSpec {
  std::size_t entities = 60;
  std::size_t relations = 4;
  std::size_t clusters = 6;
  std::size_t edges_per_entity = 2;
  double valid_fraction = 0.1;
  double test_fraction = 0.1;
  std::uint64_t seed = 1;
};
KnowledgeGraph clustered_graph(const ClusteredSpec& spec);

/// Heavy-tailed stand-in with prescribed vertex/relation/triple counts.
/// Heads, tails and relations are drawn from Zipf(exponent) over randomly
/// permuted ids. Used where a public dataset is not available locally.
struct PowerLawSpec {
  std::size_t entities = 1000;
  std::size_t relations = 10;
  std::size_t train = 10000;
  std::size_t valid = 0;
  std::size_t test = 0;
  double entity_exponent = 0.8;
  double relation_exponent = 1.0;
  std::uint64_t seed = 1;
};
KnowledgeGraph power_law_graph(const PowerLawSpec& spec);

}  // namespace hdkg::synthetic
