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

#include "hdkg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "hdkg/error.hpp"
#include "hdkg/rng.hpp"

namespace hdkg::synthetic {

KnowledgeGraph random_graph(std::size_t num_entities, std::size_t num_relations,
                            std::size_t max_degree, std::uint64_t seed) {
  if (num_entities < 2 || num_relations == 0 || max_degree == 0)
    throw ArgumentError("random_graph: need >= 2 entities, >= 1 relation and degree");
  Rng rng(seed);
  std::vector<Triple> train;
  for (std::size_t i = 0; i < num_entities; ++i) {
    const std::size_t k = 1 + rng.below(max_degree);
    std::set<std::pair<EntityId, RelationId>> picked;
    while (picked.size() < k) {
      auto j = static_cast<EntityId>(rng.below(num_entities));
      auto r = static_cast<RelationId>(rng.below(num_relations));
      if (static_cast<std::size_t>(j) == i) continue;
      if (picked.insert({j, r}).second)
        train.push_back(Triple{static_cast<EntityId>(i), r, j});
    }
  }
  return KnowledgeGraph::from_ids(num_entities, num_relations, std::move(train));
}

KnowledgeGraph clustered_graph(const ClusteredSpec& spec) {
  if (spec.clusters == 0 || spec.entities < spec.clusters || spec.relations == 0)
    throw ArgumentError("clustered_graph: invalid sizes");
  Rng rng(spec.seed);
  const std::size_t per = spec.entities / spec.clusters;
  auto cluster_of = [&](std::size_t e) { return std::min(e / per, spec.clusters - 1); };
  auto cluster_size = [&](std::size_t c) {
    return c + 1 == spec.clusters ? spec.entities - c * per : per;
  };

  std::vector<std::size_t> offset(spec.relations);
  for (auto& o : offset) o = rng.below(per);

  std::set<Triple> seen;
  std::vector<Triple> all;
  for (std::size_t h = 0; h < spec.entities; ++h) {
    std::vector<std::size_t> rels(spec.relations);
    std::iota(rels.begin(), rels.end(), std::size_t{0});
    rng.shuffle(rels);
    for (std::size_t e = 0; e < std::min(spec.edges_per_entity, spec.relations); ++e) {
      const std::size_t r = rels[e];
      const std::size_t c = cluster_of(h);
      const std::size_t tc = (c + r + 1) % spec.clusters;
      const std::size_t within = (h - c * per + offset[r]) % cluster_size(tc);
      Triple t{static_cast<EntityId>(h), static_cast<RelationId>(r),
               static_cast<EntityId>(tc * per + within)};
      if (seen.insert(t).second) all.push_back(t);
    }
  }
  rng.shuffle(all);
  const auto nvalid = static_cast<std::size_t>(spec.valid_fraction * static_cast<double>(all.size()));
  const auto ntest = static_cast<std::size_t>(spec.test_fraction * static_cast<double>(all.size()));
  std::vector<Triple> valid(all.begin(), all.begin() + nvalid);
  std::vector<Triple> test(all.begin() + nvalid, all.begin() + nvalid + ntest);
  std::vector<Triple> train(all.begin() + nvalid + ntest, all.end());
  return KnowledgeGraph::from_ids(spec.entities, spec.relations, std::move(train),
                                  std::move(valid), std::move(test));
}

namespace {

class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double exponent, Rng& rng) : ids_(n), cdf_(n) {
    std::iota(ids_.begin(), ids_.end(), EntityId{0});
    rng.shuffle(ids_);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += 1.0 / std::pow(static_cast<double>(i + 1), exponent);
      cdf_[i] = acc;
    }
    for (double& c : cdf_) c /= acc;
  }
  EntityId draw(Rng& rng) const {
    const double u = rng.uniform01();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    std::size_t i = std::min<std::size_t>(it - cdf_.begin(), cdf_.size() - 1);
    return ids_[i];
  }

 private:
  std::vector<EntityId> ids_;
  std::vector<double> cdf_;
};

}  // namespace

KnowledgeGraph power_law_graph(const PowerLawSpec& spec) {
  if (spec.entities < 2 || spec.relations == 0)
    throw ArgumentError("power_law_graph: need >= 2 entities and >= 1 relation");
  Rng rng(spec.seed);
  ZipfSampler heads(spec.entities, spec.entity_exponent, rng);
  ZipfSampler tails(spec.entities, spec.entity_exponent, rng);
  ZipfSampler rels(spec.relations, spec.relation_exponent, rng);
  auto draw = [&](std::size_t n) {
    std::vector<Triple> out;
    out.reserve(n);
    while (out.size() < n) {
      Triple t{heads.draw(rng), rels.draw(rng), tails.draw(rng)};
      if (t.head != t.tail) out.push_back(t);
    }
    return out;
  };
  auto train = draw(spec.train);
  auto valid = draw(spec.valid);
  auto test = draw(spec.test);
  return KnowledgeGraph::from_ids(spec.entities, spec.relations, std::move(train),
                                  std::move(valid), std::move(test));
}

}  // namespace hdkg::synthetic
