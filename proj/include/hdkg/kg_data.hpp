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

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hdkg {

using EntityId = std::int32_t;
using RelationId = std::int32_t;

struct Triple {
  EntityId head = 0;
  RelationId rel = 0;
  EntityId tail = 0;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// Dense bidirectional string <-> id map. Ids are assigned in first-seen order.
class Vocabulary {
 public:
  std::int32_t intern(std::string_view name);
  std::optional<std::int32_t> find(std::string_view name) const;
  const std::string& name(std::int32_t id) const { return names_.at(id); }
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::int32_t> ids_;
};

/// Compressed sparse rows of one relation's |V| x |V| adjacency A^r.
/// Duplicate training triples appear as repeated column entries.
struct RelationCsr {
  std::vector<std::uint32_t> row_ptr;  // |V| + 1
  std::vector<EntityId> cols;

  std::span<const EntityId> row(EntityId v) const {
    return {cols.data() + row_ptr[v], cols.data() + row_ptr[v + 1]};
  }
};

struct Neighbor {
  EntityId vertex = 0;
  RelationId rel = 0;

  friend auto operator<=>(const Neighbor&, const Neighbor&) = default;
};

/// Vertices grouped by merged-neighbor count.
using DegreeHistogram = std::map<std::size_t, std::vector<EntityId>>;

/// Triple splits plus the adjacency of the training split. Immutable once
/// constructed; safe for concurrent readers.
class KnowledgeGraph {
 public:
  KnowledgeGraph() { build_adjacency(); }
  KnowledgeGraph(Vocabulary entities, Vocabulary relations,
                 std::vector<Triple> train, std::vector<Triple> valid,
                 std::vector<Triple> test, bool reciprocal = false,
                 std::int32_t base_relations = -1);

  /// Graph over anonymous ids "e0".."e{n-1}" / "r0".."r{m-1}".
  static KnowledgeGraph from_ids(std::size_t num_entities,
                                 std::size_t num_relations,
                                 std::vector<Triple> train,
                                 std::vector<Triple> valid = {},
                                 std::vector<Triple> test = {});

  std::size_t num_entities() const noexcept { return entities_.size(); }
  std::size_t num_relations() const noexcept { return relations_.size(); }
  /// Relation count before reciprocal augmentation.
  std::size_t num_base_relations() const noexcept { return base_relations_; }
  bool reciprocal() const noexcept { return reciprocal_; }

  const Vocabulary& entities() const noexcept { return entities_; }
  const Vocabulary& relations() const noexcept { return relations_; }
  const std::vector<Triple>& train() const noexcept { return train_; }
  const std::vector<Triple>& valid() const noexcept { return valid_; }
  const std::vector<Triple>& test() const noexcept { return test_; }
  const std::vector<Triple>& split(std::string_view name) const;

  const std::vector<RelationCsr>& csr() const noexcept { return csr_; }

  /// Out-neighbors (j, r) of v over all relations, relation-major order.
  std::span<const Neighbor> neighbors(EntityId v) const {
    return {neighbors_.data() + neighbor_ptr_[v],
            neighbors_.data() + neighbor_ptr_[v + 1]};
  }
  std::size_t degree(EntityId v) const {
    return neighbor_ptr_[v + 1] - neighbor_ptr_[v];
  }
  std::size_t num_edges() const noexcept { return neighbors_.size(); }

 private:
  void validate() const;
  void build_adjacency();

  Vocabulary entities_;
  Vocabulary relations_;
  std::vector<Triple> train_;
  std::vector<Triple> valid_;
  std::vector<Triple> test_;
  bool reciprocal_ = false;
  std::size_t base_relations_ = 0;

  std::vector<RelationCsr> csr_;
  std::vector<std::size_t> neighbor_ptr_;
  std::vector<Neighbor> neighbors_;
};

/// Reads train.txt / valid.txt / test.txt (head<TAB>relation<TAB>tail).
/// Entities and relations are numbered over all three splits in file order.
KnowledgeGraph load_dataset(const std::filesystem::path& dir);

/// Adds (t, r + |R|, h) for every triple in every split. Valid/test gain the
/// mirrored head-prediction queries this way.
KnowledgeGraph add_reciprocal(const KnowledgeGraph& kg);

DegreeHistogram degree_histogram(const KnowledgeGraph& kg);

struct DegreeSummary {
  /// |train| / |V| of the graph as given (out-edges per vertex).
  double mean_degree = 0.0;
  /// Same quantity with reciprocal edges counted, i.e. in + out degree.
  double mean_degree_with_reciprocals = 0.0;
  std::size_t max_degree = 0;
};
DegreeSummary degree_summary(const KnowledgeGraph& kg);

struct ArtifactStamp {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
};

/// Binary cache ("HDKG" container, little-endian). See README for layout.
void save_graph_cache(const KnowledgeGraph& kg,
                      const std::filesystem::path& path,
                      const ArtifactStamp& stamp = {});
KnowledgeGraph load_graph_cache(const std::filesystem::path& path,
                                ArtifactStamp* stamp = nullptr);

/// Loads a dataset directory, or a .hdkg cache file.
KnowledgeGraph load_graph(const std::filesystem::path& path);

}  // namespace hdkg
