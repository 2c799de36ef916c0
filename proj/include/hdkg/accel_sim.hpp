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
#include <filesystem>
#include <list>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "hdkg/kg_data.hpp"
#include "hdkg/rng.hpp"

namespace hdkg::sim {

/// Vertex id -> device address of its encoded hypervector. Addresses come
/// from a bump allocator; nothing is ever freed.
class EncodedRegistry {
 public:
  explicit EncodedRegistry(std::uint64_t slot_bytes = 1) : slot_bytes_(slot_bytes) {}

  std::optional<std::uint64_t> find(EntityId v) const;
  bool contains(EntityId v) const { return addr_.count(v) != 0; }
  /// Returns the existing address if v is already registered.
  std::uint64_t insert(EntityId v);
  std::size_t size() const noexcept { return addr_.size(); }
  std::uint64_t bytes_allocated() const noexcept { return next_; }

 private:
  std::uint64_t slot_bytes_;
  std::uint64_t next_ = 0;
  std::unordered_map<EntityId, std::uint64_t> addr_;
};

/// One offload to the memorization engines. Members needing encode carry
/// their embedding row (the vertex id); the others carry a device address.
struct ScheduleBatch {
  std::size_t degree = 0;  // shared degree, or the largest degree in a tail batch
  bool tail = false;
  std::vector<EntityId> members;
  std::vector<std::uint8_t> encode_needed;
  std::vector<std::uint64_t> address;  // device address (after this batch)
  std::vector<std::vector<Neighbor>> neighbors;

  friend bool operator==(const ScheduleBatch&, const ScheduleBatch&) = default;
};

/// Streams vertices in id order into per-degree buckets and emits a bucket as
/// soon as it holds n_c vertices. Leftovers are flushed in descending degree
/// order, packed n_c at a time (tail batches may mix degrees). Registers every
/// vertex that needed encoding.
std::vector<ScheduleBatch> schedule_epoch(const KnowledgeGraph& kg, std::size_t n_c,
                                          EncodedRegistry& registry);

/// JSON-lines schedule trace, one batch per line.
void write_schedule_trace(const std::filesystem::path& path,
                          const std::vector<ScheduleBatch>& batches);
std::vector<ScheduleBatch> read_schedule_trace(const std::filesystem::path& path);

enum class CachePolicy { kLru, kLfu, kRandom };
std::string_view policy_name(CachePolicy p);
CachePolicy parse_policy(std::string_view name);

struct AccessResult {
  bool hit = false;
  std::optional<EntityId> evicted;
};

/// Fixed-capacity hypervector store. LFU counts uses since the entry was
/// inserted and breaks ties by least recent use. Random draws victims from the
/// "random-policy" stream of the given seed.
class Cache {
 public:
  Cache(std::size_t capacity, CachePolicy policy, std::uint64_t seed = 0);

  AccessResult access(EntityId v);
  bool contains(EntityId v) const { return where_.count(v) != 0; }

  std::size_t capacity() const noexcept { return capacity_; }
  CachePolicy policy() const noexcept { return policy_; }
  std::size_t size() const noexcept { return where_.size(); }
  std::uint64_t hits() const noexcept { return hits_; }
  std::uint64_t misses() const noexcept { return misses_; }
  std::uint64_t evictions() const noexcept { return evictions_; }
  double hit_rate() const noexcept {
    const auto n = hits_ + misses_;
    return n ? static_cast<double>(hits_) / static_cast<double>(n) : 0.0;
  }

 private:
  struct Entry {
    std::uint64_t freq = 0;
    std::uint64_t tick = 0;
    std::size_t slot = 0;  // index into random_ids_ (Random policy)
    std::list<EntityId>::iterator lru;
  };
  EntityId pick_victim();
  void remove(EntityId v);

  std::size_t capacity_;
  CachePolicy policy_;
  Rng rng_;
  std::uint64_t tick_ = 0;
  std::uint64_t hits_ = 0, misses_ = 0, evictions_ = 0;
  std::unordered_map<EntityId, Entry> where_;
  std::list<EntityId> lru_;                                        // front = most recent
  std::set<std::tuple<std::uint64_t, std::uint64_t, EntityId>> lfu_;  // (freq, tick, id)
  std::vector<EntityId> random_ids_;
};

struct CacheConfig {
  std::size_t capacity = 256;
  CachePolicy policy = CachePolicy::kLfu;
  std::uint64_t seed = 0;
};

/// Throughput constants of the modeled accelerator. Preset values are
/// estimates derived from the device's resources, not measured.
struct CostConfig {
  std::string name = "custom";
  double clock_hz = 200e6;
  double device_bandwidth = 460e9;
  double host_bandwidth = 12e9;
  std::size_t element_bytes = 4;
  std::size_t n_c = 16;
  std::size_t D = 256;
  std::size_t d = 96;
  std::size_t batch = 128;
  std::size_t chunk = 32;
  double encode_macs_per_cycle = 512;
  double memorize_lanes_per_engine = 32;
  double train_macs_per_cycle = 1536;
  /// Score engines: one per batch member, D norm units each.
  double score_ops_per_cycle() const { return static_cast<double>(batch * D); }
  std::size_t cache_slots = 4608;

  void validate() const;  // ArgumentError on zero rates or sizes
  std::size_t slot_bytes() const { return D * element_bytes; }
};

/// "u50" or "u280".
CostConfig cost_preset(std::string_view name);

struct StageReport {
  double compute_s = 0.0;
  double device_s = 0.0;
  double host_s = 0.0;
  /// Compute and transfers of one stage overlap: time = max of the three.
  double time_s() const;
};

struct SimReport {
  std::string preset;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::size_t batches = 0;
  std::size_t tail_batches = 0;
  std::uint64_t encodes = 0;

  StageReport encode, memorize, score, train;

  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
  std::uint64_t cache_evictions = 0;
  double hit_rate = 0.0;

  std::uint64_t bytes_host_to_device = 0;
  std::uint64_t bytes_device_to_host = 0;
  std::uint64_t bytes_device_read = 0;
  std::uint64_t bytes_device_write = 0;
  std::uint64_t bytes_neighbor_fetch = 0;
  std::uint64_t device_memory_bytes = 0;

  /// Encode and memorize run as one pipeline over schedule batches; scoring
  /// and the chunked training pass follow. Each phase costs its slowest stage
  /// plus one item's worth of every other stage (fill/drain).
  double graph_pass_s = 0.0;
  double latency_s = 0.0;
};

/// Replays one pass of the schedule through `cache` (state is kept, so a
/// second call models a later epoch) and adds one training batch of scoring
/// and backward work.
SimReport simulate(const std::vector<ScheduleBatch>& schedule, const KnowledgeGraph& kg,
                   Cache& cache, const CostConfig& cost);
SimReport simulate(const std::vector<ScheduleBatch>& schedule, const KnowledgeGraph& kg,
                   const CacheConfig& cache, const CostConfig& cost);

std::string report_json(const SimReport& r, std::uint64_t config_hash, std::uint64_t seed);

struct SweepRow {
  std::size_t capacity = 0;
  CachePolicy policy = CachePolicy::kLru;
  double hit_rate = 0.0;
  std::uint64_t bytes_hbm = 0;  // neighbor-fetch device traffic
  double latency_model_ms = 0.0;
};

std::vector<SweepRow> capacity_sweep(const std::vector<ScheduleBatch>& schedule,
                                     const KnowledgeGraph& kg, const CostConfig& cost,
                                     const std::vector<std::size_t>& capacities,
                                     const std::vector<CachePolicy>& policies,
                                     std::uint64_t seed);
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace hdkg::sim
