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

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "hdkg/accel_sim.hpp"
#include "hdkg/error.hpp"
#include "hdkg/rng.hpp"
#include "hdkg/synthetic.hpp"
#include "test_util.hpp"

namespace hdkg::sim {
namespace {

// A=0 (deg 2), B=1 (deg 1), C=2 (deg 2), D=3 (deg 1).
KnowledgeGraph four_vertex_graph() {
  return KnowledgeGraph::from_ids(4, 1, {{0, 0, 1}, {0, 0, 2}, {1, 0, 0}, {2, 0, 0}, {2, 0, 1}, {3, 0, 0}});
}

KnowledgeGraph stand_in(std::uint64_t seed = 3) {
  synthetic::PowerLawSpec spec{400, 6, 3000, 0, 0, 0.9, 1.0, seed};
  return add_reciprocal(synthetic::power_law_graph(spec));
}

TEST(Scheduler, HandTrace) {
  auto kg = four_vertex_graph();
  EncodedRegistry reg(1024);
  auto batches = schedule_epoch(kg, 2, reg);
  ASSERT_EQ(batches.size(), 2u);
  EXPECT_EQ(batches[0].members, (std::vector<EntityId>{0, 2}));
  EXPECT_EQ(batches[0].degree, 2u);
  EXPECT_EQ(batches[1].members, (std::vector<EntityId>{1, 3}));
  EXPECT_EQ(batches[1].degree, 1u);
  for (const auto& b : batches) {
    EXPECT_FALSE(b.tail);
    for (auto f : b.encode_needed) EXPECT_EQ(f, 1);
  }
  EXPECT_EQ(batches[0].neighbors[1], (std::vector<Neighbor>{{0, 0}, {1, 0}}));
  EXPECT_EQ(reg.size(), 4u);
  EXPECT_EQ(reg.bytes_allocated(), 4096u);
}

TEST(Scheduler, SecondEpochReusesRegistry) {
  auto kg = four_vertex_graph();
  EncodedRegistry reg(1024);
  auto first = schedule_epoch(kg, 2, reg);
  auto second = schedule_epoch(kg, 2, reg);
  ASSERT_EQ(first.size(), second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    EXPECT_EQ(first[i].members, second[i].members);
    EXPECT_EQ(first[i].address, second[i].address);
    for (auto f : second[i].encode_needed) EXPECT_EQ(f, 0);
  }
  EXPECT_EQ(reg.size(), 4u);
}

TEST(Scheduler, EqualDegreesPackIntoTail) {
  std::vector<Triple> t;
  for (EntityId v = 0; v < 5; ++v)
    for (EntityId k = 1; k <= 3; ++k) t.push_back({v, 0, (v + k) % 6});
  auto kg = KnowledgeGraph::from_ids(6, 1, t);
  EncodedRegistry reg;
  auto batches = schedule_epoch(kg, 2, reg);
  ASSERT_EQ(batches.size(), 3u);
  EXPECT_EQ(batches[0].members.size(), 2u);
  EXPECT_EQ(batches[1].members.size(), 2u);
  EXPECT_EQ(batches[2].members.size(), 1u);
  EXPECT_TRUE(batches[2].tail);
}

TEST(Scheduler, TailsFlushInDescendingDegree) {
  // Degrees 1, 3, 2 with N_c = 4: nothing fills, one mixed tail [1, 2, 0].
  auto kg = KnowledgeGraph::from_ids(
      4, 1, {{0, 0, 3}, {1, 0, 0}, {1, 0, 2}, {1, 0, 3}, {2, 0, 0}, {2, 0, 1}});
  EncodedRegistry reg;
  auto batches = schedule_epoch(kg, 4, reg);
  ASSERT_EQ(batches.size(), 1u);
  EXPECT_EQ(batches[0].members, (std::vector<EntityId>{1, 2, 0}));
  EXPECT_EQ(batches[0].degree, 3u);
  EXPECT_TRUE(batches[0].tail);
}

TEST(Scheduler, CoverageAndHomogeneity) {
  auto kg = stand_in();
  for (std::size_t n_c : {1u, 3u, 16u}) {
    EncodedRegistry reg;
    auto batches = schedule_epoch(kg, n_c, reg);
    std::vector<int> seen(kg.num_entities(), 0);
    for (const auto& b : batches) {
      EXPECT_LE(b.members.size(), n_c);
      for (std::size_t m = 0; m < b.members.size(); ++m) {
        ++seen[b.members[m]];
        if (!b.tail) EXPECT_EQ(kg.degree(b.members[m]), b.degree);
        EXPECT_EQ(b.neighbors[m].size(), kg.degree(b.members[m]));
      }
    }
    for (std::size_t v = 0; v < kg.num_entities(); ++v)
      EXPECT_EQ(seen[v], kg.degree(static_cast<EntityId>(v)) > 0 ? 1 : 0) << v;
  }
}

TEST(Scheduler, RejectsZeroParallelism) {
  EncodedRegistry reg;
  EXPECT_THROW(schedule_epoch(four_vertex_graph(), 0, reg), ArgumentError);
}

TEST(Scheduler, TraceRoundTrip) {
  auto kg = stand_in();
  EncodedRegistry reg(1024);
  auto batches = schedule_epoch(kg, 16, reg);
  hdkg::testing::TempDir dir;
  auto path = dir.path() / "trace.jsonl";
  write_schedule_trace(path, batches);
  EXPECT_EQ(read_schedule_trace(path), batches);
  hdkg::testing::write_file(dir.path() / "bad.jsonl", "{\"degree\": 1}\n");
  EXPECT_THROW(read_schedule_trace(dir.path() / "bad.jsonl"), ParseError);
}

std::vector<bool> hits(Cache& c, std::initializer_list<EntityId> ids) {
  std::vector<bool> out;
  for (auto v : ids) out.push_back(c.access(v).hit);
  return out;
}

TEST(Cache, LruHandTrace) {
  Cache c(2, CachePolicy::kLru);
  EXPECT_FALSE(c.access(0).hit);
  EXPECT_FALSE(c.access(1).hit);
  EXPECT_TRUE(c.access(0).hit);
  auto r = c.access(2);
  EXPECT_FALSE(r.hit);
  ASSERT_TRUE(r.evicted.has_value());
  EXPECT_EQ(*r.evicted, 1);
  EXPECT_EQ(c.hits(), 1u);
  EXPECT_EQ(c.misses(), 3u);
  EXPECT_EQ(c.evictions(), 1u);
}

TEST(Cache, LfuEvictsLeastUsedThenOldest) {
  Cache c(2, CachePolicy::kLfu);
  hits(c, {0, 1, 0});
  auto r = c.access(2);
  EXPECT_EQ(r.evicted, std::optional<EntityId>(1));
  // 0 has two uses, 2 has one: 2 goes even though it is more recent.
  EXPECT_EQ(c.access(3).evicted, std::optional<EntityId>(2));
  Cache tie(2, CachePolicy::kLfu);
  hits(tie, {5, 6});
  EXPECT_EQ(tie.access(7).evicted, std::optional<EntityId>(5));
}

TEST(Cache, ColdMissBound) {
  for (auto p : {CachePolicy::kLru, CachePolicy::kLfu, CachePolicy::kRandom}) {
    Cache c(8, p, 4);
    Rng rng(9);
    std::set<EntityId> distinct;
    for (int i = 0; i < 500; ++i) {
      auto v = static_cast<EntityId>(rng.below(8));
      bool fresh = distinct.insert(v).second;
      EXPECT_EQ(c.access(v).hit, !fresh);
    }
    EXPECT_EQ(c.misses(), distinct.size());
    EXPECT_EQ(c.evictions(), 0u);
  }
}

TEST(Cache, CapacityOneThrashes) {
  for (auto p : {CachePolicy::kLru, CachePolicy::kLfu, CachePolicy::kRandom}) {
    Cache c(1, p, 1);
    EXPECT_EQ(hits(c, {0, 1, 0, 1}), (std::vector<bool>(4, false)));
    EXPECT_EQ(c.evictions(), 3u);
  }
  EXPECT_THROW(Cache(0, CachePolicy::kLru), ArgumentError);
}

// Linear-scan reference caches.
struct NaiveCache {
  std::size_t cap;
  bool lfu;
  std::map<EntityId, std::pair<std::uint64_t, std::uint64_t>> resident;  // id -> (freq, last use)
  std::uint64_t t = 0;

  bool access(EntityId v) {
    ++t;
    auto it = resident.find(v);
    if (it != resident.end()) {
      ++it->second.first;
      it->second.second = t;
      return true;
    }
    if (resident.size() == cap) {
      auto victim = resident.begin();
      for (auto j = resident.begin(); j != resident.end(); ++j) {
        auto key = [&](auto k) {
          return lfu ? std::make_tuple(k->second.first, k->second.second, k->first)
                     : std::make_tuple(std::uint64_t{0}, k->second.second, k->first);
        };
        if (key(j) < key(victim)) victim = j;
      }
      resident.erase(victim);
    }
    resident[v] = {1, t};
    return false;
  }
};

TEST(Cache, MatchesLinearScanReference) {
  Rng rng(21);
  std::vector<EntityId> trace;
  for (int i = 0; i < 3000; ++i) {
    // Skewed ids so frequencies differ.
    auto a = rng.below(40), b = rng.below(40);
    trace.push_back(static_cast<EntityId>(std::min(a, b)));
  }
  for (bool lfu : {false, true}) {
    for (std::size_t cap : {1u, 3u, 10u, 25u}) {
      Cache c(cap, lfu ? CachePolicy::kLfu : CachePolicy::kLru);
      NaiveCache ref{cap, lfu, {}, 0};
      for (auto v : trace) ASSERT_EQ(c.access(v).hit, ref.access(v)) << cap << " " << lfu;
      EXPECT_LE(c.size(), cap);
      EXPECT_EQ(c.hits() + c.misses(), trace.size());
    }
  }
}

TEST(Cache, RandomIsSeeded) {
  Rng rng(2);
  std::vector<EntityId> trace;
  for (int i = 0; i < 2000; ++i) trace.push_back(static_cast<EntityId>(rng.below(50)));
  auto run = [&](std::uint64_t seed) {
    Cache c(10, CachePolicy::kRandom, seed);
    std::vector<std::optional<EntityId>> ev;
    for (auto v : trace) ev.push_back(c.access(v).evicted);
    return ev;
  };
  EXPECT_EQ(run(5), run(5));
  EXPECT_NE(run(5), run(6));
}

std::vector<ScheduleBatch> schedule_of(const KnowledgeGraph& kg, std::size_t n_c = 16) {
  EncodedRegistry reg(1024);
  return schedule_epoch(kg, n_c, reg);
}

TEST(Simulate, HitRateMonotoneInCapacity) {
  auto kg = stand_in(5);
  auto sched = schedule_of(kg);
  auto cost = cost_preset("u50");
  for (auto p : {CachePolicy::kLru, CachePolicy::kLfu}) {
    double prev = -1.0;
    for (std::size_t cap : {8u, 16u, 32u, 64u, 128u, 256u}) {
      auto r = simulate(sched, kg, CacheConfig{cap, p, 0}, cost);
      EXPECT_GE(r.hit_rate, prev) << policy_name(p) << " " << cap;
      prev = r.hit_rate;
    }
  }
}

TEST(Simulate, NeighborTrafficIsMissesTimesSlot) {
  auto kg = stand_in();
  auto sched = schedule_of(kg);
  auto cost = cost_preset("u50");
  for (auto p : {CachePolicy::kLru, CachePolicy::kLfu, CachePolicy::kRandom}) {
    auto r = simulate(sched, kg, CacheConfig{32, p, 1}, cost);
    EXPECT_EQ(r.bytes_neighbor_fetch, r.cache_misses * cost.D * cost.element_bytes);
    EXPECT_EQ(r.cache_hits + r.cache_misses, r.edges);
    EXPECT_EQ(r.edges, kg.num_edges());
  }
}

TEST(Simulate, FullCapacityHasNoRefetchInSecondEpoch) {
  auto kg = stand_in();
  auto cost = cost_preset("u50");
  EncodedRegistry reg(cost.slot_bytes());
  auto e1 = schedule_epoch(kg, cost.n_c, reg);
  auto e2 = schedule_epoch(kg, cost.n_c, reg);
  Cache cache(kg.num_entities(), CachePolicy::kLru);
  auto r1 = simulate(e1, kg, cache, cost);
  auto r2 = simulate(e2, kg, cache, cost);
  EXPECT_GT(r1.bytes_neighbor_fetch, 0u);
  EXPECT_EQ(r2.bytes_neighbor_fetch, 0u);
  EXPECT_EQ(r2.cache_misses, 0u);
  EXPECT_EQ(r2.encodes, 0u);
  EXPECT_EQ(r2.encode.time_s(), 0.0);
  EXPECT_GT(r1.encodes, 0u);
}

TEST(Simulate, DoublingDeviceBandwidthHalvesMemoryTime) {
  auto kg = stand_in();
  auto sched = schedule_of(kg);
  auto cost = cost_preset("u50");
  cost.device_bandwidth = 5e9;  // makes some stages memory bound
  auto fast = cost;
  fast.device_bandwidth *= 2;
  auto a = simulate(sched, kg, CacheConfig{16, CachePolicy::kLru, 0}, cost);
  auto b = simulate(sched, kg, CacheConfig{16, CachePolicy::kLru, 0}, fast);
  int memory_bound = 0, compute_bound = 0;
  for (auto [sa, sb] : {std::pair{a.encode, b.encode}, std::pair{a.memorize, b.memorize},
                        std::pair{a.score, b.score}, std::pair{a.train, b.train}}) {
    EXPECT_DOUBLE_EQ(sb.device_s, sa.device_s / 2);
    EXPECT_EQ(sb.compute_s, sa.compute_s);
    EXPECT_EQ(sb.host_s, sa.host_s);
    if (sa.device_s / 2 >= std::max(sa.compute_s, sa.host_s)) {
      EXPECT_DOUBLE_EQ(sb.time_s(), sa.time_s() / 2);
      ++memory_bound;
    }
    if (sa.device_s <= std::max(sa.compute_s, sa.host_s)) {
      EXPECT_EQ(sb.time_s(), sa.time_s());
      ++compute_bound;
    }
  }
  EXPECT_GT(memory_bound, 0);
  EXPECT_GT(compute_bound, 0);
}

TEST(Simulate, CostArithmetic) {
  // One vertex of degree 2 plus its two neighbors, hand-sized constants.
  auto kg = KnowledgeGraph::from_ids(3, 1, {{0, 0, 1}, {0, 0, 2}});
  CostConfig c;
  c.clock_hz = 1.0;
  c.device_bandwidth = 1.0;
  c.host_bandwidth = 1.0;
  c.element_bytes = 1;
  c.n_c = 1;
  c.D = 4;
  c.d = 2;
  c.batch = 1;
  c.chunk = 2;
  c.encode_macs_per_cycle = 8;
  c.memorize_lanes_per_engine = 2;
  c.train_macs_per_cycle = 1;
  auto sched = schedule_of(kg, 1);
  auto r = simulate(sched, kg, CacheConfig{4, CachePolicy::kLru, 0}, c);
  EXPECT_EQ(r.encodes, 1u);
  EXPECT_DOUBLE_EQ(r.encode.compute_s, 2.0 * 4 / 8);
  EXPECT_DOUBLE_EQ(r.memorize.compute_s, 2.0 * 4 / 2);
  EXPECT_EQ(r.bytes_neighbor_fetch, 8u);
  // Score: |B| |V| D ops over |B| D lanes.
  EXPECT_DOUBLE_EQ(r.score.compute_s, 3.0);
  // Train: chunks of 2 and 1 columns, w (B D + D + D d) MACs each.
  EXPECT_DOUBLE_EQ(r.train.compute_s, 3.0 * (4 + 4 + 8));
}

TEST(Simulate, DeterministicReports) {
  auto kg = stand_in();
  auto sched = schedule_of(kg);
  auto cost = cost_preset("u280");
  auto a = report_json(simulate(sched, kg, CacheConfig{64, CachePolicy::kRandom, 3}, cost), 1, 2);
  auto b = report_json(simulate(sched, kg, CacheConfig{64, CachePolicy::kRandom, 3}, cost), 1, 2);
  EXPECT_EQ(a, b);
  auto rows = capacity_sweep(sched, kg, cost, {32, 64}, {CachePolicy::kLru, CachePolicy::kLfu,
                                                         CachePolicy::kRandom}, 3);
  EXPECT_EQ(rows.size(), 6u);
  EXPECT_EQ(sweep_csv(rows), sweep_csv(capacity_sweep(sched, kg, cost, {32, 64},
                                                      {CachePolicy::kLru, CachePolicy::kLfu,
                                                       CachePolicy::kRandom}, 3)));
  EXPECT_EQ(sweep_csv(rows).substr(0, 48), "capacity,policy,hit_rate,bytes_hbm,latency_model");
}

TEST(Simulate, RejectsBadCost) {
  auto kg = stand_in();
  auto sched = schedule_of(kg);
  auto cost = cost_preset("u50");
  cost.device_bandwidth = 0;
  EXPECT_THROW(simulate(sched, kg, CacheConfig{}, cost), ArgumentError);
  cost = cost_preset("u50");
  cost.clock_hz = 0;
  EXPECT_THROW(simulate(sched, kg, CacheConfig{}, cost), ArgumentError);
  EXPECT_THROW(cost_preset("u9"), ConfigError);
  EXPECT_THROW(parse_policy("mru"), ConfigError);
}

}  // namespace
}  // namespace hdkg::sim
