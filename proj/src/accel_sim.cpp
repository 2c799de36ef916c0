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

#include "hdkg/accel_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "hdkg/error.hpp"
#include "hdkg/version.hpp"

namespace hdkg::sim {

using nlohmann::json;

std::optional<std::uint64_t> EncodedRegistry::find(EntityId v) const {
  auto it = addr_.find(v);
  if (it == addr_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t EncodedRegistry::insert(EntityId v) {
  auto [it, added] = addr_.try_emplace(v, next_);
  if (added) next_ += slot_bytes_;
  return it->second;
}

namespace {

void emit(std::vector<ScheduleBatch>& out, const KnowledgeGraph& kg,
          std::vector<EntityId> members, bool tail, EncodedRegistry& registry) {
  ScheduleBatch b;
  b.tail = tail;
  for (EntityId v : members) {
    b.degree = std::max(b.degree, kg.degree(v));
    const bool needed = !registry.contains(v);
    b.encode_needed.push_back(needed ? 1 : 0);
    b.address.push_back(registry.insert(v));
    auto nb = kg.neighbors(v);
    b.neighbors.emplace_back(nb.begin(), nb.end());
  }
  b.members = std::move(members);
  out.push_back(std::move(b));
}

}  // namespace

std::vector<ScheduleBatch> schedule_epoch(const KnowledgeGraph& kg, std::size_t n_c,
                                          EncodedRegistry& registry) {
  if (n_c == 0) throw ArgumentError("schedule: N_c must be positive");
  std::vector<ScheduleBatch> out;
  std::map<std::size_t, std::vector<EntityId>> buckets;
  const auto nv = static_cast<EntityId>(kg.num_entities());
  for (EntityId v = 0; v < nv; ++v) {
    const std::size_t deg = kg.degree(v);
    if (deg == 0) continue;
    auto& bucket = buckets[deg];
    bucket.push_back(v);
    if (bucket.size() == n_c) {
      emit(out, kg, std::move(bucket), false, registry);
      bucket.clear();
    }
  }
  std::vector<EntityId> pending;
  for (auto it = buckets.rbegin(); it != buckets.rend(); ++it)
    pending.insert(pending.end(), it->second.begin(), it->second.end());
  for (std::size_t i = 0; i < pending.size(); i += n_c) {
    const std::size_t end = std::min(pending.size(), i + n_c);
    emit(out, kg, {pending.begin() + static_cast<std::ptrdiff_t>(i),
                   pending.begin() + static_cast<std::ptrdiff_t>(end)},
         true, registry);
  }
  return out;
}

void write_schedule_trace(const std::filesystem::path& path,
                          const std::vector<ScheduleBatch>& batches) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DatasetFormatError("cannot open for writing: " + path.string());
  for (const auto& b : batches) {
    json nb = json::array();
    for (const auto& list : b.neighbors) {
      json flat = json::array();
      for (const auto& n : list) {
        flat.push_back(n.vertex);
        flat.push_back(n.rel);
      }
      nb.push_back(std::move(flat));
    }
    json line = {{"degree", b.degree},
                 {"tail", b.tail},
                 {"members", b.members},
                 {"encode", b.encode_needed},
                 {"address", b.address},
                 {"neighbors", std::move(nb)}};
    out << line.dump() << '\n';
  }
  if (!out) throw DatasetFormatError("write failed: " + path.string());
}

std::vector<ScheduleBatch> read_schedule_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetFormatError("cannot open: " + path.string());
  std::vector<ScheduleBatch> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      ScheduleBatch b;
      b.degree = j.at("degree").get<std::size_t>();
      b.tail = j.at("tail").get<bool>();
      b.members = j.at("members").get<std::vector<EntityId>>();
      b.encode_needed = j.at("encode").get<std::vector<std::uint8_t>>();
      b.address = j.at("address").get<std::vector<std::uint64_t>>();
      for (const auto& flat : j.at("neighbors")) {
        const auto ids = flat.get<std::vector<std::int32_t>>();
        if (ids.size() % 2 != 0) throw ParseError(path.string(), lineno, "odd neighbor list");
        std::vector<Neighbor> list;
        for (std::size_t k = 0; k < ids.size(); k += 2) list.push_back({ids[k], ids[k + 1]});
        b.neighbors.push_back(std::move(list));
      }
      const std::size_t n = b.members.size();
      if (b.encode_needed.size() != n || b.address.size() != n || b.neighbors.size() != n)
        throw ParseError(path.string(), lineno, "per-member arrays differ in length");
      out.push_back(std::move(b));
    } catch (const json::exception& e) {
      throw ParseError(path.string(), lineno, e.what());
    }
  }
  return out;
}

std::string_view policy_name(CachePolicy p) {
  switch (p) {
    case CachePolicy::kLru: return "lru";
    case CachePolicy::kLfu: return "lfu";
    case CachePolicy::kRandom: return "random";
  }
  return "?";
}

CachePolicy parse_policy(std::string_view name) {
  if (name == "lru" || name == "LRU") return CachePolicy::kLru;
  if (name == "lfu" || name == "LFU") return CachePolicy::kLfu;
  if (name == "random" || name == "Random") return CachePolicy::kRandom;
  throw ConfigError("unknown cache policy: " + std::string(name));
}

Cache::Cache(std::size_t capacity, CachePolicy policy, std::uint64_t seed)
    : capacity_(capacity), policy_(policy), rng_(Rng::stream(seed, "random-policy")) {
  if (capacity == 0) throw ArgumentError("cache: capacity must be at least 1");
}

EntityId Cache::pick_victim() {
  switch (policy_) {
    case CachePolicy::kLru: return lru_.back();
    case CachePolicy::kLfu: return std::get<2>(*lfu_.begin());
    case CachePolicy::kRandom: return random_ids_[rng_.below(random_ids_.size())];
  }
  throw Error(ErrorCode::kInternal, "cache: bad policy");
}

void Cache::remove(EntityId v) {
  auto it = where_.find(v);
  Entry& e = it->second;
  lru_.erase(e.lru);
  lfu_.erase({e.freq, e.tick, v});
  EntityId moved = random_ids_.back();
  random_ids_[e.slot] = moved;
  where_[moved].slot = e.slot;
  random_ids_.pop_back();
  where_.erase(it);
}

AccessResult Cache::access(EntityId v) {
  ++tick_;
  AccessResult r;
  auto it = where_.find(v);
  if (it != where_.end()) {
    Entry& e = it->second;
    lfu_.erase({e.freq, e.tick, v});
    ++e.freq;
    e.tick = tick_;
    lfu_.insert({e.freq, e.tick, v});
    lru_.splice(lru_.begin(), lru_, e.lru);
    ++hits_;
    r.hit = true;
    return r;
  }
  ++misses_;
  if (where_.size() == capacity_) {
    const EntityId victim = pick_victim();
    remove(victim);
    ++evictions_;
    r.evicted = victim;
  }
  lru_.push_front(v);
  Entry e{1, tick_, random_ids_.size(), lru_.begin()};
  random_ids_.push_back(v);
  lfu_.insert({e.freq, e.tick, v});
  where_.emplace(v, e);
  return r;
}

void CostConfig::validate() const {
  auto positive = [](double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x))
      throw ArgumentError(std::string("cost config: ") + what + " must be positive");
  };
  positive(clock_hz, "clock frequency");
  positive(device_bandwidth, "device-memory bandwidth");
  positive(host_bandwidth, "host-link bandwidth");
  positive(encode_macs_per_cycle, "encode throughput");
  positive(memorize_lanes_per_engine, "memorization throughput");
  positive(train_macs_per_cycle, "training throughput");
  if (element_bytes == 0 || n_c == 0 || D == 0 || d == 0 || batch == 0 || chunk == 0 ||
      cache_slots == 0)
    throw ArgumentError("cost config: sizes must be positive");
}

CostConfig cost_preset(std::string_view name) {
  CostConfig c;
  if (name == "u50") {
    // HBM2 at its datasheet bandwidth. The encoder's 1024 DSPs are split
    // evenly between the encode array and 16 memorization engines; the
    // training IP has 1536. 128 UltraRAMs of 36 KiB hold 1 KiB vertex
    // hypervectors.
    c.name = "u50";
    c.clock_hz = 200e6;
    c.device_bandwidth = 460e9;
    c.host_bandwidth = 12e9;
    c.n_c = 16;
    c.chunk = 32;
    c.encode_macs_per_cycle = 512;
    c.memorize_lanes_per_engine = 32;
    c.train_macs_per_cycle = 1536;
    c.cache_slots = 128 * 36;
    return c;
  }
  if (name == "u280") {
    // Same HBM2 bandwidth; twice the engines, chunk width and DSP budget,
    // 256 UltraRAMs for vertex hypervectors.
    c.name = "u280";
    c.clock_hz = 200e6;
    c.device_bandwidth = 460e9;
    c.host_bandwidth = 12e9;
    c.n_c = 32;
    c.chunk = 64;
    c.encode_macs_per_cycle = 1024;
    c.memorize_lanes_per_engine = 32;
    c.train_macs_per_cycle = 3072;
    c.cache_slots = 256 * 36;
    return c;
  }
  throw ConfigError("unknown cost preset: " + std::string(name));
}

double StageReport::time_s() const { return std::max({compute_s, device_s, host_s}); }

namespace {

// Slowest stage plus one item's share of each of the others.
double pipeline(std::initializer_list<double> stages, std::size_t items) {
  if (items == 0) return 0.0;
  double sum = 0.0, top = 0.0;
  for (double s : stages) {
    sum += s;
    top = std::max(top, s);
  }
  return top + (sum - top) / static_cast<double>(items);
}

}  // namespace

SimReport simulate(const std::vector<ScheduleBatch>& schedule, const KnowledgeGraph& kg,
                   Cache& cache, const CostConfig& cost) {
  cost.validate();
  const double clk = cost.clock_hz;
  const double D = static_cast<double>(cost.D);
  const double d = static_cast<double>(cost.d);
  const std::uint64_t slot = cost.slot_bytes();
  const std::uint64_t eb = cost.element_bytes;

  SimReport r;
  r.preset = cost.name;
  r.vertices = kg.num_entities();
  r.batches = schedule.size();

  const auto h0 = cache.hits(), m0 = cache.misses(), e0 = cache.evictions();

  std::uint64_t enc_host = 0, enc_dev = 0;
  std::uint64_t mem_dev_read = 0, mem_dev_write = 0, mem_host = 0;
  double enc_cycles = 0.0, mem_cycles = 0.0;
  for (const auto& b : schedule) {
    if (b.tail) ++r.tail_batches;
    std::size_t widest = 0;
    for (std::size_t m = 0; m < b.members.size(); ++m) {
      if (b.encode_needed[m]) {
        ++r.encodes;
        enc_cycles += d * D / cost.encode_macs_per_cycle;
        enc_host += cost.d * eb;
        enc_dev += slot;
      }
      widest = std::max(widest, b.neighbors[m].size());
      r.edges += b.neighbors[m].size();
      mem_host += b.neighbors[m].size() * 8;
      for (const auto& n : b.neighbors[m])
        if (!cache.access(n.vertex).hit) mem_dev_read += slot;
      mem_dev_write += 2 * slot;  // memory and relation-sum rows
    }
    // Members run on separate engines; the batch waits for its widest member.
    mem_cycles += static_cast<double>(widest) * D / cost.memorize_lanes_per_engine;
  }
  r.bytes_neighbor_fetch = mem_dev_read;
  r.encode = {enc_cycles / clk, enc_dev / cost.device_bandwidth, enc_host / cost.host_bandwidth};
  r.memorize = {mem_cycles / clk, (mem_dev_read + mem_dev_write) / cost.device_bandwidth,
                mem_host / cost.host_bandwidth};

  // One training batch against every candidate vertex.
  const double V = static_cast<double>(kg.num_entities());
  const double B = static_cast<double>(cost.batch);
  const std::uint64_t nv = kg.num_entities();
  const std::uint64_t score_read = nv * slot + 2 * cost.batch * slot;
  const std::uint64_t score_write = cost.batch * slot;  // per-member gradient row sums
  const std::uint64_t score_to_host = cost.batch * nv * eb;
  const std::uint64_t score_from_host = cost.batch * 8;
  r.score = {B * V * D / cost.score_ops_per_cycle() / clk,
             (score_read + score_write) / cost.device_bandwidth,
             (score_to_host + score_from_host) / cost.host_bandwidth};

  const std::size_t chunks = (nv + cost.chunk - 1) / cost.chunk;
  const double T = static_cast<double>(cost.chunk);
  double train_macs = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    const double w = std::min(T, V - static_cast<double>(c) * T);
    train_macs += w * B * D + w * D + w * D * d;
  }
  const std::uint64_t train_read = nv * slot + cost.d * cost.D * eb;
  const std::uint64_t train_from_host = cost.batch * nv * eb;  // delta
  const std::uint64_t train_to_host = (nv + kg.num_relations()) * cost.d * eb + eb;
  r.train = {train_macs / cost.train_macs_per_cycle / clk,
             train_read / cost.device_bandwidth,
             (train_from_host + train_to_host) / cost.host_bandwidth};

  r.cache_hits = cache.hits() - h0;
  r.cache_misses = cache.misses() - m0;
  r.cache_evictions = cache.evictions() - e0;
  const auto accesses = r.cache_hits + r.cache_misses;
  r.hit_rate = accesses ? static_cast<double>(r.cache_hits) / static_cast<double>(accesses) : 0.0;

  r.bytes_host_to_device = enc_host + mem_host + score_from_host + train_from_host;
  r.bytes_device_to_host = score_to_host + train_to_host;
  r.bytes_device_read = mem_dev_read + score_read + train_read;
  r.bytes_device_write = enc_dev + mem_dev_write + score_write;
  // Encoded, memory and relation-sum tables plus the per-member gradient rows.
  r.device_memory_bytes = 3 * nv * slot + cost.batch * slot + cost.d * cost.D * eb;

  r.graph_pass_s = pipeline({r.encode.time_s(), r.memorize.time_s()}, schedule.size());
  const double score_s = pipeline({r.score.compute_s, r.score.device_s, r.score.host_s},
                                  std::max<std::size_t>(1, chunks));
  const double train_s = pipeline({r.train.compute_s, r.train.device_s, r.train.host_s},
                                  std::max<std::size_t>(1, chunks));
  r.latency_s = r.graph_pass_s + score_s + train_s;
  return r;
}

SimReport simulate(const std::vector<ScheduleBatch>& schedule, const KnowledgeGraph& kg,
                   const CacheConfig& cfg, const CostConfig& cost) {
  Cache cache(cfg.capacity, cfg.policy, cfg.seed);
  return simulate(schedule, kg, cache, cost);
}

namespace {

json stage_json(const StageReport& s) {
  return {{"compute_s", s.compute_s},
          {"device_s", s.device_s},
          {"host_s", s.host_s},
          {"time_s", s.time_s()}};
}

}  // namespace

std::string report_json(const SimReport& r, std::uint64_t config_hash, std::uint64_t seed) {
  json j;
  j["kind"] = "sim_report";
  j["version"] = kVersion;
  j["config_hash"] = hex64(config_hash);
  j["seed"] = seed;
  j["preset"] = r.preset;
  j["vertices"] = r.vertices;
  j["edges"] = r.edges;
  j["batches"] = r.batches;
  j["tail_batches"] = r.tail_batches;
  j["encodes"] = r.encodes;
  j["stages"] = {{"encode", stage_json(r.encode)},
                 {"memorize", stage_json(r.memorize)},
                 {"score", stage_json(r.score)},
                 {"train", stage_json(r.train)}};
  j["cache"] = {{"hits", r.cache_hits},
                {"misses", r.cache_misses},
                {"evictions", r.cache_evictions},
                {"hit_rate", r.hit_rate}};
  j["bytes"] = {{"host_to_device", r.bytes_host_to_device},
                {"device_to_host", r.bytes_device_to_host},
                {"device_read", r.bytes_device_read},
                {"device_write", r.bytes_device_write},
                {"neighbor_fetch", r.bytes_neighbor_fetch}};
  j["device_memory_bytes"] = r.device_memory_bytes;
  j["graph_pass_s"] = r.graph_pass_s;
  j["latency_s"] = r.latency_s;
  return j.dump(2) + "\n";
}

std::vector<SweepRow> capacity_sweep(const std::vector<ScheduleBatch>& schedule,
                                     const KnowledgeGraph& kg, const CostConfig& cost,
                                     const std::vector<std::size_t>& capacities,
                                     const std::vector<CachePolicy>& policies,
                                     std::uint64_t seed) {
  std::vector<SweepRow> rows;
  for (CachePolicy p : policies) {
    for (std::size_t cap : capacities) {
      const SimReport r = simulate(schedule, kg, CacheConfig{cap, p, seed}, cost);
      rows.push_back({cap, p, r.hit_rate, r.bytes_neighbor_fetch, r.latency_s * 1e3});
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "capacity,policy,hit_rate,bytes_hbm,latency_model_ms\n";
  for (const auto& r : rows)
    out << r.capacity << ',' << policy_name(r.policy) << ',' << r.hit_rate << ','
        << r.bytes_hbm << ',' << r.latency_model_ms << '\n';
  return out.str();
}

}  // namespace hdkg::sim
