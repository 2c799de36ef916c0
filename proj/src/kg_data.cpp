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

#include "hdkg/kg_data.hpp"

#include <fstream>
#include <limits>

#include "hdkg/binary_io.hpp"
#include "hdkg/error.hpp"

namespace hdkg {

namespace {

constexpr std::uint32_t kCacheVersion = 1;

struct RawTriple {
  std::string head, rel, tail;
};

std::vector<RawTriple> read_split(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DatasetFormatError("missing dataset file: " + file.string());

  std::vector<RawTriple> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 3)
      throw ParseError(file.string(), lineno,
                       "expected 3 tab-separated fields, got " +
                           std::to_string(fields.size()));
    for (const auto& f : fields)
      if (f.empty()) throw ParseError(file.string(), lineno, "empty field");
    out.push_back({std::move(fields[0]), std::move(fields[1]), std::move(fields[2])});
  }
  return out;
}

}  // namespace

std::int32_t Vocabulary::intern(std::string_view name) {
  std::string key(name);
  auto it = ids_.find(key);
  if (it != ids_.end()) return it->second;
  if (names_.size() >= static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max()))
    throw DatasetFormatError("vocabulary overflow");
  auto id = static_cast<std::int32_t>(names_.size());
  names_.push_back(key);
  ids_.emplace(std::move(key), id);
  return id;
}

std::optional<std::int32_t> Vocabulary::find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

KnowledgeGraph::KnowledgeGraph(Vocabulary entities, Vocabulary relations,
                               std::vector<Triple> train,
                               std::vector<Triple> valid,
                               std::vector<Triple> test, bool reciprocal,
                               std::int32_t base_relations)
    : entities_(std::move(entities)),
      relations_(std::move(relations)),
      train_(std::move(train)),
      valid_(std::move(valid)),
      test_(std::move(test)),
      reciprocal_(reciprocal),
      base_relations_(base_relations < 0 ? relations_.size()
                                         : static_cast<std::size_t>(base_relations)) {
  validate();
  build_adjacency();
}

KnowledgeGraph KnowledgeGraph::from_ids(std::size_t num_entities,
                                        std::size_t num_relations,
                                        std::vector<Triple> train,
                                        std::vector<Triple> valid,
                                        std::vector<Triple> test) {
  Vocabulary ents, rels;
  for (std::size_t i = 0; i < num_entities; ++i) ents.intern("e" + std::to_string(i));
  for (std::size_t i = 0; i < num_relations; ++i) rels.intern("r" + std::to_string(i));
  return KnowledgeGraph(std::move(ents), std::move(rels), std::move(train),
                        std::move(valid), std::move(test));
}

const std::vector<Triple>& KnowledgeGraph::split(std::string_view name) const {
  if (name == "train") return train_;
  if (name == "valid") return valid_;
  if (name == "test") return test_;
  throw ArgumentError("unknown split: " + std::string(name));
}

void KnowledgeGraph::validate() const {
  auto nv = static_cast<std::int64_t>(entities_.size());
  auto nr = static_cast<std::int64_t>(relations_.size());
  for (const auto* split : {&train_, &valid_, &test_}) {
    for (const Triple& t : *split) {
      if (t.head < 0 || t.head >= nv || t.tail < 0 || t.tail >= nv)
        throw ArgumentError("triple entity id out of range");
      if (t.rel < 0 || t.rel >= nr)
        throw ArgumentError("triple relation id out of range");
    }
  }
  if (train_.size() >= std::numeric_limits<std::uint32_t>::max())
    throw DatasetFormatError("training split too large for 32-bit CSR offsets");
}

void KnowledgeGraph::build_adjacency() {
  const std::size_t nv = entities_.size();
  const std::size_t nr = relations_.size();

  csr_.assign(nr, RelationCsr{});
  for (auto& c : csr_) c.row_ptr.assign(nv + 1, 0);
  for (const Triple& t : train_) ++csr_[t.rel].row_ptr[t.head + 1];
  for (auto& c : csr_) {
    for (std::size_t v = 0; v < nv; ++v) c.row_ptr[v + 1] += c.row_ptr[v];
    c.cols.resize(c.row_ptr[nv]);
  }
  {
    std::vector<std::vector<std::uint32_t>> cursor(nr);
    for (std::size_t r = 0; r < nr; ++r)
      cursor[r].assign(csr_[r].row_ptr.begin(), csr_[r].row_ptr.end() - 1);
    for (const Triple& t : train_) csr_[t.rel].cols[cursor[t.rel][t.head]++] = t.tail;
  }

  neighbor_ptr_.assign(nv + 1, 0);
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t v = 0; v < nv; ++v)
      neighbor_ptr_[v + 1] += csr_[r].row_ptr[v + 1] - csr_[r].row_ptr[v];
  for (std::size_t v = 0; v < nv; ++v) neighbor_ptr_[v + 1] += neighbor_ptr_[v];

  neighbors_.resize(neighbor_ptr_[nv]);
  std::vector<std::size_t> fill(neighbor_ptr_.begin(), neighbor_ptr_.end() - 1);
  for (std::size_t r = 0; r < nr; ++r) {
    const auto& c = csr_[r];
    for (std::size_t v = 0; v < nv; ++v)
      for (std::uint32_t k = c.row_ptr[v]; k < c.row_ptr[v + 1]; ++k)
        neighbors_[fill[v]++] = Neighbor{c.cols[k], static_cast<RelationId>(r)};
  }
}

KnowledgeGraph load_dataset(const std::filesystem::path& dir) {
  auto train_raw = read_split(dir / "train.txt");
  auto valid_raw = read_split(dir / "valid.txt");
  auto test_raw = read_split(dir / "test.txt");

  Vocabulary ents, rels;
  auto convert = [&](const std::vector<RawTriple>& raw) {
    std::vector<Triple> out;
    out.reserve(raw.size());
    for (const auto& t : raw) {
      Triple x;
      x.head = ents.intern(t.head);
      x.rel = rels.intern(t.rel);
      x.tail = ents.intern(t.tail);
      out.push_back(x);
    }
    return out;
  };
  auto train = convert(train_raw);
  auto valid = convert(valid_raw);
  auto test = convert(test_raw);
  return KnowledgeGraph(std::move(ents), std::move(rels), std::move(train),
                        std::move(valid), std::move(test));
}

KnowledgeGraph add_reciprocal(const KnowledgeGraph& kg) {
  if (kg.reciprocal())
    throw ArgumentError("graph already has reciprocal relations");

  const auto nr = static_cast<RelationId>(kg.num_relations());
  Vocabulary rels = kg.relations();
  for (RelationId r = 0; r < nr; ++r) rels.intern(kg.relations().name(r) + "_reverse");
  if (rels.size() != 2 * static_cast<std::size_t>(nr))
    throw DatasetFormatError("relation name collides with a generated _reverse name");

  auto mirror = [nr](const std::vector<Triple>& in) {
    std::vector<Triple> out(in);
    out.reserve(2 * in.size());
    for (const Triple& t : in) out.push_back(Triple{t.tail, t.rel + nr, t.head});
    return out;
  };
  return KnowledgeGraph(kg.entities(), std::move(rels), mirror(kg.train()),
                        mirror(kg.valid()), mirror(kg.test()), true, nr);
}

DegreeHistogram degree_histogram(const KnowledgeGraph& kg) {
  DegreeHistogram h;
  for (std::size_t v = 0; v < kg.num_entities(); ++v)
    h[kg.degree(static_cast<EntityId>(v))].push_back(static_cast<EntityId>(v));
  return h;
}

DegreeSummary degree_summary(const KnowledgeGraph& kg) {
  DegreeSummary s;
  if (kg.num_entities() == 0) return s;
  const double nv = static_cast<double>(kg.num_entities());
  const double edges = static_cast<double>(kg.train().size());
  if (kg.reciprocal()) {
    s.mean_degree = edges / 2.0 / nv;
    s.mean_degree_with_reciprocals = edges / nv;
  } else {
    s.mean_degree = edges / nv;
    s.mean_degree_with_reciprocals = 2.0 * edges / nv;
  }
  for (std::size_t v = 0; v < kg.num_entities(); ++v)
    s.max_degree = std::max(s.max_degree, kg.degree(static_cast<EntityId>(v)));
  return s;
}

// .hdkg layout (all integers little-endian):
//   "HDKG" u32 version u64 config_hash u64 seed u32 flags u32 base_relations
//   vocab(entities) vocab(relations)      vocab := u32 n, n x (u32 len, bytes)
//   3 x split (train, valid, test)        split := u64 n, n x (i32 h, i32 r, i32 t)
//   u32 num_relations, per relation: u32 row_ptr[|V|+1], u64 ncols, i32 cols[ncols]
void save_graph_cache(const KnowledgeGraph& kg, const std::filesystem::path& path,
                      const ArtifactStamp& stamp) {
  io::Writer w(path);
  w.magic("HDKG");
  w.scalar<std::uint32_t>(kCacheVersion);
  w.scalar<std::uint64_t>(stamp.config_hash);
  w.scalar<std::uint64_t>(stamp.seed);
  w.scalar<std::uint32_t>(kg.reciprocal() ? 1u : 0u);
  w.scalar<std::uint32_t>(static_cast<std::uint32_t>(kg.num_base_relations()));
  for (const Vocabulary* v : {&kg.entities(), &kg.relations()}) {
    w.scalar<std::uint32_t>(static_cast<std::uint32_t>(v->size()));
    for (const auto& n : v->names()) w.string(n);
  }
  for (const auto* split : {&kg.train(), &kg.valid(), &kg.test()}) {
    w.scalar<std::uint64_t>(split->size());
    std::vector<std::int32_t> flat;
    flat.reserve(split->size() * 3);
    for (const Triple& t : *split) {
      flat.push_back(t.head);
      flat.push_back(t.rel);
      flat.push_back(t.tail);
    }
    w.array<std::int32_t>(flat);
  }
  w.scalar<std::uint32_t>(static_cast<std::uint32_t>(kg.csr().size()));
  for (const auto& c : kg.csr()) {
    w.array<std::uint32_t>(c.row_ptr);
    w.scalar<std::uint64_t>(c.cols.size());
    w.array<std::int32_t>(c.cols);
  }
  w.close();
}

KnowledgeGraph load_graph_cache(const std::filesystem::path& path,
                                ArtifactStamp* stamp) {
  io::Reader r(path);
  r.expect_magic("HDKG");
  auto version = r.scalar<std::uint32_t>();
  if (version != kCacheVersion)
    throw VersionError("graph cache version " + std::to_string(version) +
                       " is not supported (expected " +
                       std::to_string(kCacheVersion) + ")");
  ArtifactStamp st;
  st.config_hash = r.scalar<std::uint64_t>();
  st.seed = r.scalar<std::uint64_t>();
  if (stamp) *stamp = st;
  const bool reciprocal = r.scalar<std::uint32_t>() & 1u;
  const auto base_relations = r.scalar<std::uint32_t>();

  Vocabulary vocabs[2];
  for (auto& v : vocabs) {
    auto n = r.scalar<std::uint32_t>();
    for (std::uint32_t i = 0; i < n; ++i) v.intern(r.string());
    if (v.size() != n) throw DatasetFormatError("duplicate names in cached vocabulary");
  }
  std::vector<Triple> splits[3];
  for (auto& s : splits) {
    auto n = r.scalar<std::uint64_t>();
    auto flat = r.array<std::int32_t>(n * 3);
    s.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      s[i] = Triple{flat[3 * i], flat[3 * i + 1], flat[3 * i + 2]};
  }
  KnowledgeGraph kg(std::move(vocabs[0]), std::move(vocabs[1]), std::move(splits[0]),
                    std::move(splits[1]), std::move(splits[2]), reciprocal,
                    static_cast<std::int32_t>(base_relations));

  // The stored CSR must agree with the one rebuilt from the triples.
  auto nrel = r.scalar<std::uint32_t>();
  if (nrel != kg.csr().size()) throw DatasetFormatError("cached CSR relation count mismatch");
  for (const auto& c : kg.csr()) {
    auto rp = r.array<std::uint32_t>(kg.num_entities() + 1);
    auto ncols = r.scalar<std::uint64_t>();
    auto cols = r.array<std::int32_t>(ncols);
    if (rp != c.row_ptr || cols != c.cols)
      throw DatasetFormatError("cached CSR does not match cached triples");
  }
  return kg;
}

KnowledgeGraph load_graph(const std::filesystem::path& path) {
  if (std::filesystem::is_regular_file(path)) return load_graph_cache(path);
  return load_dataset(path);
}

}  // namespace hdkg
