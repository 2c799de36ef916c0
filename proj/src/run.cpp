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

#include "hdkg/run.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"

#include "hdkg/accel_sim.hpp"
#include "hdkg/binary_io.hpp"
#include "hdkg/error.hpp"
#include "hdkg/eval.hpp"
#include "hdkg/robustness.hpp"
#include "hdkg/version.hpp"

namespace hdkg::run {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why) {
  throw ConfigError("bad value for config key '" + std::string(key) + "': '" +
                    std::string(value) + "' (" + std::string(why) + ")");
}

template <typename T>
T parse_int(std::string_view key, std::string_view v) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v, "expected an integer");
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  const std::string s(v);
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(x))
    bad_value(key, v, "expected a finite number");
  return x;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "expected true or false");
}

std::vector<std::size_t> parse_list(std::string_view key, std::string_view v) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    auto comma = v.find(',', start);
    if (comma == std::string_view::npos) comma = v.size();
    out.push_back(parse_int<std::size_t>(key, trim(v.substr(start, comma - start))));
    start = comma + 1;
  }
  return out;
}

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

void one_of(std::string_view key, const std::string& v,
            std::initializer_list<std::string_view> allowed) {
  for (auto a : allowed)
    if (v == a) return;
  std::string list;
  for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  bad_value(key, v, "expected one of " + list);
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto str = [](std::string RunConfig::*f) {
      return [f](RunConfig& c, std::string_view, std::string_view v) { c.*f = std::string(v); };
    };
    auto size = [](std::size_t RunConfig::*f) {
      return [f](RunConfig& c, std::string_view k, std::string_view v) {
        c.*f = parse_int<std::size_t>(k, v);
      };
    };
    auto real = [](double RunConfig::*f) {
      return [f](RunConfig& c, std::string_view k, std::string_view v) { c.*f = parse_double(k, v); };
    };
    auto flag = [](bool RunConfig::*f) {
      return [f](RunConfig& c, std::string_view k, std::string_view v) { c.*f = parse_bool(k, v); };
    };
    auto integer = [](int RunConfig::*f) {
      return [f](RunConfig& c, std::string_view k, std::string_view v) { c.*f = parse_int<int>(k, v); };
    };
    t["dataset"] = str(&RunConfig::dataset);
    t["reciprocal"] = flag(&RunConfig::reciprocal);
    t["d"] = size(&RunConfig::d);
    t["D"] = size(&RunConfig::D);
    t["seed"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.seed = parse_int<std::uint64_t>(k, v);
    };
    t["batch"] = size(&RunConfig::batch);
    t["chunk"] = size(&RunConfig::chunk);
    t["n_c"] = size(&RunConfig::n_c);
    t["epochs"] = size(&RunConfig::epochs);
    t["lr"] = real(&RunConfig::lr);
    t["optimizer"] = str(&RunConfig::optimizer);
    t["mode"] = str(&RunConfig::mode);
    t["score_sign"] = str(&RunConfig::score_sign);
    t["activation"] = str(&RunConfig::activation);
    t["init_scale"] = real(&RunConfig::init_scale);
    t["label_smoothing"] = real(&RunConfig::label_smoothing);
    t["split"] = str(&RunConfig::split);
    t["filtered"] = flag(&RunConfig::filtered);
    t["vertex"] = str(&RunConfig::vertex);
    t["relation"] = str(&RunConfig::relation);
    t["metric"] = str(&RunConfig::metric);
    t["top_k"] = size(&RunConfig::top_k);
    t["cache_capacity"] = size(&RunConfig::cache_capacity);
    t["policy"] = str(&RunConfig::policy);
    t["cost_preset"] = str(&RunConfig::cost_preset);
    t["sweep"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.sweep = parse_list(k, v);
    };
    t["trace"] = str(&RunConfig::trace);
    t["fix_bits"] = integer(&RunConfig::fix_bits);
    t["frac_bits"] = integer(&RunConfig::frac_bits);
    t["drop_frac"] = real(&RunConfig::drop_frac);
    t["drop_strategy"] = str(&RunConfig::drop_strategy);
    t["entropy_bins"] = size(&RunConfig::entropy_bins);
    t["checkpoint"] = str(&RunConfig::checkpoint);
    t["out_dir"] = str(&RunConfig::out_dir);
    return t;
  }();
  return table;
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
  const auto& t = setters();
  auto it = t.find(key);
  if (it == t.end()) throw ConfigError("unknown config key: '" + std::string(key) + "'");
  it->second(*this, key, trim(value));
}

void RunConfig::load_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    set(trim(std::string_view(body).substr(0, eq)), std::string_view(body).substr(eq + 1));
  }
}

void RunConfig::validate() const {
  auto positive = [](std::string_view key, std::size_t v) {
    if (v == 0) bad_value(key, "0", "must be positive");
  };
  positive("d", d);
  positive("D", D);
  positive("batch", batch);
  positive("chunk", chunk);
  positive("n_c", n_c);
  positive("top_k", top_k);
  positive("entropy_bins", entropy_bins);
  if (lr < 0) bad_value("lr", fmt_double(lr), "must be non-negative");
  if (init_scale <= 0) bad_value("init_scale", fmt_double(init_scale), "must be positive");
  if (label_smoothing < 0 || label_smoothing >= 1)
    bad_value("label_smoothing", fmt_double(label_smoothing), "must be in [0, 1)");
  if (drop_frac <= 0 || drop_frac >= 1)
    bad_value("drop_frac", fmt_double(drop_frac), "must be in (0, 1)");
  if (fix_bits < 2 || fix_bits > 62)
    bad_value("fix_bits", std::to_string(fix_bits), "must be in [2, 62]");
  if (frac_bits < 0 || frac_bits >= fix_bits)
    bad_value("frac_bits", std::to_string(frac_bits), "must be in [0, fix_bits)");
  if (sweep.empty()) bad_value("sweep", "", "needs at least one capacity");
  for (auto c : sweep)
    if (c == 0) bad_value("sweep", join(sweep), "capacities must be positive");
  one_of("optimizer", optimizer, {"sgd", "momentum", "adagrad"});
  one_of("mode", mode, {"reference", "hardware"});
  one_of("score_sign", score_sign, {"distance", "literal"});
  one_of("activation", activation, {"tanh", "identity"});
  one_of("split", split, {"train", "valid", "test"});
  one_of("metric", metric, {"cosine", "neg-l1", "sign-hamming"});
  one_of("policy", policy, {"lru", "lfu", "random"});
  one_of("cost_preset", cost_preset, {"u50", "u280"});
  one_of("drop_strategy", drop_strategy, {"low-entropy", "entropy", "random"});
}

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv{
      {"dataset", dataset},
      {"reciprocal", reciprocal ? "true" : "false"},
      {"d", std::to_string(d)},
      {"D", std::to_string(D)},
      {"seed", std::to_string(seed)},
      {"batch", std::to_string(batch)},
      {"chunk", std::to_string(chunk)},
      {"n_c", std::to_string(n_c)},
      {"epochs", std::to_string(epochs)},
      {"lr", fmt_double(lr)},
      {"optimizer", optimizer},
      {"mode", mode},
      {"score_sign", score_sign},
      {"activation", activation},
      {"init_scale", fmt_double(init_scale)},
      {"label_smoothing", fmt_double(label_smoothing)},
      {"split", split},
      {"filtered", filtered ? "true" : "false"},
      {"vertex", vertex},
      {"relation", relation},
      {"metric", metric},
      {"top_k", std::to_string(top_k)},
      {"cache_capacity", std::to_string(cache_capacity)},
      {"policy", policy},
      {"cost_preset", cost_preset},
      {"sweep", join(sweep)},
      {"trace", trace},
      {"fix_bits", std::to_string(fix_bits)},
      {"frac_bits", std::to_string(frac_bits)},
      {"drop_frac", fmt_double(drop_frac)},
      {"drop_strategy", drop_strategy},
      {"entropy_bins", std::to_string(entropy_bins)},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::uint64_t RunConfig::hash() const { return fnv1a64(canonical()); }

fs::path default_out_dir() {
  if (const char* env = std::getenv("HDKG_OUT_DIR"); env && *env) return env;
  return "hdkg-out";
}

fs::path RunConfig::out_path() const {
  return out_dir.empty() ? default_out_dir() : fs::path(out_dir);
}

fs::path RunConfig::checkpoint_path() const {
  return checkpoint.empty() ? out_path() / "checkpoint.hdck" : fs::path(checkpoint);
}

ModelConfig RunConfig::model_config() const {
  ModelConfig m;
  m.d = d;
  m.D = D;
  m.seed = seed;
  m.mode = mode == "hardware" ? GradientMode::kHardware : GradientMode::kReference;
  m.score_sign = score_sign == "literal" ? ScoreSign::kLiteral : ScoreSign::kDistance;
  m.activation = activation == "identity" ? Activation::kIdentity : Activation::kTanh;
  m.init_scale = init_scale;
  return m;
}

namespace {

constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace

void save_checkpoint(const fs::path& path, const ModelState& state, const CheckpointInfo& info) {
  io::Writer w(path);
  const ModelConfig& c = state.config;
  w.magic("HDCK");
  w.scalar<std::uint32_t>(kCheckpointVersion);
  w.string(kPrngId);
  w.scalar<std::uint64_t>(info.config_hash);
  w.scalar<std::uint64_t>(c.d);
  w.scalar<std::uint64_t>(c.D);
  w.scalar<std::uint64_t>(state.num_entities());
  w.scalar<std::uint64_t>(state.num_relations());
  w.scalar<std::uint64_t>(c.seed);
  w.scalar<std::uint32_t>(static_cast<std::uint32_t>(c.mode));
  w.scalar<std::uint32_t>(static_cast<std::uint32_t>(c.score_sign));
  w.scalar<std::uint32_t>(static_cast<std::uint32_t>(c.activation));
  w.scalar<std::uint32_t>(c.freeze_bias ? 1 : 0);
  w.string(info.optimizer);
  w.scalar<std::uint64_t>(info.epochs);
  w.scalar<double>(c.init_scale);
  w.scalar<double>(state.bias);
  w.array<double>(state.e_v.data());
  w.array<double>(state.e_r.data());
  w.close();
}

ModelState load_checkpoint(const fs::path& path, CheckpointInfo* info) {
  if (!fs::exists(path)) throw DatasetFormatError("checkpoint not found: " + path.string());
  io::Reader r(path);
  r.expect_magic("HDCK");
  const auto version = r.scalar<std::uint32_t>();
  if (version != kCheckpointVersion)
    throw VersionError("checkpoint " + path.string() + " has format version " +
                       std::to_string(version) + ", expected " +
                       std::to_string(kCheckpointVersion));
  const std::string prng = r.string();
  if (prng != kPrngId)
    throw VersionError("checkpoint " + path.string() + " was written with generator '" + prng +
                       "', this build uses '" + std::string(kPrngId) + "'");
  CheckpointInfo ci;
  ci.config_hash = r.scalar<std::uint64_t>();
  ModelConfig c;
  c.d = r.scalar<std::uint64_t>();
  c.D = r.scalar<std::uint64_t>();
  const auto nv = r.scalar<std::uint64_t>();
  const auto nr = r.scalar<std::uint64_t>();
  c.seed = r.scalar<std::uint64_t>();
  c.mode = static_cast<GradientMode>(r.scalar<std::uint32_t>());
  c.score_sign = static_cast<ScoreSign>(r.scalar<std::uint32_t>());
  c.activation = static_cast<Activation>(r.scalar<std::uint32_t>());
  c.freeze_bias = r.scalar<std::uint32_t>() != 0;
  ci.optimizer = r.string();
  ci.epochs = r.scalar<std::uint64_t>();
  c.init_scale = r.scalar<double>();
  const double bias = r.scalar<double>();
  if (c.d == 0 || c.D == 0 || nv == 0 || nv > (1u << 30) || nr > (1u << 30) ||
      c.d > (1u << 20) || c.D > (1u << 20))
    throw DatasetFormatError("checkpoint " + path.string() + " has an implausible shape");
  ModelState state(c, nv, nr);
  state.e_v.data() = r.array<double>(nv * c.d);
  state.e_r.data() = r.array<double>(nr * c.d);
  state.bias = bias;
  state.touch();
  if (info) *info = ci;
  return state;
}

KnowledgeGraph load_run_graph(const RunConfig& cfg) {
  if (cfg.dataset.empty()) throw ConfigError("config key 'dataset' is required");
  KnowledgeGraph kg = load_graph(cfg.dataset);
  if (cfg.reciprocal && !kg.reciprocal()) kg = add_reciprocal(kg);
  return kg;
}

const std::vector<std::string_view> kCommands{"ingest",   "train",         "eval",
                                              "reconstruct", "simulate", "quantize-eval",
                                              "drop-dims-eval"};

namespace {

json stamp(const RunConfig& cfg, std::string_view command) {
  return {{"version", kVersion},
          {"command", command},
          {"config_hash", hex64(cfg.hash())},
          {"seed", cfg.seed}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw DatasetFormatError("write failed: " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json metrics_json(const Metrics& m) {
  return {{"mrr", m.mrr}, {"hits1", m.hits1}, {"hits3", m.hits3}, {"hits10", m.hits10},
          {"count", m.count}};
}

struct CsvRow {
  std::string command, split, variant;
  std::optional<Metrics> m;
  std::optional<double> loss;
};

void append_metrics_csv(const RunConfig& cfg, const CsvRow& row) {
  const fs::path path = cfg.out_path() / "metrics.csv";
  const bool fresh = !fs::exists(path);
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (fresh) out << "command,split,variant,mrr,hits1,hits3,hits10,count,loss,config_hash,seed\n";
  out << row.command << ',' << row.split << ',' << row.variant << ',';
  if (row.m)
    out << fmt_double(row.m->mrr) << ',' << fmt_double(row.m->hits1) << ','
        << fmt_double(row.m->hits3) << ',' << fmt_double(row.m->hits10) << ',' << row.m->count;
  else
    out << ",,,,";
  out << ',' << (row.loss ? fmt_double(*row.loss) : "") << ',' << hex64(cfg.hash()) << ','
      << cfg.seed << '\n';
  if (!out) throw DatasetFormatError("write failed: " + path.string());
}

OptimizerKind optimizer_kind(const std::string& name) {
  if (name == "momentum") return OptimizerKind::kMomentum;
  if (name == "adagrad") return OptimizerKind::kAdagrad;
  return OptimizerKind::kSgd;
}

ModelState load_model_for(const RunConfig& cfg, const KnowledgeGraph& kg) {
  ModelState state = load_checkpoint(cfg.checkpoint_path());
  if (state.num_entities() != kg.num_entities() || state.num_relations() != kg.num_relations())
    throw DatasetFormatError("checkpoint shape (" + std::to_string(state.num_entities()) + " x " +
                             std::to_string(state.num_relations()) +
                             ") does not match the dataset (" +
                             std::to_string(kg.num_entities()) + " x " +
                             std::to_string(kg.num_relations()) + ")");
  state.refresh(kg);
  return state;
}

Metrics evaluate(const RunConfig& cfg, const KnowledgeGraph& kg, const ScoreView& view,
                 const FilterIndex& filter) {
  RankOptions opts;
  opts.filtered = cfg.filtered;
  opts.batch_size = cfg.batch;
  auto records = rank_queries(kg.split(cfg.split), view, filter, opts);
  return metrics(records);
}

void cmd_ingest(const RunConfig& cfg) {
  const KnowledgeGraph kg = load_run_graph(cfg);
  save_graph_cache(kg, cfg.out_path() / "graph.hdkg", {cfg.hash(), cfg.seed});
  const DegreeSummary ds = degree_summary(kg);
  json j = stamp(cfg, "ingest");
  j["entities"] = kg.num_entities();
  j["relations"] = kg.num_relations();
  j["base_relations"] = kg.num_base_relations();
  j["reciprocal"] = kg.reciprocal();
  j["train"] = kg.train().size();
  j["valid"] = kg.valid().size();
  j["test"] = kg.test().size();
  j["mean_degree"] = ds.mean_degree;
  j["mean_degree_with_reciprocals"] = ds.mean_degree_with_reciprocals;
  j["max_degree"] = ds.max_degree;
  write_json(cfg.out_path() / "ingest.json", j);
}

void cmd_train(const RunConfig& cfg) {
  const KnowledgeGraph kg = load_run_graph(cfg);
  ModelState state(cfg.model_config(), kg.num_entities(), kg.num_relations());
  OptimizerConfig oc;
  oc.kind = optimizer_kind(cfg.optimizer);
  oc.lr = cfg.lr;
  Optimizer opt(oc);
  TrainConfig tc;
  tc.batch_size = cfg.batch;
  tc.chunk = cfg.chunk;
  tc.label_smoothing = cfg.label_smoothing;
  const TrainingQueries queries = build_training_queries(kg);
  Rng rng = Rng::stream(cfg.seed, "shuffle");

  std::ofstream log(cfg.out_path() / "train_metrics.jsonl", std::ios::binary | std::ios::trunc);
  std::vector<double> losses;
  for (std::size_t e = 1; e <= cfg.epochs; ++e) {
    const EpochStats st = train_epoch(kg, queries, state, opt, tc, rng);
    if (!std::isfinite(st.mean_loss))
      throw Error(ErrorCode::kNumeric, "training loss is not finite at epoch " + std::to_string(e));
    losses.push_back(st.mean_loss);
    json line = stamp(cfg, "train");
    line["epoch"] = e;
    line["mean_loss"] = st.mean_loss;
    line["batches"] = st.batches;
    log << line.dump() << '\n';
  }
  log.close();
  save_checkpoint(cfg.checkpoint_path(), state, {cfg.hash(), cfg.epochs, cfg.optimizer});
  json j = stamp(cfg, "train");
  j["epochs"] = cfg.epochs;
  j["queries"] = queries.size();
  j["losses"] = losses;
  j["bias"] = state.bias;
  write_json(cfg.out_path() / "train.json", j);
  CsvRow row{"train", "train", "full", std::nullopt, std::nullopt};
  if (!losses.empty()) row.loss = losses.back();
  append_metrics_csv(cfg, row);
}

void cmd_eval(const RunConfig& cfg) {
  const KnowledgeGraph kg = load_run_graph(cfg);
  const ModelState state = load_model_for(cfg, kg);
  const FilterIndex filter(kg);
  const Metrics m = evaluate(cfg, kg, score_view(state), filter);
  json j = stamp(cfg, "eval");
  j["split"] = cfg.split;
  j["filtered"] = cfg.filtered;
  j["metrics"] = metrics_json(m);
  write_json(cfg.out_path() / "eval.json", j);
  append_metrics_csv(cfg, {"eval", cfg.split, "full", m, std::nullopt});
}

std::int32_t lookup(const Vocabulary& vocab, const std::string& key, std::string_view what) {
  if (auto id = vocab.find(key)) return *id;
  std::int32_t id = -1;
  auto [p, ec] = std::from_chars(key.data(), key.data() + key.size(), id);
  if (ec == std::errc() && p == key.data() + key.size() && id >= 0 &&
      static_cast<std::size_t>(id) < vocab.size())
    return id;
  throw ConfigError("unknown " + std::string(what) + ": '" + key + "'");
}

void cmd_reconstruct(const RunConfig& cfg) {
  const KnowledgeGraph kg = load_run_graph(cfg);
  const ModelState state = load_model_for(cfg, kg);
  if (cfg.vertex.empty()) throw ConfigError("config key 'vertex' is required for reconstruct");
  const EntityId v = lookup(kg.entities(), cfg.vertex, "vertex");
  std::optional<RelationId> rel;
  if (!cfg.relation.empty()) rel = lookup(kg.relations(), cfg.relation, "relation");

  SimilarityMetric metric = cfg.metric == "neg-l1"         ? SimilarityMetric::kNegL1
                            : cfg.metric == "sign-hamming" ? SimilarityMetric::kSignHamming
                                                           : SimilarityMetric::kCosine;
  std::string used = cfg.metric;
  if (metric == SimilarityMetric::kCosine) {
    const auto row = state.M_v.row(static_cast<std::size_t>(v));
    if (std::all_of(row.begin(), row.end(), [](double x) { return x == 0.0; })) {
      metric = SimilarityMetric::kNegL1;
      used = "neg-l1";
    }
  }
  const auto ranked = reconstruct_neighbors(state, v, rel, metric);
  json top = json::array();
  for (std::size_t i = 0; i < std::min(cfg.top_k, ranked.size()); ++i)
    top.push_back({{"vertex", kg.entities().name(ranked[i].vertex)},
                   {"id", ranked[i].vertex},
                   {"score", ranked[i].score}});
  json truth = json::array();
  for (const auto& n : kg.neighbors(v))
    if (!rel || n.rel == *rel) truth.push_back(kg.entities().name(n.vertex));
  json j = stamp(cfg, "reconstruct");
  j["vertex"] = kg.entities().name(v);
  j["relation"] = rel ? json(kg.relations().name(*rel)) : json(nullptr);
  j["metric"] = used;
  j["top"] = std::move(top);
  j["neighbors"] = std::move(truth);
  write_json(cfg.out_path() / "reconstruct.json", j);
}

sim::CostConfig cost_for(const RunConfig& cfg) {
  sim::CostConfig c = sim::cost_preset(cfg.cost_preset);
  c.n_c = cfg.n_c;
  c.chunk = cfg.chunk;
  c.batch = cfg.batch;
  c.d = cfg.d;
  c.D = cfg.D;
  if (cfg.cache_capacity) c.cache_slots = cfg.cache_capacity;
  return c;
}

void cmd_simulate(const RunConfig& cfg) {
  const KnowledgeGraph kg = load_run_graph(cfg);
  const sim::CostConfig cost = cost_for(cfg);
  const sim::CachePolicy policy = sim::parse_policy(cfg.policy);
  const fs::path out = cfg.out_path();

  std::vector<sim::ScheduleBatch> first;
  if (!cfg.trace.empty()) {
    first = sim::read_schedule_trace(cfg.trace);
    const auto r = sim::simulate(first, kg, sim::CacheConfig{cost.cache_slots, policy, cfg.seed}, cost);
    write_text(out / "sim_report.json", sim::report_json(r, cfg.hash(), cfg.seed));
  } else {
    sim::EncodedRegistry registry(cost.slot_bytes());
    first = sim::schedule_epoch(kg, cost.n_c, registry);
    const auto second = sim::schedule_epoch(kg, cost.n_c, registry);
    write_schedule_trace(out / "schedule.jsonl", first);
    sim::Cache cache(cost.cache_slots, policy, cfg.seed);
    const auto cold = sim::simulate(first, kg, cache, cost);
    const auto warm = sim::simulate(second, kg, cache, cost);
    write_text(out / "sim_report_epoch1.json", sim::report_json(cold, cfg.hash(), cfg.seed));
    write_text(out / "sim_report.json", sim::report_json(warm, cfg.hash(), cfg.seed));
  }
  const auto rows = sim::capacity_sweep(
      first, kg, cost, cfg.sweep,
      {sim::CachePolicy::kLru, sim::CachePolicy::kLfu, sim::CachePolicy::kRandom}, cfg.seed);
  write_text(out / "sweep.csv", sim::sweep_csv(rows));
}

void cmd_quantize_eval(const RunConfig& cfg) {
  const KnowledgeGraph kg = load_run_graph(cfg);
  const ModelState state = load_model_for(cfg, kg);
  const FilterIndex filter(kg);
  const FixedPointSpec spec{cfg.fix_bits, cfg.frac_bits};
  const Metrics full = evaluate(cfg, kg, score_view(state), filter);
  const QuantizedModel qm = quantize_model(state, kg, spec);
  const Metrics q = evaluate(cfg, kg, qm.view(), filter);
  json j = stamp(cfg, "quantize-eval");
  j["split"] = cfg.split;
  j["fix_bits"] = cfg.fix_bits;
  j["frac_bits"] = cfg.frac_bits;
  j["full"] = metrics_json(full);
  j["quantized"] = metrics_json(q);
  j["relative_mrr_drop"] = full.mrr > 0 ? (full.mrr - q.mrr) / full.mrr : 0.0;
  write_json(cfg.out_path() / "quantize_eval.json", j);
  const std::string variant =
      "fixed" + std::to_string(cfg.fix_bits) + "." + std::to_string(cfg.frac_bits);
  append_metrics_csv(cfg, {"quantize-eval", cfg.split, variant, q, std::nullopt});
}

void cmd_drop_dims_eval(const RunConfig& cfg) {
  const KnowledgeGraph kg = load_run_graph(cfg);
  const ModelState state = load_model_for(cfg, kg);
  const FilterIndex filter(kg);
  const DropStrategy strategy =
      cfg.drop_strategy == "random" ? DropStrategy::kRandom : DropStrategy::kLowEntropy;
  const DimensionMask mask =
      make_drop_mask(state.M_v, cfg.drop_frac, strategy, cfg.seed, cfg.entropy_bins);
  const ReducedModel reduced = drop_dims(state, mask);
  const Metrics full = evaluate(cfg, kg, score_view(state), filter);
  const Metrics m = evaluate(cfg, kg, reduced.view(), filter);
  json j = stamp(cfg, "drop-dims-eval");
  j["split"] = cfg.split;
  j["drop_frac"] = cfg.drop_frac;
  j["drop_strategy"] = cfg.drop_strategy;
  j["kept"] = mask.kept();
  j["kept_indices"] = mask.kept_indices();
  j["full"] = metrics_json(full);
  j["reduced"] = metrics_json(m);
  write_json(cfg.out_path() / "drop_dims_eval.json", j);
  append_metrics_csv(cfg, {"drop-dims-eval", cfg.split,
                           cfg.drop_strategy + "@" + fmt_double(cfg.drop_frac), m, std::nullopt});
}

}  // namespace

void run_command(std::string_view command, const RunConfig& cfg) {
  cfg.validate();
  static const std::map<std::string_view, void (*)(const RunConfig&)> table{
      {"ingest", cmd_ingest},
      {"train", cmd_train},
      {"eval", cmd_eval},
      {"reconstruct", cmd_reconstruct},
      {"simulate", cmd_simulate},
      {"quantize-eval", cmd_quantize_eval},
      {"drop-dims-eval", cmd_drop_dims_eval}};
  auto it = table.find(command);
  if (it == table.end()) throw ConfigError("unknown command: '" + std::string(command) + "'");
  std::error_code ec;
  fs::create_directories(cfg.out_path(), ec);
  if (ec) throw ConfigError("cannot create output directory " + cfg.out_path().string());
  it->second(cfg);
}

}  // namespace hdkg::run
