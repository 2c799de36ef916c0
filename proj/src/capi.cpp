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

#include "hdkg/hdkg.h"

#include <new>
#include <string>

#include "hdkg/error.hpp"
#include "hdkg/kg_data.hpp"
#include "hdkg/run.hpp"
#include "hdkg/version.hpp"

struct hdkg_config {
  hdkg::run::RunConfig cfg;
};

struct hdkg_graph {
  hdkg::KnowledgeGraph kg;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
hdkg_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return HDKG_OK;
  } catch (const hdkg::Error& e) {
    g_last_error = e.what();
    return static_cast<hdkg_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return HDKG_ERR_INTERNAL;
}

hdkg_status null_arg(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return HDKG_ERR_CONFIG;
}

}  // namespace

extern "C" {

const char* hdkg_version(void) { return hdkg::kVersion.data(); }

const char* hdkg_last_error(void) { return g_last_error.c_str(); }

hdkg_status hdkg_config_new(hdkg_config** out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = new hdkg_config{}; });
}

void hdkg_config_free(hdkg_config* cfg) { delete cfg; }

hdkg_status hdkg_config_load(hdkg_config* cfg, const char* path) {
  if (!cfg || !path) return null_arg("cfg/path");
  return guarded([&] { cfg->cfg.load_file(path); });
}

hdkg_status hdkg_config_set(hdkg_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return null_arg("cfg/key/value");
  return guarded([&] { cfg->cfg.set(key, value); });
}

hdkg_status hdkg_config_set_pair(hdkg_config* cfg, const char* assignment) {
  if (!cfg || !assignment) return null_arg("cfg/assignment");
  return guarded([&] {
    const std::string s(assignment);
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw hdkg::ConfigError("expected key=value, got '" + s + "'");
    std::string key = s.substr(0, eq);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    while (!key.empty() && key.front() == ' ') key.erase(key.begin());
    cfg->cfg.set(key, s.substr(eq + 1));
  });
}

hdkg_status hdkg_config_validate(const hdkg_config* cfg) {
  if (!cfg) return null_arg("cfg");
  return guarded([&] { cfg->cfg.validate(); });
}

hdkg_status hdkg_config_hash(const hdkg_config* cfg, uint64_t* out) {
  if (!cfg || !out) return null_arg("cfg/out");
  return guarded([&] { *out = cfg->cfg.hash(); });
}

hdkg_status hdkg_config_canonical(const hdkg_config* cfg, char* buf, size_t len, size_t* needed) {
  if (!cfg) return null_arg("cfg");
  return guarded([&] {
    const std::string text = cfg->cfg.canonical();
    if (needed) *needed = text.size() + 1;
    if (buf && len) {
      const size_t n = std::min(len - 1, text.size());
      text.copy(buf, n);
      buf[n] = '\0';
    }
  });
}

hdkg_status hdkg_run(const hdkg_config* cfg, const char* command) {
  if (!cfg || !command) return null_arg("cfg/command");
  return guarded([&] { hdkg::run::run_command(command, cfg->cfg); });
}

hdkg_status hdkg_graph_load(const char* path, int reciprocal, hdkg_graph** out) {
  if (!path || !out) return null_arg("path/out");
  return guarded([&] {
    hdkg::KnowledgeGraph kg = hdkg::load_graph(path);
    if (reciprocal && !kg.reciprocal()) kg = hdkg::add_reciprocal(kg);
    *out = new hdkg_graph{std::move(kg)};
  });
}

void hdkg_graph_free(hdkg_graph* g) { delete g; }

hdkg_status hdkg_graph_counts(const hdkg_graph* g, size_t* entities, size_t* relations,
                              size_t* train_edges) {
  if (!g) return null_arg("graph");
  if (entities) *entities = g->kg.num_entities();
  if (relations) *relations = g->kg.num_relations();
  if (train_edges) *train_edges = g->kg.train().size();
  return HDKG_OK;
}

hdkg_status hdkg_graph_degree(const hdkg_graph* g, int32_t vertex, size_t* out) {
  if (!g || !out) return null_arg("graph/out");
  if (vertex < 0 || static_cast<size_t>(vertex) >= g->kg.num_entities()) {
    g_last_error = "vertex id out of range: " + std::to_string(vertex);
    return HDKG_ERR_CONFIG;
  }
  *out = g->kg.degree(vertex);
  return HDKG_OK;
}

}  // extern "C"
