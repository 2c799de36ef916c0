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
#include <string>
#include <string_view>
#include <vector>

#include "hdkg/kg_data.hpp"
#include "hdkg/model.hpp"

namespace hdkg::run {

/// Everything a command needs. Read from a flat "key = value" file, then
/// overridden key by key; validate() runs before any command does work.
struct RunConfig {
  std::string dataset;
  bool reciprocal = true;

  std::size_t d = 96;
  std::size_t D = 256;
  std::uint64_t seed = 0;
  std::size_t batch = 128;
  std::size_t chunk = 32;
  std::size_t n_c = 16;
  std::size_t epochs = 1;
  double lr = 0.05;
  std::string optimizer = "sgd";
  std::string mode = "reference";
  std::string score_sign = "distance";
  std::string activation = "tanh";
  double init_scale = 0.1;
  double label_smoothing = 0.1;

  std::string split = "test";
  bool filtered = true;

  std::string vertex;
  std::string relation;
  std::string metric = "cosine";
  std::size_t top_k = 10;

  std::size_t cache_capacity = 0;  // 0: the cost preset's slot count
  std::string policy = "lfu";
  std::string cost_preset = "u50";
  std::vector<std::size_t> sweep{32, 64, 128, 256};
  std::string trace;

  int fix_bits = 8;
  int frac_bits = 4;
  double drop_frac = 0.25;
  std::string drop_strategy = "low-entropy";  // or "entropy", "random"
  std::size_t entropy_bins = 32;

  // Locations; not part of the hash.
  std::string checkpoint;
  std::string out_dir;

  /// Throws ConfigError naming the key if it is unknown or the value does
  /// not parse.
  void set(std::string_view key, std::string_view value);
  void load_file(const std::filesystem::path& path);
  void validate() const;

  /// Sorted key=value lines of every hashed field.
  std::string canonical() const;
  std::uint64_t hash() const;

  std::filesystem::path out_path() const;
  std::filesystem::path checkpoint_path() const;
  ModelConfig model_config() const;
};

/// HDKG_OUT_DIR if set, else "hdkg-out".
std::filesystem::path default_out_dir();

struct CheckpointInfo {
  std::uint64_t config_hash = 0;
  std::uint64_t epochs = 0;
  std::string optimizer;
};

/// "HDCK" container: format version, PRNG id, config hash, shape, seed, mode
/// flags, optimizer, then e_v, e_r and the bias as f64.
void save_checkpoint(const std::filesystem::path& path, const ModelState& state,
                     const CheckpointInfo& info);
ModelState load_checkpoint(const std::filesystem::path& path, CheckpointInfo* info = nullptr);

KnowledgeGraph load_run_graph(const RunConfig& cfg);

extern const std::vector<std::string_view> kCommands;

/// Runs one command ("ingest", "train", "eval", "reconstruct", "simulate",
/// "quantize-eval", "drop-dims-eval") and writes its artifacts.
void run_command(std::string_view command, const RunConfig& cfg);

}  // namespace hdkg::run
