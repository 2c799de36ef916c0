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

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hdkg/hdkg.h"

namespace {

struct Options {
  std::string command;
  std::vector<std::string> configs;
  std::vector<std::string> sets;
  std::optional<std::string> dataset, out, checkpoint, drop_strategy, preset, policy, trace;
  std::optional<std::string> seed, epochs, fix_bits, frac_bits, drop_frac, capacity;
};

int fail(hdkg_status st) {
  std::fprintf(stderr, "hdkg: %s\n", hdkg_last_error());
  return static_cast<int>(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperdimensional knowledge graph completion and accelerator simulation"};
  app.set_version_flag("--version", hdkg_version());
  Options o;
  app.add_option("command", o.command, "ingest | train | eval | reconstruct | simulate | "
                                       "quantize-eval | drop-dims-eval")
      ->required()
      ->check(CLI::IsMember({"ingest", "train", "eval", "reconstruct", "simulate",
                             "quantize-eval", "drop-dims-eval"}));
  app.add_option("-c,--config", o.configs, "key = value config file (repeatable, applied in order)");
  app.add_option("--set", o.sets, "override one key, KEY=VALUE (repeatable)");
  app.add_option("--dataset", o.dataset, "dataset directory or .hdkg cache");
  app.add_option("-o,--out", o.out, "output directory (default $HDKG_OUT_DIR or hdkg-out)");
  app.add_option("--checkpoint", o.checkpoint, "checkpoint path");
  app.add_option("--seed", o.seed, "top-level seed");
  app.add_option("--epochs", o.epochs, "training epochs");
  app.add_option("--fix-bits", o.fix_bits, "fixed-point total bits");
  app.add_option("--frac-bits", o.frac_bits, "fixed-point fractional bits");
  app.add_option("--drop-frac", o.drop_frac, "fraction of dimensions to drop");
  app.add_option("--drop-strategy", o.drop_strategy, "low-entropy | random");
  app.add_option("--preset", o.preset, "accelerator cost preset (u50 | u280)");
  app.add_option("--policy", o.policy, "cache policy (lru | lfu | random)");
  app.add_option("--capacity", o.capacity, "cache capacity in hypervector slots");
  app.add_option("--trace", o.trace, "replay a JSON-lines schedule trace");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : HDKG_ERR_CONFIG;
  }

  hdkg_config* cfg = nullptr;
  if (hdkg_status st = hdkg_config_new(&cfg); st != HDKG_OK) return fail(st);
  auto done = [&](hdkg_status st) {
    const int rc = st == HDKG_OK ? 0 : fail(st);
    hdkg_config_free(cfg);
    return rc;
  };

  for (const auto& path : o.configs)
    if (hdkg_status st = hdkg_config_load(cfg, path.c_str()); st != HDKG_OK) return done(st);
  for (const auto& kv : o.sets)
    if (hdkg_status st = hdkg_config_set_pair(cfg, kv.c_str()); st != HDKG_OK) return done(st);

  const std::pair<const char*, const std::optional<std::string>*> named[] = {
      {"dataset", &o.dataset},     {"out_dir", &o.out},
      {"checkpoint", &o.checkpoint}, {"seed", &o.seed},
      {"epochs", &o.epochs},       {"fix_bits", &o.fix_bits},
      {"frac_bits", &o.frac_bits}, {"drop_frac", &o.drop_frac},
      {"drop_strategy", &o.drop_strategy}, {"cost_preset", &o.preset},
      {"policy", &o.policy},       {"cache_capacity", &o.capacity},
      {"trace", &o.trace}};
  for (const auto& [key, value] : named)
    if (*value)
      if (hdkg_status st = hdkg_config_set(cfg, key, (*value)->c_str()); st != HDKG_OK)
        return done(st);

  const hdkg_status st = hdkg_run(cfg, o.command.c_str());
  if (st == HDKG_OK) {
    std::uint64_t h = 0;
    hdkg_config_hash(cfg, &h);
    std::printf("%s: ok (config %016llx)\n", o.command.c_str(), static_cast<unsigned long long>(h));
  }
  return done(st);
}
