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
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace hdkg {

/// Identifies the generator and sampling algorithms. Recorded in checkpoints;
/// any change to how numbers are drawn must bump this string.
inline constexpr std::string_view kPrngId =
    "mt19937_64+splitmix64-streams+box-muller/v1";

std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of the named subsystem stream derived from a top-level seed.
inline std::uint64_t stream_seed(std::uint64_t root_seed, std::string_view name) {
  return splitmix64(root_seed ^ fnv1a64(name));
}

/// Seeded generator with platform-independent sampling. std::mt19937_64 is
/// fully specified by the standard; the distributions in <random> are not, so
/// uniform/normal/index draws are implemented here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for a named subsystem ("base-matrix", "init", ...).
  static Rng stream(std::uint64_t root_seed, std::string_view name) {
    return Rng(stream_seed(root_seed, name));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via the Box-Muller transform (pairs are cached).
  double normal();

  /// Unbiased integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hdkg
