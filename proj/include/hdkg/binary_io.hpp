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

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "hdkg/error.hpp"

namespace hdkg::io {

// Little-endian scalar encoding for the on-disk containers.

template <typename T>
T to_little(T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw DatasetFormatError("cannot open for writing: " + path.string());
  }

  void bytes(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  }
  void magic(std::string_view m) { bytes(m.data(), m.size()); }

  template <typename T>
  void scalar(T v) {
    v = to_little(v);
    bytes(&v, sizeof(T));
  }

  template <typename T>
  void array(std::span<const T> v) {
    if constexpr (std::endian::native == std::endian::little) {
      bytes(v.data(), v.size_bytes());
    } else {
      for (const T& x : v) scalar(x);
    }
  }

  void string(std::string_view s) {
    scalar<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }

  void close() {
    out_.flush();
    if (!out_) throw DatasetFormatError("write failed: " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path)
      : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw DatasetFormatError("cannot open: " + path.string());
  }

  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n)
      throw DatasetFormatError("truncated file: " + path_.string());
  }

  void expect_magic(std::string_view m) {
    std::string got(m.size(), '\0');
    bytes(got.data(), got.size());
    if (got != m)
      throw DatasetFormatError("bad magic in " + path_.string() + " (expected " +
                               std::string(m) + ")");
  }

  template <typename T>
  T scalar() {
    T v;
    bytes(&v, sizeof(T));
    return to_little(v);
  }

  template <typename T>
  std::vector<T> array(std::size_t n) {
    std::vector<T> v(n);
    bytes(v.data(), n * sizeof(T));
    if constexpr (std::endian::native != std::endian::little)
      for (T& x : v) x = to_little(x);
    return v;
  }

  std::string string() {
    auto n = scalar<std::uint32_t>();
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

}  // namespace hdkg::io
