// Copyright 2026 The mitiq-forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <initializer_list>
#include <string>
#include <string_view>

namespace mf {

inline constexpr std::string_view kVersion = "0.3.0";

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and a path of
// integer coordinates (term index, cell index, trajectory index, ...).
constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t p : path) h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

// 64-bit FNV-1a; used for content digests of configs and circuits.
constexpr std::uint64_t fnv1a(std::string_view data,
                              std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Uniform double in [0, 1) from the top 53 bits of a raw 64-bit draw. Unlike
// the standard distributions this is identical on every platform.
constexpr double unit_uniform(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::string hex_digest(std::uint64_t h);
inline std::string digest(std::string_view data) { return hex_digest(fnv1a(data)); }

// Writes through a temporary sibling and renames, so readers never see a
// partial file. Throws ConfigError if the file cannot be written.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

// Whole file as a string. Throws ConfigError if it cannot be read.
std::string read_file(const std::filesystem::path& path);

// Worker count used by trajectory sampling and sweep dispatch. Results never
// depend on it.
void set_thread_count(int threads);
int thread_count();

// Runs body(i) for i in [0, count) on up to thread_count() workers. Each index
// runs exactly once; callers write results into per-index slots.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace mf
