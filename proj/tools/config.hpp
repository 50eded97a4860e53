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

// Strict JSON configuration for the command-line driver. Every reader rejects
// keys it does not know, so typos fail before any computation starts.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mitiq_forge/benchmark.hpp"
#include "mitiq_forge/device.hpp"
#include "mitiq_forge/errors.hpp"
#include "mitiq_forge/estimator.hpp"
#include "mitiq_forge/hamiltonian.hpp"
#include "mitiq_forge/vqe.hpp"

namespace mf::cli {

using json = nlohmann::json;

// Typed access to one JSON object. Integers must be JSON integers and
// numbers JSON numbers; finish() rejects keys that were never read.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where);

  bool has(const std::string& key) const { return j_.contains(key); }
  const json& at(const std::string& key);
  std::string path(const std::string& key) const { return where_ + "." + key; }

  int get_int(const std::string& key);
  std::uint64_t get_u64(const std::string& key);
  double get_double(const std::string& key);
  bool get_bool(const std::string& key);
  std::string get_string(const std::string& key);
  std::vector<int> get_int_list(const std::string& key);
  std::vector<std::uint64_t> get_u64_list(const std::string& key);
  std::vector<double> get_double_list(const std::string& key);
  std::vector<std::string> get_string_list(const std::string& key);

  // Assign only when present; the target keeps its default otherwise.
  template <typename T, typename Getter>
  void maybe(const std::string& key, T& target, Getter g) {
    if (has(key)) target = (this->*g)(key);
  }

  void finish() const;

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

struct LoadedConfig {
  json root;
  std::filesystem::path base_dir;  // relative paths resolve against this
  std::string digest;              // of the canonical JSON text
};

// Throws ConfigError if the file is missing or not a JSON object.
LoadedConfig load_config(const std::filesystem::path& path);

IsingParams read_model(const json& j, const std::string& where, bool need_hx);
EstimatorConfig read_estimator(const json& j, const std::string& where);
SpsaConfig read_spsa(const json& j, const std::string& where);
OptimizerSettings read_optimizer(const json& j, const std::string& where);
// "device": path, optional "device_scale": {"gate": g, "readout": r}.
DeviceModel read_device(ObjectReader& r, const std::filesystem::path& base_dir);

struct GroundStateConfig {
  IsingParams model;
  std::vector<double> h_x;
  bool small_hz = true;  // second-order h_z energy when n <= 14
};

struct OptimizeConfig {
  IsingParams model;
  int layers = 3;
  bool symmetric = true;
  bool noisy = true;
  std::optional<DeviceModel> device;
  EstimatorConfig estimator;
  SpsaConfig spsa;
  bool reference = true;
};

struct BenchmarkCliConfig {
  BenchmarkConfig benchmark;
  DeviceModel device;
  std::filesystem::path cache_dir;  // empty: <out>/cache
};

struct ReadoutStudyConfig {
  std::vector<int> sizes{1, 2, 3, 4, 10, 11};
  int points = 41;
  double e0 = 0.05;
  double e1 = 0.1;
};

GroundStateConfig parse_ground_state(const LoadedConfig& c);
OptimizeConfig parse_optimize(const LoadedConfig& c);
BenchmarkCliConfig parse_benchmark(const LoadedConfig& c);
ReadoutStudyConfig parse_readout_study(const LoadedConfig& c);

// Optional top-level "seed"; 1 when absent.
std::uint64_t config_seed(const LoadedConfig& c);

}  // namespace mf::cli
