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

// Method comparison over a layer sweep: optimized circuits, observed damping,
// every prediction method, mitigated energies and effectiveness classes.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mitiq_forge/estimator.hpp"
#include "mitiq_forge/mitigation.hpp"
#include "mitiq_forge/vqe.hpp"

namespace mf {

enum class BenchmarkMethod : std::uint8_t {
  kNone,  // unmitigated energy
  kZne,
  kFromPert,
  kDepthFit,
  kZeroThetaFidelity,
  kZeroThetaEnergy,
  kZneFirst,
  kZneLast,
  kMultiplyFidelities,
  kNoiseModelSim,
};

std::string to_string(BenchmarkMethod m);
// Throws ConfigError on an unknown name.
BenchmarkMethod benchmark_method_from_string(const std::string& name);
std::vector<BenchmarkMethod> all_benchmark_methods();

// kCalibrationRaw: methods that divide by a calibration-circuit damping use
// raw target and calibration energies, so readout error is part of the
// damping; the unmitigated row, zne and multiply_fidelities use readout-
// mitigated energies. kAllMitigated: every energy is readout-mitigated.
enum class ReadoutVariant : std::uint8_t { kCalibrationRaw, kAllMitigated };

std::string to_string(ReadoutVariant v);
ReadoutVariant readout_variant_from_string(const std::string& name);

struct OptimizerSettings {
  int restarts = 3;       // for the shallowest layer count
  int first_sweeps = 40;  // for the shallowest layer count
  int warm_sweeps = 6;    // per deeper layer count, warm-started from the previous one
  std::uint64_t seed = 2021;

  void validate() const;
  std::string canonical() const;
};

struct OptimizedCircuit {
  int layers = 0;
  AnsatzParams params;
  Circuit circuit;
  double energy = 0.0;  // noiseless energy of the circuit
};

// Classically optimized circuits for each layer count, in ascending order.
// Each deeper circuit starts from the previous optimum padded with zero
// layers. With a cache directory, results are stored per chain position under
// a digest of everything that determines them and read back on reruns.
std::vector<OptimizedCircuit> optimized_chain(const IsingParams& h, std::span<const int> layers,
                                              bool symmetric, const OptimizerSettings& opts,
                                              const std::filesystem::path& cache_dir = {});

struct BenchmarkConfig {
  IsingParams model{12, 1.0, 1.5, 0.1, true};
  bool symmetric = true;
  std::vector<int> layers;
  // Layer counts whose method rows are computed; empty means all of `layers`.
  // Observed damping is always measured at every layer count.
  std::vector<int> method_layers;
  std::vector<BenchmarkMethod> methods = all_benchmark_methods();
  std::vector<ReadoutVariant> variants{ReadoutVariant::kCalibrationRaw, ReadoutVariant::kAllMitigated};
  std::vector<double> pert_hx{0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<double> zne_scales{1.0, 3.0, 5.0};
  int depth_fit_max = 15;
  // noise_model_sim simulates the device with gate errors scaled by this;
  // 1 means the model is the true device.
  double noise_model_scale = 1.0;
  EstimatorConfig estimator;
  OptimizerSettings optimizer;
  std::vector<std::uint64_t> seeds{1};

  // Throws ConfigError.
  void validate() const;
  std::string canonical() const;
};

// Damping of the target circuit measured against its noiseless energy.
struct ObservedRow {
  std::uint64_t seed = 0;
  int layers = 0;
  double e_true = 0.0;
  double raw = 0.0, raw_sigma = 0.0;
  double mitigated = 0.0, mitigated_sigma = 0.0;
  DampingEstimate c_raw;
  DampingEstimate c_mitigated;
};

struct BenchmarkRow {
  std::uint64_t seed = 0;
  ReadoutVariant variant = ReadoutVariant::kCalibrationRaw;
  int layers = 0;
  BenchmarkMethod method = BenchmarkMethod::kNone;
  // "ok" or "fit_failure"; failed cells carry the reason and class -1.
  std::string status = "ok";
  std::string reason;
  double c = 0.0, c_sigma = 0.0;  // predicted (or implied) damping
  double e_mitigated = 0.0, e_sigma = 0.0;
  double e_true = 0.0;
  double rel_error = 0.0, rel_sigma = 0.0;
  int effectiveness = -1;
};

struct BenchmarkReport {
  std::string config_digest;
  std::string device_digest;
  std::vector<OptimizedCircuit> circuits;
  std::vector<ObservedRow> observed;
  std::vector<BenchmarkRow> rows;

  // Highest layer count whose cell reaches `min_class`, or 0 if none does.
  int max_layers_with_class(std::uint64_t seed, ReadoutVariant variant, BenchmarkMethod method,
                            int min_class) const;
  const BenchmarkRow* find(std::uint64_t seed, ReadoutVariant variant, int layers, BenchmarkMethod method) const;
};

// Runs the sweep on device `d`. Energy measurements go through `cache` (may
// be null); optimized circuits through `circuit_cache_dir` (may be empty).
// Only configuration errors throw; method failures become rows.
BenchmarkReport run_benchmark(const BenchmarkConfig& cfg, const DeviceModel& d, EnergyCache* cache = nullptr,
                              const std::filesystem::path& circuit_cache_dir = {});

// Structured report: digests, circuits, observed damping and method rows.
std::string benchmark_to_json(const BenchmarkReport& r);
// One row per (seed, variant, layers, method).
std::string benchmark_rows_csv(const BenchmarkReport& r);
// One row per (seed, layers).
std::string benchmark_observed_csv(const BenchmarkReport& r);

}  // namespace mf
