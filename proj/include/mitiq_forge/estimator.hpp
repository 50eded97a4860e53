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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "mitiq_forge/circuit.hpp"
#include "mitiq_forge/device.hpp"
#include "mitiq_forge/hamiltonian.hpp"
#include "mitiq_forge/readout.hpp"
#include "mitiq_forge/simulator.hpp"

namespace mf {

enum class ReadoutMode : std::uint8_t {
  kTensored,  // shot-by-shot inversion of independent per-qubit flips
  kFormula,   // closed-form N1 / N2-midpoint / product inversion of the parity
};

struct EstimatorConfig {
  std::uint64_t shots_per_term = 8192;
  int assignments = 4;
  int rc_instances = 8;
  bool readout_mitigation = true;
  ReadoutMode readout_mode = ReadoutMode::kTensored;
  double fold_scale = 1.0;
  int shots_per_trajectory = 32;
  bool depolarizing_on = true;
  bool readout_on = true;
  ScoreOptions score{};

  // Throws ConfigError on counts below 1 or fold_scale < 1.
  void validate() const;
  // Stable text form used in digests and reports.
  std::string canonical() const;
};

struct TermEstimate {
  PauliTerm term;
  double value = 0.0;  // readout-mitigated when enabled, raw otherwise
  double sigma = 0.0;
  double raw = 0.0;
  double raw_sigma = 0.0;
  double mitigated = 0.0;
  double mitigated_sigma = 0.0;
  bool clamped = false;
};

// value = sum c_t v_t and sigma^2 = sum c_t^2 sigma_t^2, for the selected,
// raw and readout-mitigated term values alike.
struct EnergyEstimate {
  double value = 0.0;
  double sigma = 0.0;
  double raw = 0.0;
  double raw_sigma = 0.0;
  double mitigated = 0.0;
  double mitigated_sigma = 0.0;
  bool clamped = false;
  std::vector<TermEstimate> per_term;
  std::string config_hash;
};

// Lossless: doubles round-trip exactly through energy_from_json.
std::string energy_to_json(const EnergyEstimate& e);
EnergyEstimate energy_from_json(const std::string& text);

enum class DampingMethod : std::uint8_t {
  kObserved,
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
std::string to_string(DampingMethod m);

struct DampingEstimate {
  double c = 1.0;
  double sigma = 0.0;
  DampingMethod method = DampingMethod::kObserved;
  // Shot-level sigma where the main sigma comes from another source.
  std::optional<double> pooled_sigma;
};

// Ansatz plus measurement basis change (H merged into the final RY for X
// terms), restricted to the term's backward light cone, decomposed to
// CNOT/RZ/SX and measuring the support. Throws SupportError if the term is
// not on the ansatz qubits.
FilteredCircuit term_circuit(const Circuit& ansatz, const PauliTerm& t);

// Noiseless term value simulated on the light-cone circuit only; agrees with
// exact_expectation on the full ansatz and stays cheap for wide registers.
double light_cone_expectation(const Circuit& ansatz, const PauliTerm& t);

// Thread-safe store of energy estimates keyed by content digest. With a
// directory, entries also persist as <dir>/<key>.json and are read back on a
// miss, so reruns reuse earlier measurements.
class EnergyCache {
 public:
  EnergyCache() = default;
  explicit EnergyCache(std::filesystem::path dir);

  std::optional<EnergyEstimate> find(const std::string& key) const;
  void insert(const std::string& key, const EnergyEstimate& e);
  std::size_t size() const;

 private:
  std::filesystem::path dir_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::string, EnergyEstimate> entries_;
};

// Digest of every input that determines a measure_energy result.
std::string energy_key(const Circuit& ansatz, const std::vector<PauliTerm>& terms,
                       const DeviceModel& d, const EstimatorConfig& cfg, std::uint64_t seed);

// Per-term pipeline: term circuit, CNOT folding (one pattern per term), top
// assignments, randomized-compiling draws, shots split evenly over the
// (assignment x draw) cells with the remainder dealt round-robin. Raw values
// come from the pooled counts; readout mitigation is applied per assignment
// with that assignment's physical rates and combined by shot weight.
// Zero-coefficient terms are not sampled. Throws BudgetError if
// shots_per_term < assignments * rc_instances.
EnergyEstimate measure_energy(const Circuit& ansatz, const std::vector<PauliTerm>& terms,
                              const DeviceModel& d, const EstimatorConfig& cfg, std::uint64_t seed,
                              EnergyCache* cache = nullptr);

// C = measured / exact with sigma / |exact|. Uses the selected energy.
// Throws DomainError if |exact| < 1e-9.
DampingEstimate measure_damping(const Circuit& ansatz, const std::vector<PauliTerm>& terms,
                                const DeviceModel& d, const EstimatorConfig& cfg,
                                double exact_energy, std::uint64_t seed,
                                EnergyCache* cache = nullptr);
DampingEstimate damping_from(const EnergyEstimate& e, double exact_energy, bool use_raw);

struct ZeroThetaMeasurement {
  // Energy-weighted per-term all-zeros probability over the Z and ZZ terms.
  DampingEstimate fidelity;
  DampingEstimate fidelity_raw;
  // All-zeros probability of the whole register (no light cone).
  DampingEstimate register_fidelity;
  EnergyEstimate energy;
  double ideal_energy = 0.0;
};

// Measures the theta = 0 ansatz of shape (n, layers) through the same
// pipeline. One set of shots feeds both the fidelities and the energy.
ZeroThetaMeasurement measure_zero_theta(int n, int layers, const std::vector<PauliTerm>& terms,
                                        const DeviceModel& d, const EstimatorConfig& cfg,
                                        std::uint64_t seed);

}  // namespace mf
