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
#include <span>
#include <string>
#include <vector>

#include "mitiq_forge/circuit.hpp"

namespace mf {

// Simulated backend on a loop of n physical qubits. Edge i couples physical
// qubits (i, i+1 mod n). readout_e0[q] is P(read 1 | 0), readout_e1[q] is
// P(read 0 | 1). All rates lie in [0, 0.5).
struct DeviceModel {
  int n_physical = 0;
  std::vector<double> cnot_error;
  std::vector<double> readout_e0;
  std::vector<double> readout_e1;
  std::vector<double> sq_error;
  std::string description;

  // Throws TopologyError if a and b are not loop neighbours.
  double cnot(int a, int b) const;
  // Throws ConfigError on size mismatches or rates outside [0, 0.5).
  void validate() const;

  static DeviceModel uniform(int n, double cnot_error, double sq_error, double e0, double e1);
  static DeviceModel noiseless(int n) { return uniform(n, 0.0, 0.0, 0.0, 0.0); }

  // Multiplies gate error rates by gate_factor and readout rates by
  // readout_factor. Throws ConfigError if a rate leaves [0, 0.5).
  DeviceModel scaled(double gate_factor, double readout_factor = 1.0) const;
  DeviceModel without_readout() const { return scaled(1.0, 0.0); }
  DeviceModel without_gates() const { return scaled(0.0, 1.0); }

  friend bool operator==(const DeviceModel&, const DeviceModel&) = default;
};

// Log-normal heterogeneity around the given means, drawn from a portable
// generator so a seed reproduces the same profile everywhere.
struct SyntheticOptions {
  double cnot_mean = 0.012;
  double sq_ratio = 0.1;  // single-qubit error relative to the adjacent CNOT mean
  double readout_e0_mean = 0.02;
  double readout_e1_mean = 0.04;
  double log_spread = 0.35;
};
DeviceModel synthetic_device(int n, std::uint64_t seed, const SyntheticOptions& opts = {});

// JSON profile: {"n", "readout_e0": [...], "readout_e1": [...],
// "cnot_error": {"i-j": p}, "sq_error": [...]} plus an optional
// "description". Unknown keys are rejected with ConfigError.
std::string device_to_json(const DeviceModel& d);
DeviceModel device_from_json(const std::string& text);
DeviceModel load_device(const std::string& path);
void save_device(const DeviceModel& d, const std::string& path);
std::string device_digest(const DeviceModel& d);

struct ScoreOptions {
  bool include_single_qubit = true;
  bool include_readout = false;
};

// Product of (1 - e) over the pulses of c placed by assignment a. `labels`
// maps circuit qubits to logical loop positions (empty: identity). CNOT and SX
// are pulses; an undecomposed RY counts as two SX; RZ, H and Paulis are free.
// With include_readout the measured qubits contribute 1 - (e0 + e1) / 2.
double score_assignment(const DeviceModel& d, const Circuit& c, const QubitAssignment& a,
                        std::span<const int> labels = {}, const ScoreOptions& opts = {});

// The `count` best assignments by score, ties kept in (rotation, reflected)
// order. Throws DomainError if count is outside [1, 2n].
std::vector<QubitAssignment> select_assignments(const DeviceModel& d, const Circuit& c, int count,
                                                std::span<const int> labels = {},
                                                const ScoreOptions& opts = {});

}  // namespace mf
