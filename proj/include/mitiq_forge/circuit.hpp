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

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mf {

enum class GateKind : std::uint8_t { kCnot, kRy, kRz, kSx, kX, kY, kZ, kH };

// One gate of the IR. `qubit` is the control for CNOT and the acted-on qubit
// otherwise; `target` is only meaningful for CNOT. Angles are radians.
struct Gate {
  GateKind kind = GateKind::kX;
  int qubit = 0;
  int target = -1;
  double angle = 0.0;

  static Gate cnot(int control, int target) { return {GateKind::kCnot, control, target, 0.0}; }
  static Gate ry(int q, double theta) { return {GateKind::kRy, q, -1, theta}; }
  static Gate rz(int q, double phi) { return {GateKind::kRz, q, -1, phi}; }
  static Gate sx(int q) { return {GateKind::kSx, q, -1, 0.0}; }
  static Gate h(int q) { return {GateKind::kH, q, -1, 0.0}; }
  // pauli: 'X', 'Y' or 'Z'.
  static Gate pauli(int q, char pauli);

  bool is_cnot() const { return kind == GateKind::kCnot; }
  bool is_pauli() const {
    return kind == GateKind::kX || kind == GateKind::kY || kind == GateKind::kZ;
  }
  bool touches(int q) const { return qubit == q || (is_cnot() && target == q); }

  friend bool operator==(const Gate&, const Gate&) = default;
};

// Ordered gate list on n qubits plus the ordered list of measured qubits.
// Immutable after construction; every transform returns a new circuit.
class Circuit {
 public:
  Circuit() = default;
  // Throws DomainError on out-of-range qubits, CNOT control == target, or
  // duplicate measured qubits.
  Circuit(int n_qubits, std::vector<Gate> gates, std::vector<int> measured = {});

  int n_qubits() const { return n_qubits_; }
  const std::vector<Gate>& gates() const { return gates_; }
  const std::vector<int>& measured() const { return measured_; }

  std::size_t count(GateKind kind) const;
  Circuit with_measured(std::vector<int> measured) const;

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  int n_qubits_ = 0;
  std::vector<Gate> gates_;
  std::vector<int> measured_;
};

// Every CNOT couples neighbours on the n-qubit loop.
bool is_loop_local(const Circuit& c);

// Angles of the alternating layered ansatz. Full layout is layer-major,
// values[k * n + q] for RY layer k in [0, layers]; symmetric layout keeps two
// angles per layer, values[2k] for even qubits and values[2k + 1] for odd.
struct AnsatzParams {
  int layers = 0;
  Eigen::VectorXd values;
  bool symmetric = false;

  static std::size_t expected_size(int n, int layers, bool symmetric) {
    return static_cast<std::size_t>(symmetric ? 2 * (layers + 1) : n * (layers + 1));
  }
  double angle(int n, int layer, int q) const {
    return symmetric ? values[2 * layer + (q % 2)] : values[layer * n + q];
  }
  static AnsatzParams zeros(int n, int layers, bool symmetric);
};

// Logical loop position -> physical loop position: rotation r and optional
// reflection, mapping[i] = reflected ? (r - i) mod n : (i + r) mod n.
struct QubitAssignment {
  std::vector<int> mapping;
  int rotation = 0;
  bool reflected = false;

  static QubitAssignment make(int n, int rotation, bool reflected);
  static QubitAssignment identity(int n) { return make(n, 0, false); }
  friend bool operator==(const QubitAssignment&, const QubitAssignment&) = default;
};

// A circuit restricted to a sub-register together with the original label of
// each of its qubits, labels[compact] = original.
struct FilteredCircuit {
  Circuit circuit;
  std::vector<int> labels;
};

// Alternating layered ansatz on a loop of n qubits: an RY layer, then for each
// layer k = 1..l a CNOT layer on pairs (0,1),(2,3),... when k is odd or
// (1,2),...,(n-1,0) when k is even, followed by an RY layer. All qubits are
// measured. Throws TopologyError for odd or too-small n, ShapeError on
// parameter-length mismatch.
Circuit build_alt_ansatz(int n, const AnsatzParams& params);

// Replicates symmetric angles to the full layout. Throws PreconditionError
// if params are already full.
AnsatzParams expand_symmetric(const AnsatzParams& params, int n);

// Rewrites to CNOT / RZ / SX using
//   RY(t)   = RZ(pi) SX RZ(pi + t) SX
//   H RY(t) = RZ(pi) SX RZ(3pi/2 - t) SX RZ(-pi)
// (operator order; the circuit lists the rightmost factor first). An H must
// directly follow an RY on the same qubit; otherwise DecompositionError.
// CNOT, RZ, SX and Pauli gates pass through unchanged.
Circuit decompose_to_basis(const Circuit& c);

// Keeps exactly the gates in the backward light cone of `observable`, relabels
// the cone qubits compactly in loop order and measures the observable qubits.
FilteredCircuit light_cone_slice(const Circuit& c, std::span<const int> observable);
Circuit light_cone_filter(const Circuit& c, std::span<const int> observable);

// Unitary folding of CNOTs. With k the largest odd integer <= scale, every CNOT
// is repeated k times, and k + 2 times with probability (scale - k) / 2
// (seeded Bernoulli per CNOT), so the expected count is scale * original.
// Throws DomainError if scale < 1.
Circuit fold_cnots(const Circuit& c, double scale, std::uint64_t seed);

// Pauli frame for one CNOT: `before` on (control, target) is undone by `after`.
// Letters are 'I', 'X', 'Y', 'Z'.
struct CnotDressing {
  char before_control = 'I', before_target = 'I';
  char after_control = 'I', after_target = 'I';
};
CnotDressing dress_cnot(char control_pauli, char target_pauli);

// Wraps every CNOT in a uniformly drawn Pauli pair and its CNOT-conjugate.
// Noiseless action is unchanged up to global phase.
Circuit randomized_compile(const Circuit& c, std::uint64_t seed);

// All 2n adjacency-preserving assignments, ordered by (rotation, reflected).
// Throws TopologyError if n < 3.
std::vector<QubitAssignment> enumerate_assignments(int n);

// Physical loop position of each qubit of a (possibly filtered) circuit.
// Empty labels mean the circuit qubits are the logical positions themselves.
std::vector<int> physical_layout(std::span<const int> labels, const QubitAssignment& a,
                                 int n_circuit_qubits);

// Line format: header `qubits n; measured q0,q1,...`, then one gate per line
// (`CNOT c t`, `RY q theta`, `RZ q theta`, `SX q`, `X q`, `Y q`, `Z q`, `H q`).
// Angles are written with round-trip precision.
std::string to_text(const Circuit& c);
Circuit parse_circuit(const std::string& text);

}  // namespace mf
