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

#include <algorithm>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "mitiq_forge/circuit.hpp"
#include "mitiq_forge/device.hpp"
#include "mitiq_forge/hamiltonian.hpp"

namespace mf {

template <typename Scalar>
using StateVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Amp>
using Mat2 = Eigen::Matrix<Amp, 2, 2>;

// In-place statevector kernels; qubit q is bit q of the amplitude index.
// Amp is a real or complex scalar.
namespace kernels {

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};

template <typename Amp>
void apply_1q(Eigen::Matrix<Amp, Eigen::Dynamic, 1>& psi, int q, const Mat2<Amp>& u) {
  const Eigen::Index dim = psi.size();
  const Eigen::Index stride = Eigen::Index(1) << q;
  if constexpr (is_complex<Amp>::value) {
    // Split real arithmetic; std::complex multiplication carries NaN checks.
    using R = typename Amp::value_type;
    R* a = reinterpret_cast<R*>(psi.data());
    const R ar = u(0, 0).real(), ai = u(0, 0).imag(), br = u(0, 1).real(), bi = u(0, 1).imag();
    const R cr = u(1, 0).real(), ci = u(1, 0).imag(), dr = u(1, 1).real(), di = u(1, 1).imag();
    for (Eigen::Index base = 0; base < dim; base += 2 * stride) {
      R* lo = a + 2 * base;
      R* hi = lo + 2 * stride;
      for (Eigen::Index j = 0; j < 2 * stride; j += 2) {
        const R x0r = lo[j], x0i = lo[j + 1], x1r = hi[j], x1i = hi[j + 1];
        lo[j] = ar * x0r - ai * x0i + br * x1r - bi * x1i;
        lo[j + 1] = ar * x0i + ai * x0r + br * x1i + bi * x1r;
        hi[j] = cr * x0r - ci * x0i + dr * x1r - di * x1i;
        hi[j + 1] = cr * x0i + ci * x0r + dr * x1i + di * x1r;
      }
    }
  } else {
    Amp* a = psi.data();
    const Amp u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    for (Eigen::Index base = 0; base < dim; base += 2 * stride) {
      Amp* lo = a + base;
      Amp* hi = lo + stride;
      for (Eigen::Index j = 0; j < stride; ++j) {
        const Amp x0 = lo[j], x1 = hi[j];
        lo[j] = u00 * x0 + u01 * x1;
        hi[j] = u10 * x0 + u11 * x1;
      }
    }
  }
}

template <typename Amp>
void apply_cnot(Eigen::Matrix<Amp, Eigen::Dynamic, 1>& psi, int control, int target) {
  const Eigen::Index dim = psi.size();
  const Eigen::Index cbit = Eigen::Index(1) << control;
  const Eigen::Index tbit = Eigen::Index(1) << target;
  const Eigen::Index lo_bit = std::min(cbit, tbit), hi_bit = std::max(cbit, tbit);
  Amp* a = psi.data();
  // Enumerate indices with control set and target clear.
  for (Eigen::Index x = 0; x < dim; x += 2 * hi_bit) {
    for (Eigen::Index y = x; y < x + hi_bit; y += 2 * lo_bit) {
      for (Eigen::Index z = y; z < y + lo_bit; ++z) {
        const Eigen::Index i = z | cbit;
        std::swap(a[i], a[i | tbit]);
      }
    }
  }
}

}  // namespace kernels

// 2x2 matrix of a single-qubit gate; RY and RZ are exp(-i t P / 2) and
// SX = (1/2)[[1+i, 1-i], [1-i, 1+i]].
Mat2<std::complex<double>> gate_matrix(const Gate& g);
Mat2<std::complex<double>> pauli_matrix(char pauli);

// Normalized state from |0...0>. Throws CapacityError for n > 26.
StateVector<double> exact_state(const Circuit& c);

// <P> for the Pauli of term t (coefficient ignored) on the given state.
// Support indices refer to the state's qubits.
double state_expectation(const StateVector<double>& psi, const PauliTerm& t);

// <P> on the output of c. Circuits built from RY, H, X, Z and CNOT take a
// real-arithmetic path. Throws SupportError when the support is not inside
// the circuit.
double exact_expectation(const Circuit& c, const PauliTerm& t);

// sum_t coefficient_t <P_t> from a single simulation of c.
double circuit_energy(const Circuit& c, const std::vector<PauliTerm>& terms);

// Bit-string counts. Character k of a key is the outcome of measured[k].
struct ShotTable {
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t shots = 0;
  std::vector<int> measured;

  // Adds the counts of another table over the same measured qubits.
  void merge(const ShotTable& other);
  friend bool operator==(const ShotTable&, const ShotTable&) = default;
};

std::string shots_to_json(const ShotTable& s);
ShotTable shots_from_json(const std::string& text);

struct NoiseConfig {
  DeviceModel device;
  QubitAssignment assignment;
  // Logical loop position of each circuit qubit (empty: identity), as
  // returned by light_cone_slice.
  std::vector<int> labels;
  bool depolarizing_on = true;
  bool readout_on = true;
  int shots_per_trajectory = 32;
  std::uint64_t seed = 0;
};

// Trajectory sampling. After every CNOT or SX a uniformly random
// non-identity Pauli on the gate's qubits is inserted with the gate's error
// probability at its physical location; each trajectory yields up to
// shots_per_trajectory samples of the measured qubits, followed by
// independent readout flips. RZ and Pauli gates are noiseless. Deterministic
// for a given seed and independent of the thread count. Throws
// PreconditionError for RY/H gates or an empty measured list.
ShotTable sample_noisy(const Circuit& c, const NoiseConfig& nc, std::uint64_t shots);

// The same samples split into one table per trajectory, in trajectory order.
// Shots within a trajectory share its error pattern, so they are correlated.
std::vector<ShotTable> sample_noisy_trajectories(const Circuit& c, const NoiseConfig& nc,
                                                 std::uint64_t shots);

struct ParityEstimate {
  double value = 0.0;
  double sigma = 0.0;
};

// Mean of (-1)^(parity of the support bits) with sigma = sqrt((1 - v^2) / shots).
// Throws SupportError if a support qubit is not measured, DomainError on an
// empty table.
ParityEstimate parity_expectation(const ShotTable& s, std::span<const int> support);

}  // namespace mf
