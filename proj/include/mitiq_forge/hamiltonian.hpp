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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mitiq_forge/lanczos.hpp"

namespace mf {

// H = -J sum Z_i Z_{i+1} - h_x sum X_i - h_z sum Z_i on a cyclic chain.
struct IsingParams {
  int n = 2;
  double J = 1.0;
  double h_x = 0.0;
  double h_z = 0.0;
  bool cyclic = true;
};

enum class PauliKind : std::uint8_t { kZZ, kX, kZ };

struct PauliTerm {
  double coefficient = 0.0;
  PauliKind kind = PauliKind::kZ;
  std::vector<int> support;

  friend bool operator==(const PauliTerm&, const PauliTerm&) = default;
};

std::string to_string(PauliKind kind);
std::string describe(const PauliTerm& t);  // e.g. "ZZ(3,4)"

// 3n terms: n ZZ on (i, i+1 mod n) with -J, then n X with -h_x, then n Z
// with -h_z. Zero coefficients are kept.
std::vector<PauliTerm> expand_terms(const IsingParams& p);

// Matrix-free H on the computational basis (qubit i <-> bit i). ZZ and Z are
// folded into a diagonal; X flips one bit.
template <typename Scalar>
class IsingOperator {
 public:
  explicit IsingOperator(const IsingParams& p);

  Eigen::Index dim() const { return diag_.size(); }
  const VectorX<Scalar>& diagonal() const { return diag_; }

  // x and y must have unit inner stride (vectors or matrix columns).
  template <typename In, typename Out>
  void apply(const In& x, Out& y) const {
    y = diag_.cwiseProduct(x);
    if (h_x_ == Scalar(0)) return;
    const Scalar* xp = x.data();
    Scalar* yp = y.data();
    const Eigen::Index dim = diag_.size();
    auto flip = [&](int i, Eigen::Index begin, Eigen::Index end) {
      const Eigen::Index stride = Eigen::Index(1) << i;
      for (Eigen::Index base = begin; base < end; base += 2 * stride) {
        Scalar* lo = yp + base;
        Scalar* hi = lo + stride;
        const Scalar* xlo = xp + base;
        const Scalar* xhi = xlo + stride;
        for (Eigen::Index j = 0; j < stride; ++j) {
          lo[j] -= h_x_ * xhi[j];
          hi[j] -= h_x_ * xlo[j];
        }
      }
    };
    // Low bits are handled block by block while the block is cache resident.
    const int low = std::min(n_, 12);
    const Eigen::Index block = Eigen::Index(1) << low;
    for (Eigen::Index b = 0; b < dim; b += block) {
      for (int i = 0; i < low; ++i) flip(i, b, b + block);
    }
    for (int i = low; i < n_; ++i) flip(i, 0, dim);
  }

 private:
  int n_;
  Scalar h_x_;
  VectorX<Scalar> diag_;
};

struct SpectrumOptions {
  LanczosOptions lanczos{};
  double degeneracy_gap = 1e-8;
};

struct SpectrumResult {
  double ground_energy = 0.0;
  double first_excited_energy = 0.0;
  std::optional<Eigen::VectorXd> ground_vector;
  double residual = 0.0;  // largest residual of the two eigenpairs
  bool degenerate = false;
  int matvecs = 0;
};

// Lowest two eigenvalues by Lanczos; the second is found on the complement
// of the converged ground vector. Throws CapacityError for n > 24 and
// ConvergenceError past the iteration cap.
SpectrumResult exact_spectrum(const IsingParams& p, bool want_vector,
                              const SpectrumOptions& opts = {});

// Dense H for small chains (n <= 12).
Eigen::MatrixXd dense_hamiltonian(const IsingParams& p);

// -n (h_z + J + h_x^2 / (2 h_z + 4 J)). Throws SingularError if 2h_z + 4J = 0.
double perturbative_energy_small_hx(const IsingParams& p);

// -n (h_x + (2 h_z^2 + J^2) / (4 h_x)). Throws SingularError if h_x = 0.
double perturbative_energy_large_hx(const IsingParams& p);

struct SmallHzOptions {
  // Eigenstates of the h_z = 0 model within this gap of the ground state are
  // treated as one degenerate multiplet.
  double multiplet_gap = 1e-6;
  // Levels closer to the ground state than coupling_factor * |h_z| * n (the
  // norm of the perturbation) also join: a second-order sum over a gap that
  // small is meaningless, while the effective Hamiltonian handles it.
  double coupling_factor = 1.0;
  // Smallest admissible gap between the multiplet and the rest of the
  // spectrum.
  double min_outside_gap = 1e-10;
  SpectrumOptions spectrum{};
};

// Second-order energy in h_z around the exact h_z = 0 eigenstates, with
// V = -sum Z_i. Quasi-degenerate ground multiplets are handled by
// diagonalizing the effective Hamiltonian inside the multiplet. The sum over
// excited states is evaluated as a resolvent solve on the complement, which
// equals the eigenvector sum. Requires n <= 14; throws DegeneracyError when
// the multiplet is not separated from the rest of the spectrum.
double perturbative_energy_small_hz(const IsingParams& p, const SmallHzOptions& opts = {});

}  // namespace mf
