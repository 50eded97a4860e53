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

#include "mitiq_forge/hamiltonian.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "mitiq_forge/errors.hpp"

namespace mf {
namespace {

void check_model(const IsingParams& p) {
  if (p.n < 2) throw DomainError("Ising chain needs n >= 2");
  if (!p.cyclic) throw DomainError("only cyclic boundary conditions are supported");
}

// Conjugate gradients for (A - shift) x = b on the complement of the columns
// of Q; A - shift is positive definite there.
Eigen::VectorXd solve_shifted(const IsingOperator<double>& op, double shift,
                              const Eigen::MatrixXd& q, const Eigen::VectorXd& b) {
  auto project = [&](Eigen::VectorXd& v) {
    for (int pass = 0; pass < 2; ++pass) v.noalias() -= q * (q.transpose() * v);
  };
  auto apply = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    op.apply(v, out);
    out -= shift * v;
    project(out);
  };
  Eigen::VectorXd rhs = b;
  project(rhs);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
  Eigen::VectorXd r = rhs, d = rhs, ad(rhs.size());
  double rr = r.squaredNorm();
  const double stop = 1e-26 * std::max(1.0, rhs.squaredNorm());
  for (int it = 0; it < 20000 && rr > stop; ++it) {
    apply(d, ad);
    const double step = rr / d.dot(ad);
    x += step * d;
    r -= step * ad;
    const double rr_next = r.squaredNorm();
    d = r + (rr_next / rr) * d;
    rr = rr_next;
  }
  if (rr > stop) throw ConvergenceError("resolvent solve did not converge", std::sqrt(rr));
  return x;
}

}  // namespace

std::string to_string(PauliKind kind) {
  switch (kind) {
    case PauliKind::kZZ: return "ZZ";
    case PauliKind::kX: return "X";
    case PauliKind::kZ: return "Z";
  }
  return "?";
}

std::string describe(const PauliTerm& t) {
  std::string s = to_string(t.kind) + "(";
  for (std::size_t i = 0; i < t.support.size(); ++i) {
    s += (i ? "," : "") + std::to_string(t.support[i]);
  }
  return s + ")";
}

std::vector<PauliTerm> expand_terms(const IsingParams& p) {
  check_model(p);
  std::vector<PauliTerm> terms;
  terms.reserve(static_cast<std::size_t>(3 * p.n));
  for (int i = 0; i < p.n; ++i) terms.push_back({-p.J, PauliKind::kZZ, {i, (i + 1) % p.n}});
  for (int i = 0; i < p.n; ++i) terms.push_back({-p.h_x, PauliKind::kX, {i}});
  for (int i = 0; i < p.n; ++i) terms.push_back({-p.h_z, PauliKind::kZ, {i}});
  return terms;
}

template <typename Scalar>
IsingOperator<Scalar>::IsingOperator(const IsingParams& p)
    : n_(p.n), h_x_(static_cast<Scalar>(p.h_x)) {
  check_model(p);
  const Eigen::Index dim = Eigen::Index(1) << p.n;
  diag_.resize(dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    double e = 0.0;
    for (int i = 0; i < p.n; ++i) {
      const int zi = ((x >> i) & 1) ? -1 : 1;
      const int zj = ((x >> ((i + 1) % p.n)) & 1) ? -1 : 1;
      e -= p.J * zi * zj + p.h_z * zi;
    }
    diag_[x] = static_cast<Scalar>(e);
  }
}

template class IsingOperator<double>;
template class IsingOperator<float>;

SpectrumResult exact_spectrum(const IsingParams& p, bool want_vector, const SpectrumOptions& opts) {
  check_model(p);
  if (p.n > 24) throw CapacityError("exact spectrum is limited to n <= 24");
  const IsingOperator<double> op(p);
  auto apply = [&](const auto& x, auto& y) { op.apply(x, y); };
  const Eigen::Index dim = op.dim();

  SpectrumResult out;
  const auto ground = lanczos_lowest<double>(apply, dim, Eigen::MatrixXd(dim, 0), opts.lanczos);
  Eigen::MatrixXd deflate = ground.vector;
  LanczosOptions second = opts.lanczos;
  second.seed = opts.lanczos.seed + 1;
  const auto excited = lanczos_lowest<double>(apply, dim, deflate, second);

  out.ground_energy = ground.value;
  out.first_excited_energy = excited.value;
  if (out.first_excited_energy < out.ground_energy) std::swap(out.ground_energy, out.first_excited_energy);
  out.residual = std::max(ground.residual, excited.residual);
  out.degenerate = out.first_excited_energy - out.ground_energy < opts.degeneracy_gap;
  out.matvecs = ground.matvecs + excited.matvecs;
  if (want_vector) out.ground_vector = excited.value < ground.value ? excited.vector : ground.vector;
  return out;
}

Eigen::MatrixXd dense_hamiltonian(const IsingParams& p) {
  check_model(p);
  if (p.n > 12) throw CapacityError("dense Hamiltonian is limited to n <= 12");
  const IsingOperator<double> op(p);
  const Eigen::Index dim = op.dim();
  Eigen::MatrixXd h = op.diagonal().asDiagonal();
  for (Eigen::Index x = 0; x < dim; ++x) {
    for (int i = 0; i < p.n; ++i) h(x ^ (Eigen::Index(1) << i), x) -= p.h_x;
  }
  return h;
}

double perturbative_energy_small_hx(const IsingParams& p) {
  const double denom = 2.0 * p.h_z + 4.0 * p.J;
  if (denom == 0.0) throw SingularError("small-h_x expansion: 2 h_z + 4 J = 0");
  return -p.n * (p.h_z + p.J + p.h_x * p.h_x / denom);
}

double perturbative_energy_large_hx(const IsingParams& p) {
  if (p.h_x == 0.0) throw SingularError("large-h_x expansion needs h_x != 0");
  return -p.n * (p.h_x + (2.0 * p.h_z * p.h_z + p.J * p.J) / (4.0 * p.h_x));
}

double perturbative_energy_small_hz(const IsingParams& p, const SmallHzOptions& opts) {
  check_model(p);
  if (p.n > 14) throw CapacityError("small-h_z perturbation theory is limited to n <= 14");
  IsingParams free_model = p;
  free_model.h_z = 0.0;
  const IsingOperator<double> op(free_model);
  auto apply = [&](const auto& x, auto& y) { op.apply(x, y); };
  const Eigen::Index dim = op.dim();

  // Grow the ground multiplet while the next level sits within the join gap.
  const double join_gap = std::max(opts.multiplet_gap, opts.coupling_factor * std::abs(p.h_z) * p.n);
  std::vector<double> energies;
  Eigen::MatrixXd states(dim, 0);
  double outside_gap = 0.0;
  constexpr int kMaxMultiplet = 4;
  for (int k = 0; k <= kMaxMultiplet; ++k) {
    LanczosOptions lo = opts.spectrum.lanczos;
    lo.seed += static_cast<std::uint64_t>(k);
    const auto pair = lanczos_lowest<double>(apply, dim, states, lo);
    if (!energies.empty() && pair.value - energies.front() >= join_gap) {
      outside_gap = pair.value - energies.back();
      break;
    }
    if (k == kMaxMultiplet) throw DegeneracyError("ground multiplet larger than supported");
    energies.push_back(pair.value);
    states.conservativeResize(Eigen::NoChange, states.cols() + 1);
    states.col(states.cols() - 1) = pair.vector;
    if (states.cols() == dim) break;
  }
  if (states.cols() < dim && outside_gap < opts.min_outside_gap) {
    throw DegeneracyError("ground multiplet is not separated from the excited spectrum");
  }

  // V = -sum_i Z_i is diagonal.
  Eigen::VectorXd v_diag(dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    int m = 0;
    for (int i = 0; i < p.n; ++i) m += ((x >> i) & 1) ? -1 : 1;
    v_diag[x] = -static_cast<double>(m);
  }
  const Eigen::Index k = states.cols();
  double e_ref = 0.0;
  for (double e : energies) e_ref += e;
  e_ref /= static_cast<double>(k);

  Eigen::MatrixXd v_states = v_diag.asDiagonal() * states;
  Eigen::MatrixXd h_eff = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) h_eff(i, i) = energies[static_cast<std::size_t>(i)];
  h_eff += p.h_z * (states.transpose() * v_states);
  if (k < dim && p.h_z != 0.0) {
    Eigen::MatrixXd resolved(dim, k);
    for (Eigen::Index j = 0; j < k; ++j) {
      resolved.col(j) = solve_shifted(op, e_ref, states, v_states.col(j));
    }
    // Q V|j> projected; sum_k |<k|V|i>|^2 / (E0 - E_k) = -<Vi| (H0 - E0)^-1 |Vj>.
    Eigen::MatrixXd qv = v_states - states * (states.transpose() * v_states);
    h_eff -= p.h_z * p.h_z * (qv.transpose() * resolved);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eff(0.5 * (h_eff + h_eff.transpose()));
  return eff.eigenvalues()[0];
}

}  // namespace mf
