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
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "mitiq_forge/errors.hpp"

namespace mf {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

struct LanczosOptions {
  int krylov_dim = 32;     // basis vectors kept per restart cycle
  int max_matvecs = 2000;  // iteration cap per eigenpair
  double tolerance = 1e-8; // on ||A x - theta x||
  std::uint64_t seed = 1;
};

template <typename Scalar>
struct EigenPair {
  Scalar value{};
  VectorX<Scalar> vector;
  Scalar residual{};
  int matvecs = 0;
};

// Lowest eigenpair of the real symmetric operator `apply` (y = A x) on the
// complement of the orthonormal columns of `deflate`. Explicitly restarted
// Lanczos with full reorthogonalization. Throws ConvergenceError when the
// matvec cap is hit before the residual drops below tolerance.
template <typename Scalar, typename Apply>
EigenPair<Scalar> lanczos_lowest(Apply&& apply, Eigen::Index dim,
                                 const MatrixX<Scalar>& deflate,
                                 const LanczosOptions& opts = {}) {
  using Vec = VectorX<Scalar>;
  const Eigen::Index m_max =
      std::min<Eigen::Index>(opts.krylov_dim, dim - deflate.cols());
  if (m_max < 1) throw DomainError("no space left after deflation");

  auto project = [&](Vec& v) {
    if (deflate.cols() == 0) return;
    for (int pass = 0; pass < 2; ++pass) v.noalias() -= deflate * (deflate.transpose() * v);
  };

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  Vec start(dim);
  for (Eigen::Index i = 0; i < dim; ++i) start[i] = static_cast<Scalar>(gauss(rng));
  project(start);
  start.normalize();

  MatrixX<Scalar> basis(dim, m_max + 1);
  Vec w(dim);
  int matvecs = 0;
  Scalar residual = std::numeric_limits<Scalar>::infinity();
  EigenPair<Scalar> best;

  while (true) {
    basis.col(0) = start;
    std::vector<Scalar> alpha, beta;
    Eigen::Index m = 0;
    bool invariant = false;
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> tri;
    for (Eigen::Index j = 0; j < m_max; ++j) {
      apply(basis.col(j), w);
      project(w);
      ++matvecs;
      alpha.push_back(basis.col(j).dot(w));
      // Classical Gram-Schmidt with a second pass only when cancellation is
      // severe (Daniel-Gragg-Kaufman-Stewart criterion).
      Scalar norm_before = w.norm();
      Scalar norm_after = norm_before;
      for (int pass = 0; pass < 2; ++pass) {
        w.noalias() -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
        norm_after = w.norm();
        if (norm_after > Scalar(0.7071) * norm_before) break;
        norm_before = norm_after;
      }
      beta.push_back(norm_after);
      m = j + 1;
      if (beta.back() <= Scalar(1e-13) * std::max<Scalar>(Scalar(1), std::abs(alpha.back()))) {
        invariant = true;
        break;
      }
      basis.col(j + 1) = w / beta.back();
      if (matvecs >= opts.max_matvecs) break;
    }
    Vec diag = Eigen::Map<Vec>(alpha.data(), m);
    Vec sub = m > 1 ? Vec(Eigen::Map<Vec>(beta.data(), m - 1)) : Vec(0);
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Vec y = tri.eigenvectors().col(0);
    const Scalar theta = tri.eigenvalues()[0];
    residual = invariant ? Scalar(0) : std::abs(beta[m - 1] * y[m - 1]);
    start = basis.leftCols(m) * y;
    start.normalize();
    best.value = theta;
    if (residual < opts.tolerance || invariant || matvecs >= opts.max_matvecs) break;
  }

  // True residual of the returned vector.
  apply(start, w);
  project(w);
  ++matvecs;
  best.value = start.dot(w);
  best.residual = (w - best.value * start).norm();
  best.vector = std::move(start);
  best.matvecs = matvecs;
  if (!(best.residual < opts.tolerance)) {
    throw ConvergenceError("Lanczos did not converge within " +
                               std::to_string(opts.max_matvecs) + " matvecs",
                           static_cast<double>(best.residual));
  }
  return best;
}

}  // namespace mf
