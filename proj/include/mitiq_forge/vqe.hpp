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
#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mitiq_forge/circuit.hpp"
#include "mitiq_forge/errors.hpp"
#include "mitiq_forge/estimator.hpp"
#include "mitiq_forge/hamiltonian.hpp"

namespace mf {

struct SpsaConfig {
  double a = 0.0;  // gain scale; 0 means calibrate from the first calib_evals evaluations
  double c = 0.1;
  double alpha = 0.602;
  double gamma = 0.101;
  double A = -1.0;  // stability constant; negative means 0.1 * max_iter
  int max_iter = 300;
  int calib_evals = 50;
  double target_step = 0.1;  // first update magnitude (rad) aimed at by calibration

  // Throws ConfigError unless c > 0, a >= 0, max_iter >= 1 and calib_evals
  // is even (and positive when a is to be calibrated).
  void validate() const;
  double stability() const { return A < 0 ? 0.1 * max_iter : A; }
};

struct Evaluation {
  double value = 0.0;
  double sigma = 0.0;
};

// Energy at theta; `seed` selects the shot-noise stream of this evaluation.
using Objective = std::function<Evaluation(const Eigen::VectorXd& theta, std::uint64_t seed)>;
// Noiseless reference energy, used for observed damping in the trace.
using Reference = std::function<double(const Eigen::VectorXd& theta)>;

struct OptRecord {
  int iteration = 0;
  Eigen::VectorXd theta_plus;
  Eigen::VectorXd theta_minus;
  double e_plus = 0.0;
  double e_minus = 0.0;
  double sigma = 0.0;  // combined sigma of the pair
  double best_so_far = 0.0;
  std::optional<double> damping;
};

struct OptTrace {
  std::vector<OptRecord> records;
  double calibrated_a = 0.0;
  Eigen::VectorXd best_theta;
  double best_value = 0.0;

  // iteration,e_plus,e_minus,sigma,best_so_far,damping
  std::string to_csv() const;
};

struct SpsaResult {
  Eigen::VectorXd theta;
  OptTrace trace;
};

// The objective threw; carries the trace recorded so far.
class OptimizationError : public Error {
 public:
  OptimizationError(const std::string& what, OptTrace trace) : Error(what), trace_(std::move(trace)) {}
  const OptTrace& trace() const { return trace_; }

 private:
  OptTrace trace_;
};

// (E+ - E-) / (2 c_k) Delta^{-1} for a Rademacher Delta.
Eigen::VectorXd spsa_gradient(double e_plus, double e_minus, double ck, const Eigen::VectorXd& delta);

// theta_{k+1} = theta_k - a_k (E+ - E-) / (2 c_k) Delta_k^{-1}, Delta_k
// Rademacher, a_k = a / (k + 1 + A)^alpha, c_k = c / (k + 1)^gamma. With
// a = 0 the gain is set from calib_evals / 2 probe pairs at theta0 so the
// first step has magnitude target_step. Returns the evaluated point with the
// lowest energy.
SpsaResult spsa_optimize(const Objective& f, const Eigen::VectorXd& theta0, const SpsaConfig& cfg,
                         std::uint64_t seed, const Reference& reference = nullptr);
// Starts from uniform angles in [-pi, pi]. Throws DomainError if dim < 1.
SpsaResult spsa_optimize(const Objective& f, int dim, const SpsaConfig& cfg, std::uint64_t seed,
                         const Reference& reference = nullptr);

// Noiseless energy of the ansatz for h. Symmetric parameters use translation
// invariance by two sites, E = (n / 2) x (the six terms of one cell), each on
// its light cone.
double ansatz_energy(const IsingParams& h, const AnsatzParams& params);

struct ClassicalOptions {
  int restarts = 3;
  int max_sweeps = 40;
  double tolerance = 1e-9;  // stop when a sweep gains less than this
  // Warm start; shorter parameter sets are padded with zero leading layers
  // and symmetric ones expand to a full request.
  std::optional<AnsatzParams> initial;
};

struct ClassicalResult {
  AnsatzParams params;
  Circuit circuit;
  double energy = 0.0;
};

// Exact coordinate minimization: the energy is a trigonometric polynomial in
// each angle, of degree one (full) or n / 2 (symmetric), interpolated from
// 2D + 1 evaluations and minimized along the coordinate. Restarts draw
// uniform angles; the warm start, if any, is the first restart. Throws
// CapacityError for n > 24.
ClassicalResult classical_optimize(const IsingParams& h, int layers, bool symmetric, std::uint64_t seed,
                                   const ClassicalOptions& opts = {});

// Pads params with zero leading layers. Each added layer shifts the CNOT
// pattern by one site, so angles move one site along the loop with it; the
// state becomes its translate and energies of the cyclic model are unchanged.
AnsatzParams prepend_zero_layers(const AnsatzParams& params, int n, int layers);

// Objective for spsa_optimize on a symmetric or full ansatz measured through
// the estimator; evaluation seeds feed measure_energy.
Objective estimator_objective(const IsingParams& h, int layers, bool symmetric, const DeviceModel& d,
                              const EstimatorConfig& cfg);

}  // namespace mf
