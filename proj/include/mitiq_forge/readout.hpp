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
#include <optional>
#include <span>
#include <vector>

#include "mitiq_forge/simulator.hpp"

namespace mf {

// Per-qubit readout flip rates: e0 = P(read 1 | 0), e1 = P(read 0 | 1).
struct ReadoutRates {
  std::vector<double> e0;
  std::vector<double> e1;

  static ReadoutRates uniform(int n, double e0, double e1);
  // Rates of the listed physical qubits of a device.
  static ReadoutRates from_device(const DeviceModel& d, std::span<const int> physical);
  std::size_t size() const { return e0.size(); }
  // Throws DomainError unless both lists have equal length and lie in [0, 0.5).
  void validate() const;
};

// Exact biased parity of an N-bit distribution f (f[x], bit k of x is qubit
// k): sum_x f(x) (-1)^{|x|} prod_k (1 - 2 e_{x_k}(k)). Throws DomainError if f
// is not a normalized probability vector or its size is not 2^N.
double biased_parity_exact(const Eigen::VectorXd& f, const ReadoutRates& r);

// One qubit: p (1 - e0 - e1) + e1 - e0.
double biased_parity_N1(double p, const ReadoutRates& r);

struct ParityBounds {
  double lo = 0.0;
  double hi = 0.0;
  double mid = 0.0;
};

// Two qubits at uniform rates. With e1 >= e0 (rates are swapped otherwise,
// which leaves a two-bit parity unchanged):
//   lo  = (1 - 2e1) [p (1 - e0 - e1) - (e1 - e0)]
//   hi  = (1 - 2e0) [p (1 - e0 - e1) + (e1 - e0)]
//   mid = p (1 - e0 - e1)^2 + (e1 - e0)^2
ParityBounds biased_parity_N2_bounds(double p, double e0, double e1);

struct ApproxParity {
  double value = 0.0;
  bool in_regime = false;  // N >= 3, where the offset is negligible
};

// p prod_k (1 - e0(k) - e1(k)) over N qubits. A single-entry rate list is
// treated as uniform.
ApproxParity biased_parity_approx(double p, const ReadoutRates& r, int N);

struct MitigatedParity {
  double value = 0.0;
  double sigma = 0.0;
  bool clamped = false;
};

// Inverts the N1, N2-midpoint or approximate forward maps (N = 1, 2, >= 3):
// subtracts prod (e1 - e0) for N <= 2 and divides by prod (1 - e0 - e1).
// The result is clamped to [-1 - 3 sigma, 1 + 3 sigma]. Throws
// NonInvertibleError if prod (1 - e0 - e1) < 1e-6.
MitigatedParity mitigate_parity(double p_noisy, double sigma, const ReadoutRates& r, int N);

// Exact inversion for uncorrelated readout errors, shot by shot: each shot
// contributes prod_k (s_k - d_k) / m_k with s_k = +-1, d_k = e1 - e0 and
// m_k = 1 - e0 - e1, an unbiased estimate of the noiseless parity. `r` lists
// the rates of the support qubits in support order. sigma is the standard
// error of the per-shot values.
MitigatedParity mitigate_parity_tensored(const ShotTable& s, std::span<const int> support,
                                         const ReadoutRates& r);

// Same estimator for the probability that every measured qubit is 0, using
// prod_k (1 + (s_k - d_k) / m_k) / 2. `r` is in measured order.
MitigatedParity mitigate_zero_probability(const ShotTable& s, const ReadoutRates& r);

// Random distribution over N-bit strings with bit parity p: flat-Dirichlet
// weights over the even strings and over the odd strings, mixed
// (1 + p) / 2 : (1 - p) / 2. Throws DomainError unless |p| <= 1 and N >= 1.
Eigen::VectorXd random_distribution_with_parity(int N, double p, std::uint64_t seed);

struct ReadoutStudyPoint {
  int N = 0;
  double p = 0.0;        // noiseless parity
  double p_tilde = 0.0;  // exact biased parity
  double model = 0.0;    // N1, N2 midpoint or the average rule
  double residual = 0.0; // p_tilde - model
  std::optional<ParityBounds> bounds;  // N = 2 only
  bool within_bounds = true;
};

struct ReadoutStudySummary {
  int N = 0;
  double rms_residual = 0.0;
  double max_abs_residual = 0.0;
  int bound_violations = 0;
};

struct ReadoutStudy {
  double e0 = 0.0, e1 = 0.0;
  std::vector<ReadoutStudyPoint> points;
  std::vector<ReadoutStudySummary> summary;  // one per N, in input order
};

// For each N, `count` random distributions with parities equally spaced on
// [-1, 1] at uniform rates (e0, e1).
ReadoutStudy readout_study(std::span<const int> sizes, int count, double e0, double e1, std::uint64_t seed);

}  // namespace mf
