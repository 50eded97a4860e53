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

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mitiq_forge/estimator.hpp"

namespace mf {

struct FitPoint {
  double x = 0.0;
  double y = 0.0;
  double sigma = 0.0;
};

// y = amplitude * exp(-rate * x). Covariance is over (amplitude, rate).
struct FitResult {
  double amplitude = 0.0;
  double rate = 0.0;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
  std::vector<FitPoint> points;

  double predict(double x) const;
  double predict_sigma(double x) const;
  double amplitude_sigma() const { return std::sqrt(covariance(0, 0)); }
};

// Weighted least squares of log|y| against x with sigma_log = sigma / |y|.
// All-zero sigmas give an unweighted fit with zero covariance. Throws
// FitError with fewer than two points, mixed signs, or any |y| <= 2 sigma;
// DomainError on negative sigma.
FitResult fit_exponential(std::span<const FitPoint> points);

// Effectiveness rubric, d = |e_mit - e_true|, t = 0.1 |e_true|:
//   3: d + sigma <= t
//   2: |d - t| <= sigma
//   1: sigma < |d - t| <= 2 sigma
//   0: otherwise
// Throws DomainError if e_true == 0 or sigma < 0.
int classify_effectiveness(double e_mit, double sigma, double e_true);

struct MitigatedEnergy {
  double value = 0.0;
  double sigma = 0.0;
};

// e / c with first-order propagation. Throws DomainError if c == 0.
MitigatedEnergy apply_damping(double e, double e_sigma, const DampingEstimate& c);

// Selected or raw energy of an estimate.
inline double energy_value(const EnergyEstimate& e, bool raw) { return raw ? e.raw : e.value; }
inline double energy_sigma(const EnergyEstimate& e, bool raw) { return raw ? e.raw_sigma : e.sigma; }

struct ZneResult {
  double value = 0.0;
  double sigma = 0.0;
  FitResult fit;
  std::vector<double> scales;
  std::vector<EnergyEstimate> per_scale;
};

// Energy at each CNOT fold scale, extrapolated to scale 0. Scale 1 reuses
// `seed`, so it shares samples with a plain measure_energy call. Throws
// DomainError unless scales has >= 2 entries including 1; fit failures
// rethrow as FitError carrying the scale-1 energy.
ZneResult zne(const Circuit& ansatz, const std::vector<PauliTerm>& terms, const DeviceModel& d,
              const EstimatorConfig& cfg, std::span<const double> scales, std::uint64_t seed,
              EnergyCache* cache = nullptr, bool raw = false);

struct PerturbativePoint {
  Circuit circuit;
  IsingParams model;
  double exact_energy = 0.0;
};

// Damping measured on circuits optimized at small h_x, reused elsewhere:
// c = mean C_i, sigma = std / sqrt(k) (the pooled shot-level sigma, used
// alone when k = 1, goes into pooled_sigma).
DampingEstimate predict_from_pert(std::span<const PerturbativePoint> points, const DeviceModel& d,
                                  const EstimatorConfig& cfg, std::uint64_t seed,
                                  EnergyCache* cache = nullptr, bool raw = false);

// Combines per-point damping factors as predict_from_pert does.
DampingEstimate combine_pert(std::span<const DampingEstimate> factors);

struct DepthPoint {
  int layers = 0;
  double c = 0.0;
  double sigma = 0.0;
};

// Exponential fit over points with layers <= l_max_fit, evaluated at l_target.
// Throws DomainError if l_target <= 0, FitError if fewer than two points fit.
DampingEstimate predict_from_depth(std::span<const DepthPoint> points, int l_max_fit, int l_target);

enum class ZeroThetaVariant : std::uint8_t { kFidelity, kEnergy };

// Fidelity variant: energy-weighted all-zeros probability of the per-term
// circuits. Energy variant: measured theta = 0 energy over its ideal value.
DampingEstimate zero_theta_damping(const ZeroThetaMeasurement& z, ZeroThetaVariant variant, bool raw);
DampingEstimate predict_zero_theta(int n, int layers, const std::vector<PauliTerm>& terms,
                                   const DeviceModel& d, const EstimatorConfig& cfg,
                                   ZeroThetaVariant variant, std::uint64_t seed, bool raw = false);

enum class ZneOrder : std::uint8_t { kFirst, kLast };

struct ZneCombinedResult {
  double value = 0.0;
  double sigma = 0.0;
  // Extrapolated calibration damping (kFirst) or the per-scale quotients (kLast).
  DampingEstimate calibration;
  FitResult fit;
};

// Zero-theta calibration combined with ZNE. The calibration damping at fold
// scale s is the theta = 0 energy over its ideal value.
//   kFirst: ZNE(target) / ZNE(calibration damping)
//   kLast:  extrapolation of E_s / c_s to s = 0
ZneCombinedResult zne_combined(const Circuit& ansatz, const std::vector<PauliTerm>& terms,
                               int layers, const DeviceModel& d, const EstimatorConfig& cfg,
                               ZneOrder order, std::span<const double> scales, std::uint64_t seed,
                               EnergyCache* cache = nullptr, bool raw = false);

// Energy-weighted product of (1 - e) over the pulses of each term's
// light-cone circuit, averaged over the estimator's top assignments. Weights
// are coefficient x exact term value on `ansatz`. No shots, so sigma = 0.
DampingEstimate predict_multiply_fidelities(const Circuit& ansatz, const std::vector<PauliTerm>& terms,
                                            const DeviceModel& d, const EstimatorConfig& cfg);

// Damping simulated under `model`, the user's belief about the device.
DampingEstimate predict_noise_model_sim(const Circuit& ansatz, const std::vector<PauliTerm>& terms,
                                        const DeviceModel& model, const EstimatorConfig& cfg,
                                        double exact_energy, std::uint64_t seed,
                                        EnergyCache* cache = nullptr, bool raw = false);

}  // namespace mf
