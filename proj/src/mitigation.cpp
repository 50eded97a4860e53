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

#include "mitiq_forge/mitigation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mitiq_forge/errors.hpp"
#include "mitiq_forge/util.hpp"

namespace mf {
namespace {

enum : std::uint64_t { kZneStream = 0x2e5e, kCalibrationStream = 0xca1b, kPertStream = 0x9e27, kModelStream = 0x51a0 };

void check_scales(std::span<const double> scales) {
  if (scales.size() < 2) throw DomainError("ZNE needs at least two fold scales");
  if (std::find(scales.begin(), scales.end(), 1.0) == scales.end()) {
    throw DomainError("ZNE scales must include 1");
  }
  for (double s : scales) {
    if (!(s >= 1.0)) throw DomainError("fold scales must be >= 1");
  }
}

std::uint64_t scale_seed(std::uint64_t seed, std::uint64_t stream, double scale, std::size_t k) {
  return scale == 1.0 && stream == kZneStream ? seed : derive_seed(seed, {stream, k});
}

double quotient_sigma(double a, double sa, double b, double sb) {
  const double q = a / b;
  return std::abs(q) * std::hypot(sa / a, sb / b);
}

}  // namespace

double FitResult::predict(double x) const { return amplitude * std::exp(-rate * x); }

double FitResult::predict_sigma(double x) const {
  if (amplitude == 0.0) return 0.0;
  // Variance of ln|y| = u0 - rate x with u0 = ln|amplitude|.
  const double var = covariance(0, 0) / (amplitude * amplitude) + x * x * covariance(1, 1) -
                     2 * x * covariance(0, 1) / amplitude;
  return std::abs(predict(x)) * std::sqrt(std::max(var, 0.0));
}

FitResult fit_exponential(std::span<const FitPoint> points) {
  if (points.size() < 2) throw FitError("exponential fit needs at least two points");
  bool all_exact = true;
  for (const auto& p : points) {
    if (p.sigma < 0.0) throw DomainError("negative sigma in fit input");
    if (p.sigma > 0.0) all_exact = false;
  }
  const double sign = points[0].y < 0 ? -1.0 : 1.0;
  for (const auto& p : points) {
    if (p.y == 0.0 || p.y * sign < 0.0) throw FitError("fit input changes sign");
    if (std::abs(p.y) <= 2.0 * p.sigma) throw FitError("fit input is dominated by noise");
  }
  const auto m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd X(m, 2);
  Eigen::VectorXd u(m), w(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const FitPoint& p = points[static_cast<std::size_t>(i)];
    X(i, 0) = 1.0;
    X(i, 1) = -p.x;
    u[i] = std::log(std::abs(p.y));
    // Exact points among noisy ones get a tiny floor, so they dominate.
    const double s_log = all_exact ? 1.0 : std::max(p.sigma, 1e-12 * std::abs(p.y)) / std::abs(p.y);
    w[i] = 1.0 / (s_log * s_log);
  }
  const Eigen::Matrix2d normal = X.transpose() * w.asDiagonal() * X;
  Eigen::FullPivLU<Eigen::Matrix2d> lu(normal);
  if (!lu.isInvertible()) throw FitError("fit abscissae are degenerate");
  const Eigen::Vector2d p = lu.solve(X.transpose() * w.asDiagonal() * u);
  FitResult r;
  r.amplitude = sign * std::exp(p[0]);
  r.rate = p[1];
  if (!std::isfinite(r.rate) || !std::isfinite(r.amplitude)) throw FitError("fit diverged");
  if (!all_exact) {
    const Eigen::Matrix2d cov = lu.inverse();
    const Eigen::Matrix2d jac = Eigen::Vector2d(r.amplitude, 1.0).asDiagonal();
    r.covariance = jac * cov * jac;
  }
  r.points.assign(points.begin(), points.end());
  return r;
}

int classify_effectiveness(double e_mit, double sigma, double e_true) {
  if (e_true == 0.0) throw DomainError("effectiveness needs a nonzero reference energy");
  if (sigma < 0.0) throw DomainError("negative sigma");
  const double d = std::abs(e_mit - e_true);
  const double t = 0.1 * std::abs(e_true);
  if (d + sigma <= t) return 3;
  const double gap = std::abs(d - t);
  if (gap <= sigma) return 2;
  if (gap <= 2 * sigma) return 1;
  return 0;
}

MitigatedEnergy apply_damping(double e, double e_sigma, const DampingEstimate& c) {
  if (c.c == 0.0) throw DomainError("cannot divide by a zero damping factor");
  const double v = e / c.c;
  return {v, std::hypot(e_sigma / c.c, v * c.sigma / c.c)};
}

ZneResult zne(const Circuit& ansatz, const std::vector<PauliTerm>& terms, const DeviceModel& d,
              const EstimatorConfig& cfg, std::span<const double> scales, std::uint64_t seed,
              EnergyCache* cache, bool raw) {
  check_scales(scales);
  ZneResult r;
  r.scales.assign(scales.begin(), scales.end());
  std::vector<FitPoint> pts;
  double at_one = 0.0;
  for (std::size_t k = 0; k < scales.size(); ++k) {
    EstimatorConfig c = cfg;
    c.fold_scale = scales[k];
    r.per_scale.push_back(measure_energy(ansatz, terms, d, c, scale_seed(seed, kZneStream, scales[k], k), cache));
    const EnergyEstimate& e = r.per_scale.back();
    pts.push_back({scales[k], energy_value(e, raw), energy_sigma(e, raw)});
    if (scales[k] == 1.0) at_one = energy_value(e, raw);
  }
  try {
    r.fit = fit_exponential(pts);
  } catch (const FitError& e) {
    throw FitError(std::string("zne: ") + e.what(), at_one);
  }
  r.value = r.fit.amplitude;
  r.sigma = r.fit.amplitude_sigma();
  return r;
}

DampingEstimate combine_pert(std::span<const DampingEstimate> factors) {
  if (factors.empty()) throw DomainError("no perturbative points");
  const auto k = static_cast<double>(factors.size());
  double mean = 0.0, pooled = 0.0;
  for (const auto& f : factors) {
    mean += f.c;
    pooled += f.sigma * f.sigma;
  }
  mean /= k;
  pooled = std::sqrt(pooled) / k;
  DampingEstimate out{mean, pooled, DampingMethod::kFromPert, pooled};
  if (factors.size() > 1) {
    double ss = 0.0;
    for (const auto& f : factors) ss += (f.c - mean) * (f.c - mean);
    out.sigma = std::sqrt(ss / (k - 1)) / std::sqrt(k);
  }
  return out;
}

DampingEstimate predict_from_pert(std::span<const PerturbativePoint> points, const DeviceModel& d,
                                  const EstimatorConfig& cfg, std::uint64_t seed, EnergyCache* cache,
                                  bool raw) {
  std::vector<DampingEstimate> factors;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const PerturbativePoint& p = points[i];
    const EnergyEstimate e =
        measure_energy(p.circuit, expand_terms(p.model), d, cfg, derive_seed(seed, {kPertStream, i}), cache);
    factors.push_back(damping_from(e, p.exact_energy, raw));
  }
  return combine_pert(factors);
}

DampingEstimate predict_from_depth(std::span<const DepthPoint> points, int l_max_fit, int l_target) {
  if (l_target <= 0) throw DomainError("target layer count must be positive");
  std::vector<FitPoint> pts;
  for (const auto& p : points) {
    if (p.layers <= l_max_fit) pts.push_back({static_cast<double>(p.layers), p.c, p.sigma});
  }
  const FitResult fit = fit_exponential(pts);
  return {fit.predict(l_target), fit.predict_sigma(l_target), DampingMethod::kDepthFit, std::nullopt};
}

DampingEstimate zero_theta_damping(const ZeroThetaMeasurement& z, ZeroThetaVariant variant, bool raw) {
  if (variant == ZeroThetaVariant::kFidelity) {
    DampingEstimate f = raw ? z.fidelity_raw : z.fidelity;
    f.method = DampingMethod::kZeroThetaFidelity;
    return f;
  }
  DampingEstimate e = damping_from(z.energy, z.ideal_energy, raw);
  e.method = DampingMethod::kZeroThetaEnergy;
  return e;
}

DampingEstimate predict_zero_theta(int n, int layers, const std::vector<PauliTerm>& terms,
                                   const DeviceModel& d, const EstimatorConfig& cfg,
                                   ZeroThetaVariant variant, std::uint64_t seed, bool raw) {
  return zero_theta_damping(measure_zero_theta(n, layers, terms, d, cfg, seed), variant, raw);
}

ZneCombinedResult zne_combined(const Circuit& ansatz, const std::vector<PauliTerm>& terms,
                               int layers, const DeviceModel& d, const EstimatorConfig& cfg,
                               ZneOrder order, std::span<const double> scales, std::uint64_t seed,
                               EnergyCache* cache, bool raw) {
  check_scales(scales);
  const int n = ansatz.n_qubits();
  const Circuit cal = build_alt_ansatz(n, AnsatzParams::zeros(n, layers, true));
  double ideal = 0.0;
  for (const auto& t : terms) ideal += t.coefficient * light_cone_expectation(cal, t);
  if (std::abs(ideal) < 1e-9) throw DomainError("calibration circuit has zero ideal energy");

  std::vector<FitPoint> target, damping, quotient;
  double at_one = 0.0;
  for (std::size_t k = 0; k < scales.size(); ++k) {
    EstimatorConfig c = cfg;
    c.fold_scale = scales[k];
    const EnergyEstimate e = measure_energy(ansatz, terms, d, c, scale_seed(seed, kZneStream, scales[k], k), cache);
    const EnergyEstimate z = measure_energy(cal, terms, d, c, scale_seed(seed, kCalibrationStream, scales[k], k), cache);
    const double ev = energy_value(e, raw), es = energy_sigma(e, raw);
    const double cv = energy_value(z, raw) / ideal, cs = energy_sigma(z, raw) / std::abs(ideal);
    target.push_back({scales[k], ev, es});
    damping.push_back({scales[k], cv, cs});
    quotient.push_back({scales[k], ev / cv, quotient_sigma(ev, es, cv, cs)});
    if (scales[k] == 1.0) at_one = ev;
  }
  ZneCombinedResult r;
  try {
    if (order == ZneOrder::kFirst) {
      const FitResult fe = fit_exponential(target);
      const FitResult fc = fit_exponential(damping);
      r.calibration = {fc.amplitude, fc.amplitude_sigma(), DampingMethod::kZneFirst, std::nullopt};
      r.value = fe.amplitude / fc.amplitude;
      r.sigma = quotient_sigma(fe.amplitude, fe.amplitude_sigma(), fc.amplitude, fc.amplitude_sigma());
      r.fit = fe;
    } else {
      r.fit = fit_exponential(quotient);
      r.value = r.fit.amplitude;
      r.sigma = r.fit.amplitude_sigma();
      const FitPoint& one = *std::find_if(damping.begin(), damping.end(), [](const FitPoint& p) { return p.x == 1.0; });
      r.calibration = {one.y, one.sigma, DampingMethod::kZneLast, std::nullopt};
    }
  } catch (const FitError& e) {
    throw FitError(std::string(order == ZneOrder::kFirst ? "zne_first: " : "zne_last: ") + e.what(), at_one);
  }
  return r;
}

DampingEstimate predict_multiply_fidelities(const Circuit& ansatz, const std::vector<PauliTerm>& terms,
                                            const DeviceModel& d, const EstimatorConfig& cfg) {
  const ScoreOptions gates_only{true, false};
  double num = 0.0, den = 0.0;
  for (const PauliTerm& t : terms) {
    if (t.coefficient == 0.0) continue;
    const double w = t.coefficient * light_cone_expectation(ansatz, t);
    const FilteredCircuit fc = term_circuit(ansatz, t);
    const auto assignments = select_assignments(d, fc.circuit, cfg.assignments, fc.labels, cfg.score);
    double f = 0.0;
    for (const auto& a : assignments) f += score_assignment(d, fc.circuit, a, fc.labels, gates_only);
    num += w * f / static_cast<double>(assignments.size());
    den += w;
  }
  if (std::abs(den) < 1e-12) throw DomainError("exact energy vanishes; weights are undefined");
  return {num / den, 0.0, DampingMethod::kMultiplyFidelities, std::nullopt};
}

DampingEstimate predict_noise_model_sim(const Circuit& ansatz, const std::vector<PauliTerm>& terms,
                                        const DeviceModel& model, const EstimatorConfig& cfg,
                                        double exact_energy, std::uint64_t seed, EnergyCache* cache,
                                        bool raw) {
  if (std::abs(exact_energy) < 1e-9) throw DomainError("damping is undefined for a vanishing exact energy");
  const EnergyEstimate e = measure_energy(ansatz, terms, model, cfg, derive_seed(seed, {kModelStream}), cache);
  DampingEstimate c = damping_from(e, exact_energy, raw);
  c.method = DampingMethod::kNoiseModelSim;
  return c;
}

}  // namespace mf
