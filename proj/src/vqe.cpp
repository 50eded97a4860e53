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

#include "mitiq_forge/vqe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "mitiq_forge/simulator.hpp"
#include "mitiq_forge/util.hpp"

namespace mf {
namespace {

constexpr double kPi = std::numbers::pi;
enum : std::uint64_t { kCalibStream = 0xca1, kStepStream = 0x57e9 };

Eigen::VectorXd rademacher(int dim, std::mt19937_64& rng) {
  Eigen::VectorXd d(dim);
  for (int i = 0; i < dim; ++i) d[i] = (rng() >> 63) ? 1.0 : -1.0;
  return d;
}

Eigen::VectorXd uniform_angles(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = (2.0 * unit_uniform(rng()) - 1.0) * kPi;
  return v;
}

double wrap_angle(double t) { return std::remainder(t, 2 * kPi); }

// Term value on the light cone of the RY/CNOT ansatz, kept on the real path.
double cone_value(const Circuit& c, const PauliTerm& t) {
  Circuit basis = c;
  if (t.kind == PauliKind::kX) {
    std::vector<Gate> g = c.gates();
    g.push_back(Gate::h(t.support[0]));
    basis = Circuit(c.n_qubits(), std::move(g), c.measured());
  }
  const FilteredCircuit f = light_cone_slice(basis, t.support);
  const std::vector<int>& m = f.circuit.measured();
  return exact_expectation(f.circuit, {1.0, m.size() == 1 ? PauliKind::kZ : PauliKind::kZZ, m});
}

// Minimizes a0 + sum_k a_k cos(k t) + b_k sin(k t) over t.
double trig_argmin(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const auto D = static_cast<int>(a.size()) - 1;
  auto value = [&](double t) {
    double v = a[0];
    for (int k = 1; k <= D; ++k) v += a[k] * std::cos(k * t) + b[k] * std::sin(k * t);
    return v;
  };
  const int grid = 24 * D;
  double best_t = 0.0, best_v = value(0.0);
  for (int g = 1; g < grid; ++g) {
    const double t = 2 * kPi * g / grid;
    const double v = value(t);
    if (v < best_v) {
      best_v = v;
      best_t = t;
    }
  }
  for (int it = 0; it < 20; ++it) {
    double d1 = 0.0, d2 = 0.0;
    for (int k = 1; k <= D; ++k) {
      const double c = std::cos(k * best_t), s = std::sin(k * best_t);
      d1 += k * (-a[k] * s + b[k] * c);
      d2 += -k * k * (a[k] * c + b[k] * s);
    }
    if (d2 <= 0.0) break;
    const double step = d1 / d2;
    const double t = best_t - step;
    const double v = value(t);
    if (v > best_v) break;
    best_t = t;
    best_v = v;
    if (std::abs(step) < 1e-14) break;
  }
  return best_t;
}

// Minimizes E(origin + t d) from t = 1 (the current point, energy e1) by
// doubling to a bracket and golden-section refinement. Updates p.
double line_search(const IsingParams& h, AnsatzParams& p, const Eigen::VectorXd& origin,
                   const Eigen::VectorXd& d, double e1) {
  auto at = [&](double t) {
    AnsatzParams q = p;
    q.values = origin + t * d;
    return ansatz_energy(h, q);
  };
  double lo = 0.0, mid = 1.0, e_mid = e1, step = 1.0, hi = 2.0, e_hi = at(hi);
  int expansions = 0;
  while (e_hi < e_mid && expansions++ < 20) {
    lo = mid;
    mid = hi;
    e_mid = e_hi;
    step *= 2;
    hi = mid + step;
    e_hi = at(hi);
  }
  if (mid == 1.0) return e1;  // no gain beyond the coordinate sweep
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
  double f1 = at(x1), f2 = at(x2);
  for (int it = 0; it < 40 && b - a > 1e-8 * (1 + std::abs(mid)); ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = at(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = at(x2);
    }
  }
  double t = mid, e = e_mid;
  if (f1 < e) t = x1, e = f1;
  if (f2 < e) t = x2, e = f2;
  p.values = origin + t * d;
  return e;
}

}  // namespace

Eigen::VectorXd spsa_gradient(double e_plus, double e_minus, double ck, const Eigen::VectorXd& delta) {
  // Delta is +-1, so Delta^{-1} = Delta.
  return (e_plus - e_minus) / (2 * ck) * delta;
}

void SpsaConfig::validate() const {
  if (!(c > 0.0)) throw ConfigError("SPSA c must be positive");
  if (a < 0.0) throw ConfigError("SPSA a must be non-negative");
  if (max_iter < 1) throw ConfigError("SPSA max_iter must be >= 1");
  if (calib_evals < 0 || calib_evals % 2 != 0) throw ConfigError("SPSA calib_evals must be even");
  if (a == 0.0 && calib_evals == 0) throw ConfigError("SPSA needs calib_evals when a is not given");
  if (!(target_step > 0.0)) throw ConfigError("SPSA target_step must be positive");
}

std::string OptTrace::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "iteration,e_plus,e_minus,sigma,best_so_far,damping\n";
  for (const auto& r : records) {
    os << r.iteration << ',' << r.e_plus << ',' << r.e_minus << ',' << r.sigma << ',' << r.best_so_far << ',';
    if (r.damping) os << *r.damping;
    os << '\n';
  }
  return os.str();
}

SpsaResult spsa_optimize(const Objective& f, const Eigen::VectorXd& theta0, const SpsaConfig& cfg,
                         std::uint64_t seed, const Reference& reference) {
  cfg.validate();
  if (theta0.size() < 1) throw DomainError("SPSA needs at least one parameter");
  const int dim = static_cast<int>(theta0.size());
  const double A = cfg.stability();
  std::mt19937_64 rng(derive_seed(seed, {kStepStream}));
  OptTrace trace;
  Eigen::VectorXd theta = theta0;

  // Both evaluations of a pair, concurrently.
  auto pair = [&](const Eigen::VectorXd& plus, const Eigen::VectorXd& minus, std::uint64_t s1,
                  std::uint64_t s2) {
    std::array<Evaluation, 2> out;
    try {
      parallel_for(2, [&](std::size_t k) { out[k] = f(k == 0 ? plus : minus, k == 0 ? s1 : s2); });
    } catch (const std::exception& e) {
      throw OptimizationError(std::string("objective failed: ") + e.what(), trace);
    }
    return out;
  };

  double a = cfg.a;
  if (a == 0.0) {
    double mean_diff = 0.0;
    const int probes = cfg.calib_evals / 2;
    for (int j = 0; j < probes; ++j) {
      const Eigen::VectorXd delta = rademacher(dim, rng);
      const auto ju = static_cast<std::uint64_t>(j);
      const auto e = pair(theta + cfg.c * delta, theta - cfg.c * delta, derive_seed(seed, {kCalibStream, ju, 0}),
                          derive_seed(seed, {kCalibStream, ju, 1}));
      mean_diff += std::abs(e[0].value - e[1].value) / probes;
    }
    // First step a_0 |E+ - E-| / (2 c) per component equals target_step.
    a = mean_diff > 0.0 ? cfg.target_step * 2 * cfg.c * std::pow(1 + A, cfg.alpha) / mean_diff
                        : cfg.target_step * std::pow(1 + A, cfg.alpha);
  }
  trace.calibrated_a = a;

  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < cfg.max_iter; ++k) {
    const double ak = a / std::pow(k + 1 + A, cfg.alpha);
    const double ck = cfg.c / std::pow(k + 1, cfg.gamma);
    const Eigen::VectorXd delta = rademacher(dim, rng);
    OptRecord r;
    r.iteration = k;
    r.theta_plus = theta + ck * delta;
    r.theta_minus = theta - ck * delta;
    const auto ku = static_cast<std::uint64_t>(k);
    const auto e = pair(r.theta_plus, r.theta_minus, derive_seed(seed, {ku, 0}), derive_seed(seed, {ku, 1}));
    r.e_plus = e[0].value;
    r.e_minus = e[1].value;
    r.sigma = std::hypot(e[0].sigma, e[1].sigma);
    if (r.e_plus < best) {
      best = r.e_plus;
      trace.best_theta = r.theta_plus;
    }
    if (r.e_minus < best) {
      best = r.e_minus;
      trace.best_theta = r.theta_minus;
    }
    r.best_so_far = best;
    if (reference) {
      const double rp = reference(r.theta_plus), rm = reference(r.theta_minus);
      if (rp != 0.0 && rm != 0.0) r.damping = 0.5 * (r.e_plus / rp + r.e_minus / rm);
    }
    theta -= ak * spsa_gradient(r.e_plus, r.e_minus, ck, delta);
    trace.records.push_back(std::move(r));
  }
  trace.best_value = best;
  return {trace.best_theta, std::move(trace)};
}

SpsaResult spsa_optimize(const Objective& f, int dim, const SpsaConfig& cfg, std::uint64_t seed,
                         const Reference& reference) {
  if (dim < 1) throw DomainError("SPSA needs at least one parameter");
  return spsa_optimize(f, uniform_angles(dim, derive_seed(seed, {0x1417})), cfg, seed, reference);
}

double ansatz_energy(const IsingParams& h, const AnsatzParams& params) {
  const Circuit c = build_alt_ansatz(h.n, params);
  const auto terms = expand_terms(h);
  if (!params.symmetric || 2 * params.layers + 2 >= h.n) return circuit_energy(c, terms);
  double cell = 0.0;
  for (const auto& t : terms) {
    if (t.coefficient != 0.0 && (t.support[0] == 0 || t.support[0] == 1)) cell += t.coefficient * cone_value(c, t);
  }
  return cell * (h.n / 2);
}

AnsatzParams prepend_zero_layers(const AnsatzParams& params, int n, int layers) {
  if (layers < 0) throw DomainError("cannot prepend a negative number of layers");
  AnsatzParams p = params;
  for (int k = 0; k < layers; ++k) {
    AnsatzParams next = AnsatzParams::zeros(n, p.layers + 1, p.symmetric);
    for (int j = 0; j <= p.layers; ++j) {
      if (p.symmetric) {
        next.values[2 * (j + 1)] = p.values[2 * j + 1];
        next.values[2 * (j + 1) + 1] = p.values[2 * j];
      } else {
        for (int q = 0; q < n; ++q) next.values[(j + 1) * n + q] = p.values[j * n + (q + n - 1) % n];
      }
    }
    p = std::move(next);
  }
  return p;
}

ClassicalResult classical_optimize(const IsingParams& h, int layers, bool symmetric, std::uint64_t seed,
                                   const ClassicalOptions& opts) {
  if (h.n > 24) throw CapacityError("classical optimization is limited to 24 spins");
  if (layers < 0) throw DomainError("negative layer count");
  const int n = h.n;
  const auto dim = static_cast<Eigen::Index>(AnsatzParams::expected_size(n, layers, symmetric));
  const int degree = symmetric ? n / 2 : 1;
  const int samples = 2 * degree + 1;

  ClassicalResult best;
  best.energy = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    AnsatzParams p = AnsatzParams::zeros(n, layers, symmetric);
    if (r == 0 && opts.initial) {
      const AnsatzParams& init = *opts.initial;
      if (!init.symmetric && symmetric) {
        throw ShapeError("a full warm start cannot seed a symmetric ansatz");
      }
      if (init.layers > layers) throw ShapeError("warm start has more layers than requested");
      const AnsatzParams base = init.symmetric && !symmetric ? expand_symmetric(init, n) : init;
      p = prepend_zero_layers(base, n, layers - base.layers);
    } else {
      p.values = uniform_angles(dim, derive_seed(seed, {static_cast<std::uint64_t>(r)}));
    }
    double energy = ansatz_energy(h, p);
    Eigen::VectorXd f(samples), ca(degree + 1), cb(degree + 1);
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
      const double start = energy;
      const Eigen::VectorXd sweep_start = p.values;
      for (Eigen::Index i = 0; i < dim; ++i) {
        const double t0 = p.values[i];
        f[0] = energy;
        for (int j = 1; j < samples; ++j) {
          p.values[i] = t0 + 2 * kPi * j / samples;
          f[j] = ansatz_energy(h, p);
        }
        ca.setZero();
        cb.setZero();
        ca[0] = f.mean();
        for (int k = 1; k <= degree; ++k) {
          for (int j = 0; j < samples; ++j) {
            const double phase = 2 * kPi * k * j / samples;
            ca[k] += 2.0 / samples * f[j] * std::cos(phase);
            cb[k] += 2.0 / samples * f[j] * std::sin(phase);
          }
        }
        p.values[i] = wrap_angle(t0 + trig_argmin(ca, cb));
        const double e = ansatz_energy(h, p);
        if (e <= energy) {
          energy = e;
        } else {
          p.values[i] = t0;
        }
      }
      // Extrapolate along the sweep's net displacement.
      const Eigen::VectorXd d = p.values - sweep_start;
      if (d.norm() > 0.0) energy = line_search(h, p, sweep_start, d, energy);
      if (start - energy < opts.tolerance) break;
    }
    if (energy < best.energy) {
      best.energy = energy;
      best.params = p;
    }
  }
  best.circuit = build_alt_ansatz(n, best.params);
  return best;
}

Objective estimator_objective(const IsingParams& h, int layers, bool symmetric, const DeviceModel& d,
                              const EstimatorConfig& cfg) {
  const auto terms = expand_terms(h);
  return [h, layers, symmetric, d, cfg, terms](const Eigen::VectorXd& theta, std::uint64_t seed) {
    AnsatzParams p{layers, theta, symmetric};
    const EnergyEstimate e = measure_energy(build_alt_ansatz(h.n, p), terms, d, cfg, seed);
    return Evaluation{e.value, e.sigma};
  };
}

}  // namespace mf
