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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mitiq_forge/errors.hpp"
#include "mitiq_forge/mitigation.hpp"
#include "oracle.hpp"

namespace mf {
namespace {

const std::vector<double> kScales{1.0, 3.0, 5.0};

// First-layer angles only, last layer zero: a Pauli error after the CNOT
// flips a target-qubit Z outcome independently of the state.
Circuit first_layer_only(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  AnsatzParams p = AnsatzParams::zeros(n, 1, false);
  for (int q = 0; q < n; ++q) p.values[q] = u(rng);
  return build_alt_ansatz(n, p);
}

TEST(FitTest, ExactExponential) {
  const std::vector<FitPoint> pts{{1, std::exp(-0.5), 0.01}, {3, std::exp(-1.5), 0.01}, {5, std::exp(-2.5), 0.01}};
  const FitResult f = fit_exponential(pts);
  EXPECT_NEAR(f.amplitude, 1.0, 1e-10);
  EXPECT_NEAR(f.rate, 0.5, 1e-10);
  const std::vector<FitPoint> two{{1, -2.0, 0.0}, {2, -1.0, 0.0}};
  const FitResult g = fit_exponential(two);
  EXPECT_NEAR(g.predict(1), -2.0, 1e-12);
  EXPECT_NEAR(g.predict(2), -1.0, 1e-12);
  EXPECT_NEAR(g.amplitude, -4.0, 1e-12);
  EXPECT_EQ(g.amplitude_sigma(), 0.0);
}

TEST(FitTest, Failures) {
  const std::vector<FitPoint> mixed{{1, 0.5, 0.01}, {3, -0.1, 0.01}};
  EXPECT_THROW(fit_exponential(mixed), FitError);
  const std::vector<FitPoint> noisy{{1, 0.5, 0.01}, {3, 0.01, 0.01}};
  EXPECT_THROW(fit_exponential(noisy), FitError);
  const std::vector<FitPoint> one{{1, 0.5, 0.01}};
  EXPECT_THROW(fit_exponential(one), FitError);
  const std::vector<FitPoint> same_x{{1, 0.5, 0.01}, {1, 0.4, 0.01}};
  EXPECT_THROW(fit_exponential(same_x), FitError);
}

TEST(FitTest, MonteCarloUnbiasedAndCalibrated) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g(0.0, 1.0);
  const double A = -3.0, b = 0.3, s = 0.02;
  const int reps = 100;
  double sum = 0, sum2 = 0, sigma_sum = 0;
  for (int r = 0; r < reps; ++r) {
    std::vector<FitPoint> pts;
    for (double x : kScales) pts.push_back({x, A * std::exp(-b * x) + s * g(rng), s});
    const FitResult f = fit_exponential(pts);
    sum += f.amplitude;
    sum2 += f.amplitude * f.amplitude;
    sigma_sum += f.amplitude_sigma();
  }
  const double mean = sum / reps;
  const double sd = std::sqrt((sum2 - sum * sum / reps) / (reps - 1));
  EXPECT_LT(std::abs(mean - A), 2 * sd / std::sqrt(reps));
  EXPECT_NEAR(sigma_sum / reps / sd, 1.0, 0.2);
}

TEST(ClassifyTest, Examples) {
  EXPECT_EQ(classify_effectiveness(-10.0, 0.0, -10.0), 3);
  const double t = 1.0;
  EXPECT_EQ(classify_effectiveness(-10.0 + 2 * t, t / 10, -10.0), 0);
  EXPECT_EQ(classify_effectiveness(-10.0 + t, 0.3, -10.0), 2);
  EXPECT_EQ(classify_effectiveness(-10.0 + t, 1e-9, -10.0), 2);
  EXPECT_EQ(classify_effectiveness(-10.0 + 1.15, 0.1, -10.0), 1);
  EXPECT_THROW(classify_effectiveness(1.0, 0.1, 0.0), DomainError);
  EXPECT_THROW(classify_effectiveness(1.0, -0.1, 1.0), DomainError);
}

TEST(ClassifyTest, Monotone) {
  for (double sigma : {0.0, 0.05, 0.3, 1.0, 3.0}) {
    int prev = -1;
    for (double d = 6.0; d >= 0.0; d -= 0.01) {
      const int c = classify_effectiveness(-10.0 + d, sigma, -10.0);
      EXPECT_GE(c, prev) << "sigma=" << sigma << " d=" << d;
      prev = c;
    }
  }
}

TEST(ApplyDampingTest, Propagation) {
  const MitigatedEnergy m = apply_damping(-6.0, 0.3, {0.5, 0.02, DampingMethod::kObserved, std::nullopt});
  EXPECT_NEAR(m.value, -12.0, 1e-12);
  EXPECT_NEAR(m.sigma, std::sqrt(0.36 + std::pow(12.0 * 0.04, 2)), 1e-12);
  EXPECT_THROW(apply_damping(1.0, 0.1, {0.0, 0.0, DampingMethod::kObserved, std::nullopt}), DomainError);
}

TEST(PertTest, SpreadIsStdOfMean) {
  const std::vector<double> cs{0.71, 0.74, 0.69, 0.73, 0.70};
  std::vector<DampingEstimate> f;
  for (double c : cs) f.push_back({c, 0.01, DampingMethod::kObserved, std::nullopt});
  const DampingEstimate e = combine_pert(f);
  double mean = 0, ss = 0;
  for (double c : cs) mean += c / 5;
  for (double c : cs) ss += (c - mean) * (c - mean);
  EXPECT_NEAR(e.c, mean, 1e-15);
  EXPECT_NEAR(e.sigma, std::sqrt(ss / 4) / std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(*e.pooled_sigma, std::sqrt(5 * 1e-4) / 5, 1e-15);
  EXPECT_EQ(e.method, DampingMethod::kFromPert);
}

TEST(DepthTest, ExactExponentialPrediction) {
  std::vector<DepthPoint> pts;
  for (int l = 1; l <= 20; ++l) pts.push_back({l, 0.95 * std::exp(-0.04 * l), 0.001});
  const DampingEstimate c = predict_from_depth(pts, 15, 40);
  EXPECT_NEAR(c.c, 0.95 * std::exp(-1.6), 1e-10);
  EXPECT_GT(c.sigma, 0.0);
  EXPECT_THROW(predict_from_depth(pts, 15, 0), DomainError);
  EXPECT_THROW(predict_from_depth(pts, 0, 5), FitError);
}

TEST(ZneTest, ZeroNoiseIsFlat) {
  const Circuit a = first_layer_only(4, 1);
  const auto terms = expand_terms({4, 1.0, 0.8, 0.2, true});
  EstimatorConfig cfg;
  cfg.shots_per_term = 4096;
  cfg.rc_instances = 2;
  const DeviceModel d = DeviceModel::noiseless(4);
  const ZneResult r = zne(a, terms, d, cfg, kScales, 5);
  const EnergyEstimate plain = measure_energy(a, terms, d, cfg, 5);
  EXPECT_EQ(r.per_scale[0].value, plain.value);
  EXPECT_LT(std::abs(r.value - plain.value), 4 * std::hypot(r.sigma, plain.sigma));
  const std::vector<double> bad{3.0, 5.0};
  EXPECT_THROW(zne(a, terms, d, cfg, bad, 5), DomainError);
}

TEST(ZneTest, RecoversConstructedExponential) {
  // Z on the target of one CNOT: each folded copy multiplies <Z> by 1 - 16p/15.
  const Circuit a = first_layer_only(4, 2);
  const std::vector<PauliTerm> terms{{-1.0, PauliKind::kZ, {1}}};
  const double exact = -exact_expectation(a, terms[0]);
  const DeviceModel d = DeviceModel::uniform(4, 0.08, 0.0, 0.0, 0.0);
  EstimatorConfig cfg;
  cfg.shots_per_term = 40000;
  cfg.rc_instances = 4;
  const ZneResult r = zne(a, terms, d, cfg, kScales, 9);
  EXPECT_LT(std::abs(r.value - exact), 4 * r.sigma);
  EXPECT_NEAR(std::exp(-r.fit.rate), 1 - 16 * 0.08 / 15, 0.02);
  for (auto order : {ZneOrder::kFirst, ZneOrder::kLast}) {
    const ZneCombinedResult z = zne_combined(a, terms, 1, d, cfg, order, kScales, 9);
    EXPECT_LT(std::abs(z.value - exact), 4 * z.sigma) << static_cast<int>(order);
  }
}

TEST(ZneTest, FirstAndLastCoincideForFlatCalibration) {
  // h_x = 0 and no noise: the calibration damping is exactly 1 at every scale.
  const Circuit a = first_layer_only(4, 3);
  const auto terms = expand_terms({4, 1.0, 0.0, 0.3, true});
  EstimatorConfig cfg;
  cfg.shots_per_term = 2048;
  cfg.rc_instances = 2;
  const DeviceModel d = DeviceModel::noiseless(4);
  const ZneCombinedResult first = zne_combined(a, terms, 1, d, cfg, ZneOrder::kFirst, kScales, 4);
  const ZneCombinedResult last = zne_combined(a, terms, 1, d, cfg, ZneOrder::kLast, kScales, 4);
  EXPECT_EQ(first.calibration.c, 1.0);
  EXPECT_NEAR(first.value, last.value, 1e-12 * std::abs(first.value));
  EXPECT_NEAR(first.value, zne(a, terms, d, cfg, kScales, 4).value, 1e-12 * std::abs(first.value));
}

TEST(ZneTest, DeepStrongNoiseFails) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  AnsatzParams p = AnsatzParams::zeros(8, 40, true);
  for (Eigen::Index i = 0; i < p.values.size(); ++i) p.values[i] = u(rng);
  const Circuit a = build_alt_ansatz(8, p);
  const auto terms = expand_terms({8, 1.0, 1.5, 0.1, true});
  const DeviceModel d = DeviceModel::uniform(8, 0.06, 0.006, 0.0, 0.0);
  EstimatorConfig cfg;
  cfg.shots_per_term = 128;
  cfg.rc_instances = 1;
  cfg.assignments = 1;
  int failed = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    try {
      const ZneResult r = zne(a, terms, d, cfg, kScales, s);
      if (r.sigma > 0.5 * std::abs(r.value)) ++failed;
    } catch (const FitError& e) {
      ASSERT_TRUE(e.fallback().has_value());
      ++failed;
    }
  }
  EXPECT_GT(failed, 10);
}

TEST(PredictTest, ZeroNoiseGivesOne) {
  const Circuit a = first_layer_only(6, 4);
  const IsingParams h{6, 1.0, 0.7, 0.2, true};
  const auto terms = expand_terms(h);
  double e = 0;
  for (const auto& t : terms) e += t.coefficient * exact_expectation(a, t);
  const DeviceModel d = DeviceModel::noiseless(6);
  EstimatorConfig cfg;
  cfg.shots_per_term = 4096;
  const std::vector<PerturbativePoint> pert{{a, h, e}};
  const DampingEstimate fp = predict_from_pert(pert, d, cfg, 1);
  EXPECT_NEAR(fp.c, 1.0, 4 * fp.sigma);
  for (auto v : {ZeroThetaVariant::kFidelity, ZeroThetaVariant::kEnergy}) {
    const DampingEstimate z = predict_zero_theta(6, 2, terms, d, cfg, v, 2);
    EXPECT_NEAR(z.c, 1.0, 4 * z.sigma + 1e-12);
  }
  EXPECT_EQ(predict_multiply_fidelities(a, terms, d, cfg).c, 1.0);
  const DampingEstimate sim = predict_noise_model_sim(a, terms, d, cfg, e, 3);
  EXPECT_NEAR(sim.c, 1.0, 4 * sim.sigma);
}

TEST(PredictTest, IdealZeroThetaEnergy) {
  const auto terms = expand_terms({20, 1.0, 1.5, 0.1, true});
  EstimatorConfig cfg;
  cfg.shots_per_term = 64;
  cfg.rc_instances = 1;
  cfg.assignments = 1;
  const ZeroThetaMeasurement z = measure_zero_theta(20, 1, terms, DeviceModel::noiseless(20), cfg, 1);
  EXPECT_NEAR(z.ideal_energy, -22.0, 1e-12);
}

TEST(PredictTest, MultiplyFidelitiesCountsPulses) {
  const Circuit a = first_layer_only(4, 5);
  const double p = 0.03;
  const DeviceModel d = DeviceModel::uniform(4, p, 0.0, 0.0, 0.0);
  const std::vector<PauliTerm> z1{{1.0, PauliKind::kZ, {1}}};
  EXPECT_NEAR(predict_multiply_fidelities(a, z1, d, {}).c, 1 - p, 1e-15);
  const std::vector<PauliTerm> zz{{1.0, PauliKind::kZZ, {1, 2}}};
  const std::size_t k = term_circuit(a, zz[0]).circuit.count(GateKind::kCnot);
  EXPECT_EQ(k, 2u);
  EXPECT_NEAR(predict_multiply_fidelities(a, zz, d, {}).c, std::pow(1 - p, 2), 1e-15);
}

TEST(PredictTest, NoiseModelSimulation) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  AnsatzParams par = AnsatzParams::zeros(8, 3, true);
  for (Eigen::Index i = 0; i < par.values.size(); ++i) par.values[i] = u(rng);
  const Circuit a = build_alt_ansatz(8, par);
  const auto terms = expand_terms({8, 1.0, 1.5, 0.1, true});
  double exact = 0;
  for (const auto& t : terms) exact += t.coefficient * exact_expectation(a, t);
  const DeviceModel d = synthetic_device(8, 11).scaled(3.0, 0.0);
  EstimatorConfig cfg;
  cfg.shots_per_term = 4096;
  const DampingEstimate observed = measure_damping(a, terms, d, cfg, exact, 1);
  const DampingEstimate sim = predict_noise_model_sim(a, terms, d, cfg, exact, 1);
  EXPECT_LT(std::abs(sim.c - observed.c), 4 * std::hypot(sim.sigma, observed.sigma));
  const DampingEstimate half = predict_noise_model_sim(a, terms, d.scaled(0.5), cfg, exact, 1);
  EXPECT_GT(half.c - observed.c, 4 * std::hypot(half.sigma, observed.sigma));

  // Dividing by the observed damping of an independent run recovers the exact energy.
  const EnergyEstimate e = measure_energy(a, terms, d, cfg, 2);
  const MitigatedEnergy m = apply_damping(e.value, e.sigma, observed);
  EXPECT_LT(std::abs(m.value - exact), 4 * m.sigma);
}

}  // namespace
}  // namespace mf
