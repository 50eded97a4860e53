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
#include <filesystem>
#include <random>

#include "mitiq_forge/errors.hpp"
#include "mitiq_forge/estimator.hpp"
#include "mitiq_forge/util.hpp"
#include "oracle.hpp"

namespace mf {
namespace {

AnsatzParams random_params(int n, int layers, double spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  AnsatzParams p = AnsatzParams::zeros(n, layers, false);
  std::uniform_real_distribution<double> u(-spread, spread);
  for (Eigen::Index i = 0; i < p.values.size(); ++i) p.values[i] = u(rng);
  return p;
}

// <psi|H|psi> from the dense state and dense Hamiltonian.
double dense_energy(const Circuit& c, const IsingParams& h) {
  const oracle::Vec psi = oracle::run(c);
  const Eigen::MatrixXd H = dense_hamiltonian(h);
  return (psi.adjoint() * H.cast<std::complex<double>>() * psi)(0, 0).real();
}

// Per-term value seen through uncorrelated flips with rates (e0, e1):
// Z -> m<Z> + d, ZZ -> m^2<ZZ> + m d (<Z_i> + <Z_j>) + d^2, m = 1 - e0 - e1, d = e1 - e0.
double biased_energy(const Circuit& c, const std::vector<PauliTerm>& terms, double e0, double e1) {
  const oracle::Vec psi = oracle::run(c);
  const int n = c.n_qubits();
  const double m = 1 - e0 - e1, d = e1 - e0;
  double e = 0.0;
  for (const auto& t : terms) {
    double v = 0.0;
    if (t.kind == PauliKind::kX) {
      v = m * oracle::expectation(psi, n, {t.support[0]}, "X") + d;
    } else if (t.kind == PauliKind::kZ) {
      v = m * oracle::expectation(psi, n, {t.support[0]}, "Z") + d;
    } else {
      const int a = t.support[0], b = t.support[1];
      v = m * m * oracle::expectation(psi, n, {a, b}, "ZZ") +
          m * d * (oracle::expectation(psi, n, {a}, "Z") + oracle::expectation(psi, n, {b}, "Z")) + d * d;
    }
    e += t.coefficient * v;
  }
  return e;
}

const IsingParams kModel{8, 1.0, 1.5, 0.1, true};

TEST(TermCircuitTest, Shapes) {
  const Circuit a = build_alt_ansatz(20, random_params(20, 3, 1.0, 1));
  const FilteredCircuit z = term_circuit(a, {1.0, PauliKind::kZ, {5}});
  EXPECT_EQ(z.circuit.measured().size(), 1u);
  const FilteredCircuit zz = term_circuit(a, {1.0, PauliKind::kZZ, {3, 4}});
  EXPECT_EQ(zz.circuit.n_qubits(), 8);
  EXPECT_EQ(zz.circuit.measured().size(), 2u);
  for (const Gate& g : zz.circuit.gates()) {
    EXPECT_TRUE(g.kind == GateKind::kCnot || g.kind == GateKind::kRz || g.kind == GateKind::kSx);
  }
  EXPECT_THROW(term_circuit(a, {1.0, PauliKind::kZ, {20}}), SupportError);
}

TEST(TermCircuitTest, XTermMeasuresXBasis) {
  const Circuit a = build_alt_ansatz(6, random_params(6, 2, 3.0, 2));
  const oracle::Vec psi = oracle::run(a);
  for (int q = 0; q < 6; ++q) {
    const FilteredCircuit f = term_circuit(a, {1.0, PauliKind::kX, {q}});
    const oracle::Vec phi = oracle::run(f.circuit);
    const int local = f.circuit.measured()[0];
    EXPECT_NEAR(oracle::expectation(phi, f.circuit.n_qubits(), {local}, "Z"),
                oracle::expectation(psi, 6, {q}, "X"), 1e-10);
  }
}

TEST(TermCircuitTest, LightConeExpectationMatchesFullState) {
  const Circuit a = build_alt_ansatz(10, random_params(10, 3, 3.0, 12));
  for (const PauliTerm& t : expand_terms({10, 1.0, 1.0, 1.0, true})) {
    EXPECT_NEAR(light_cone_expectation(a, t), exact_expectation(a, t), 1e-12) << describe(t);
  }
}

TEST(MeasureEnergyTest, NoiselessWithinFourSigma) {
  const Circuit a = build_alt_ansatz(8, random_params(8, 3, 0.8, 3));
  const auto terms = expand_terms(kModel);
  EstimatorConfig cfg;
  cfg.shots_per_term = 4096;
  const EnergyEstimate e = measure_energy(a, terms, DeviceModel::noiseless(8), cfg, 11);
  const double exact = dense_energy(a, kModel);
  EXPECT_GT(e.sigma, 0.0);
  EXPECT_LT(std::abs(e.value - exact), 4 * e.sigma);
  EXPECT_EQ(e.per_term.size(), terms.size());
  double v = 0.0, s2 = 0.0;
  for (const auto& t : e.per_term) {
    v += t.term.coefficient * t.value;
    s2 += t.term.coefficient * t.term.coefficient * t.sigma * t.sigma;
  }
  EXPECT_NEAR(e.value, v, 1e-12);
  EXPECT_NEAR(e.sigma, std::sqrt(s2), 1e-12);
}

TEST(MeasureEnergyTest, DeterministicAndLinear) {
  const Circuit a = build_alt_ansatz(8, random_params(8, 2, 0.8, 4));
  auto terms = expand_terms(kModel);
  const DeviceModel d = synthetic_device(8, 5);
  EstimatorConfig cfg;
  cfg.shots_per_term = 512;
  cfg.rc_instances = 2;
  const EnergyEstimate e1 = measure_energy(a, terms, d, cfg, 21);
  set_thread_count(1);
  const EnergyEstimate e2 = measure_energy(a, terms, d, cfg, 21);
  set_thread_count(0);
  EXPECT_EQ(energy_to_json(e1), energy_to_json(e2));
  for (auto& t : terms) t.coefficient *= 2;
  const EnergyEstimate e3 = measure_energy(a, terms, d, cfg, 21);
  EXPECT_EQ(e3.value, 2 * e1.value);
  EXPECT_EQ(e3.sigma, 2 * e1.sigma);
  EXPECT_NE(e3.config_hash, e1.config_hash);
}

TEST(MeasureEnergyTest, ZeroCoefficientTermsAreNotSampled) {
  const Circuit a = build_alt_ansatz(8, random_params(8, 2, 0.8, 4));
  const auto terms = expand_terms({8, 1.0, 1.0, 0.0, true});
  const EnergyEstimate e = measure_energy(a, terms, synthetic_device(8, 5), {}, 3);
  for (const auto& t : e.per_term) {
    if (t.term.coefficient == 0.0) EXPECT_EQ(t.sigma, 0.0);
  }
}

TEST(MeasureEnergyTest, Budget) {
  const Circuit a = build_alt_ansatz(8, random_params(8, 1, 0.5, 1));
  EstimatorConfig cfg;
  cfg.shots_per_term = 31;
  EXPECT_THROW(measure_energy(a, expand_terms(kModel), DeviceModel::noiseless(8), cfg, 1), BudgetError);
  cfg.shots_per_term = 32;
  EXPECT_NO_THROW(measure_energy(a, expand_terms(kModel), DeviceModel::noiseless(8), cfg, 1));
  cfg.rc_instances = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(MeasureEnergyTest, CacheHit) {
  const Circuit a = build_alt_ansatz(8, random_params(8, 1, 0.5, 1));
  EnergyCache cache;
  EstimatorConfig cfg;
  cfg.shots_per_term = 256;
  const auto e1 = measure_energy(a, expand_terms(kModel), synthetic_device(8, 1), cfg, 4, &cache);
  const auto e2 = measure_energy(a, expand_terms(kModel), synthetic_device(8, 1), cfg, 4, &cache);
  EXPECT_EQ(cache.size(), 1u);
  EXPECT_EQ(e1.value, e2.value);
}

TEST(MeasureEnergyTest, DiskCacheRoundTripsExactly) {
  const auto dir = std::filesystem::temp_directory_path() / "mf_energy_cache_test";
  std::filesystem::remove_all(dir);
  const Circuit a = build_alt_ansatz(6, random_params(6, 2, 0.5, 3));
  const auto terms = expand_terms({6, 1.0, 0.7, 0.2, true});
  const DeviceModel d = synthetic_device(6, 5);
  EstimatorConfig cfg;
  cfg.shots_per_term = 256;
  EnergyEstimate first;
  {
    EnergyCache cache(dir);
    first = measure_energy(a, terms, d, cfg, 11, &cache);
  }
  EnergyCache reopened(dir);
  const auto hit = reopened.find(energy_key(a, terms, d, cfg, 11));
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(energy_to_json(*hit), energy_to_json(first));
  ASSERT_EQ(hit->per_term.size(), first.per_term.size());
  for (std::size_t i = 0; i < first.per_term.size(); ++i) {
    EXPECT_EQ(hit->per_term[i].term, first.per_term[i].term);
    EXPECT_EQ(hit->per_term[i].raw_sigma, first.per_term[i].raw_sigma);
  }
  std::filesystem::remove_all(dir);
}

TEST(MeasureEnergyTest, ReadoutOnlyMitigation) {
  const Circuit a = build_alt_ansatz(8, random_params(8, 2, 0.6, 7));
  const auto terms = expand_terms(kModel);
  const double e0 = 0.02, e1 = 0.06;
  const DeviceModel d = DeviceModel::uniform(8, 0.0, 0.0, e0, e1);
  EstimatorConfig cfg;
  cfg.shots_per_term = 8192;
  cfg.rc_instances = 1;
  const EnergyEstimate e = measure_energy(a, terms, d, cfg, 9);
  EXPECT_LT(std::abs(e.mitigated - dense_energy(a, kModel)), 4 * e.mitigated_sigma);
  EXPECT_LT(std::abs(e.raw - biased_energy(a, terms, e0, e1)), 4 * e.raw_sigma);

  // The closed-form inversion is exact for single-qubit terms; ZZ terms use
  // the N=2 midpoint and carry a bias.
  cfg.readout_mode = ReadoutMode::kFormula;
  const EnergyEstimate f = measure_energy(a, terms, d, cfg, 9);
  const oracle::Vec psi = oracle::run(a);
  for (const TermEstimate& t : f.per_term) {
    if (t.term.kind == PauliKind::kZZ) continue;
    const std::string letter = t.term.kind == PauliKind::kX ? "X" : "Z";
    EXPECT_LT(std::abs(t.mitigated - oracle::expectation(psi, 8, {t.term.support[0]}, letter)),
              4 * t.mitigated_sigma);
  }
  cfg.readout_mitigation = false;
  const EnergyEstimate off = measure_energy(a, terms, d, cfg, 9);
  EXPECT_EQ(off.value, off.raw);
}

TEST(MeasureEnergyTest, DepolarizingDamps) {
  const Circuit a = build_alt_ansatz(8, random_params(8, 3, 0.3, 8));
  const auto terms = expand_terms(kModel);
  const double exact = dense_energy(a, kModel);
  ASSERT_LT(exact, -5.0);
  const DeviceModel d = DeviceModel::uniform(8, 0.03, 0.003, 0.0, 0.0);
  EstimatorConfig cfg;
  cfg.shots_per_term = 2048;
  const DampingEstimate c1 = measure_damping(a, terms, d, cfg, exact, 1);
  const DampingEstimate c2 = measure_damping(a, terms, d, cfg, exact, 2);
  EXPECT_GT(c1.c, 0.0);
  EXPECT_LT(c1.c + 4 * c1.sigma, 1.0);
  EXPECT_LT(std::abs(c1.c - c2.c), 4 * std::hypot(c1.sigma, c2.sigma));
  EXPECT_THROW(measure_damping(a, terms, d, cfg, 0.0, 1), DomainError);
}

TEST(MeasureEnergyTest, SigmaScaling) {
  const Circuit a = build_alt_ansatz(4, random_params(4, 1, 1.0, 9));
  const std::vector<PauliTerm> terms{{1.0, PauliKind::kZZ, {1, 2}}};
  const DeviceModel d = DeviceModel::uniform(4, 0.02, 0.002, 0.02, 0.04);
  EstimatorConfig cfg;
  cfg.rc_instances = 2;
  auto spread = [&](std::uint64_t shots) {
    cfg.shots_per_term = shots;
    double s = 0, s2 = 0;
    for (std::uint64_t r = 0; r < 50; ++r) {
      const double v = measure_energy(a, terms, d, cfg, 1000 + r).value;
      s += v;
      s2 += v * v;
    }
    return std::sqrt((s2 - s * s / 50) / 49);
  };
  const double ratio = spread(1024) / spread(4096);
  EXPECT_NEAR(ratio, 2.0, 0.4);
}

// Long trajectories share one error pattern across many shots; the reported
// sigma has to track the resulting spread, not the binomial value.
TEST(MeasureEnergyTest, SigmaTracksTrajectoryCorrelation) {
  const Circuit a = build_alt_ansatz(6, random_params(6, 4, 0.3, 17));
  const std::vector<PauliTerm> terms{{1.0, PauliKind::kZZ, {2, 3}}};
  const DeviceModel d = DeviceModel::uniform(6, 0.03, 0.001, 0.0, 0.0);
  EstimatorConfig cfg;
  cfg.readout_on = false;
  cfg.rc_instances = 2;
  cfg.shots_per_term = 1024;
  cfg.shots_per_trajectory = 64;
  constexpr int kReps = 80;
  double s = 0, s2 = 0, reported = 0, binomial = 0;
  for (int r = 0; r < kReps; ++r) {
    const EnergyEstimate e = measure_energy(a, terms, d, cfg, 500 + r);
    s += e.value;
    s2 += e.value * e.value;
    reported += e.sigma / kReps;
    binomial += std::sqrt((1 - e.value * e.value) / 1024.0) / kReps;
  }
  const double spread = std::sqrt((s2 - s * s / kReps) / (kReps - 1));
  EXPECT_GT(spread, 1.5 * binomial);
  EXPECT_NEAR(reported / spread, 1.0, 0.3);
}

TEST(PoolingTest, MergeThenParityEqualsWeightedParity) {
  std::mt19937_64 rng(5);
  std::vector<ShotTable> parts;
  ShotTable all{{}, 0, {0, 1, 2}};
  for (int p = 0; p < 4; ++p) {
    ShotTable t{{}, 0, {0, 1, 2}};
    for (int k = 0; k < 8; ++k) {
      const std::uint64_t c = rng() % 100;
      if (c == 0) continue;
      std::string key;
      for (int b = 0; b < 3; ++b) key += (k >> b) & 1 ? '1' : '0';
      t.counts[key] = c;
      t.shots += c;
    }
    all.merge(t);
    parts.push_back(t);
  }
  const std::vector<int> support{0, 2};
  double weighted = 0.0;
  for (const auto& t : parts) {
    weighted += parity_expectation(t, support).value * static_cast<double>(t.shots) / static_cast<double>(all.shots);
  }
  EXPECT_NEAR(parity_expectation(all, support).value, weighted, 1e-14);
}

TEST(ZeroThetaTest, ReadoutOnlyBinomial) {
  const IsingParams zz_only{8, 1.0, 0.0, 0.0, true};
  const auto terms = expand_terms(zz_only);
  EstimatorConfig cfg;
  cfg.shots_per_term = 8192;
  cfg.rc_instances = 1;
  const ZeroThetaMeasurement z = measure_zero_theta(8, 2, terms, DeviceModel::uniform(8, 0, 0, 0.05, 0.05), cfg, 3);
  EXPECT_NEAR(z.fidelity_raw.c, 0.9025, 4 * z.fidelity_raw.sigma);
  EXPECT_NEAR(z.fidelity.c, 1.0, 4 * z.fidelity.sigma + 1e-12);
  EXPECT_NEAR(z.ideal_energy, -8.0, 1e-12);
  EXPECT_NEAR(z.register_fidelity.c, 1.0, 4 * z.register_fidelity.sigma + 1e-12);

  const ZeroThetaMeasurement clean = measure_zero_theta(8, 2, terms, DeviceModel::noiseless(8), cfg, 3);
  EXPECT_EQ(clean.fidelity.c, 1.0);
  EXPECT_EQ(clean.register_fidelity.c, 1.0);
}

TEST(ZeroThetaTest, DepolarizingDecreasesWithDepth) {
  const auto terms = expand_terms(kModel);
  const DeviceModel d = DeviceModel::uniform(8, 0.02, 0.002, 0.0, 0.0);
  EstimatorConfig cfg;
  cfg.shots_per_term = 4096;
  double prev = 1.0, prev_sigma = 0.0;
  for (int l : {1, 3, 6}) {
    const ZeroThetaMeasurement z = measure_zero_theta(8, l, terms, d, cfg, 17);
    EXPECT_LT(z.fidelity.c + 3 * std::hypot(z.fidelity.sigma, prev_sigma), prev) << "l=" << l;
    EXPECT_LT(z.register_fidelity.c, z.fidelity.c);
    prev = z.fidelity.c;
    prev_sigma = z.fidelity.sigma;
  }
}

}  // namespace
}  // namespace mf
