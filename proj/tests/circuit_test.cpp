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

#include <random>
#include <set>

#include "mitiq_forge/circuit.hpp"
#include "mitiq_forge/errors.hpp"
#include "oracle.hpp"

namespace mf {
namespace {

AnsatzParams random_params(int n, int layers, bool symmetric, std::mt19937_64& rng) {
  AnsatzParams p = AnsatzParams::zeros(n, layers, symmetric);
  std::uniform_real_distribution<double> u(-oracle::kPi, oracle::kPi);
  for (Eigen::Index i = 0; i < p.values.size(); ++i) p.values[i] = u(rng);
  return p;
}

TEST(AnsatzTest, GateCounts) {
  const Circuit full = build_alt_ansatz(20, AnsatzParams::zeros(20, 6, false));
  EXPECT_EQ(full.count(GateKind::kRy), 140u);
  EXPECT_EQ(full.count(GateKind::kCnot), 60u);
  const AnsatzParams sym = AnsatzParams::zeros(20, 6, true);
  EXPECT_EQ(sym.values.size(), 14);
  EXPECT_EQ(build_alt_ansatz(20, sym).count(GateKind::kRy), 140u);
  EXPECT_EQ(full.measured().size(), 20u);
}

TEST(AnsatzTest, LayerPairs) {
  const Circuit c = build_alt_ansatz(6, AnsatzParams::zeros(6, 2, true));
  std::vector<std::pair<int, int>> pairs;
  for (const Gate& g : c.gates())
    if (g.is_cnot()) pairs.emplace_back(g.qubit, g.target);
  const std::vector<std::pair<int, int>> expected = {{0, 1}, {2, 3}, {4, 5},
                                                     {1, 2}, {3, 4}, {5, 0}};
  EXPECT_EQ(pairs, expected);
  EXPECT_TRUE(is_loop_local(c));
}

TEST(AnsatzTest, TrivialLayerZero) {
  AnsatzParams p{0, Eigen::VectorXd::Zero(2), true};
  const Circuit c = build_alt_ansatz(2, p);
  ASSERT_EQ(c.gates().size(), 2u);
  EXPECT_EQ(c.gates()[0], Gate::ry(0, 0.0));
  EXPECT_EQ(c.gates()[1], Gate::ry(1, 0.0));
  const oracle::Vec psi = oracle::run(c);
  EXPECT_NEAR(std::abs(psi[0]), 1.0, 1e-15);
}

TEST(AnsatzTest, Errors) {
  EXPECT_THROW(build_alt_ansatz(5, AnsatzParams::zeros(5, 1, true)), TopologyError);
  AnsatzParams bad{1, Eigen::VectorXd::Zero(3), true};
  EXPECT_THROW(build_alt_ansatz(4, bad), ShapeError);
  EXPECT_THROW(expand_symmetric(AnsatzParams::zeros(4, 1, false), 4), PreconditionError);
}

TEST(AnsatzTest, ExpandSymmetric) {
  AnsatzParams p{0, Eigen::Vector2d(0.3, -0.7), true};
  const AnsatzParams f = expand_symmetric(p, 4);
  EXPECT_FALSE(f.symmetric);
  EXPECT_EQ(f.values, Eigen::Vector4d(0.3, -0.7, 0.3, -0.7));

  AnsatzParams q{1, Eigen::Vector4d(1, 2, 3, 4), true};
  Eigen::VectorXd expected(12);
  expected << 1, 2, 1, 2, 1, 2, 3, 4, 3, 4, 3, 4;
  EXPECT_EQ(expand_symmetric(q, 6).values, expected);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const AnsatzParams s = random_params(6, 2, true, rng);
    const Circuit a = build_alt_ansatz(6, s);
    const Circuit b = build_alt_ansatz(6, expand_symmetric(s, 6));
    EXPECT_EQ(a, b);
    EXPECT_NEAR((oracle::run(a) - oracle::run(b)).norm(), 0.0, 1e-15);
  }
}

TEST(DecomposeTest, RyIdentityAtZero) {
  const Circuit c = decompose_to_basis(Circuit(1, {Gate::ry(0, 0.0)}));
  ASSERT_EQ(c.gates().size(), 4u);
  EXPECT_EQ(c.count(GateKind::kSx), 2u);
  EXPECT_EQ(c.count(GateKind::kRz), 2u);
  EXPECT_LT(oracle::phase_distance(oracle::dense_unitary(c), oracle::Mat::Identity(2, 2)), 1e-12);
}

TEST(DecomposeTest, RandomRyAngles) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-4 * oracle::kPi, 4 * oracle::kPi);
  for (int trial = 0; trial < 100; ++trial) {
    const double t = trial == 0 ? oracle::kPi / 2 : u(rng);
    const Circuit c = decompose_to_basis(Circuit(1, {Gate::ry(0, t)}));
    for (const Gate& g : c.gates()) EXPECT_TRUE(g.kind == GateKind::kRz || g.kind == GateKind::kSx);
    EXPECT_LT(oracle::phase_distance(oracle::dense_unitary(c), oracle::rotation('Y', t)), 1e-12);
  }
}

TEST(DecomposeTest, MergedHadamard) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-oracle::kPi, oracle::kPi);
  for (int trial = 0; trial < 100; ++trial) {
    const double t = trial == 0 ? 0.0 : trial == 1 ? oracle::kPi / 3 : trial == 2 ? oracle::kPi : u(rng);
    const Circuit c = decompose_to_basis(Circuit(1, {Gate::ry(0, t), Gate::h(0)}));
    EXPECT_EQ(c.gates().size(), 5u);
    const oracle::Mat expected = oracle::hadamard() * oracle::rotation('Y', t);
    EXPECT_LT(oracle::phase_distance(oracle::dense_unitary(c), expected), 1e-12);
  }
}

TEST(DecomposeTest, TwoQubitCircuitEquivalence) {
  std::mt19937_64 rng(13);
  const Circuit c(2, {Gate::ry(0, 0.4), Gate::ry(1, -1.1), Gate::cnot(0, 1), Gate::ry(0, 2.0),
                      Gate::ry(1, 0.2), Gate::h(1)});
  const Circuit d = decompose_to_basis(c);
  EXPECT_LT(oracle::phase_distance(oracle::dense_unitary(d), oracle::dense_unitary(c)), 1e-12);
}

TEST(DecomposeTest, StandaloneHadamardFails) {
  const Circuit c(2, {Gate::ry(0, 0.1), Gate::cnot(0, 1), Gate::h(1)});
  try {
    decompose_to_basis(c);
    FAIL() << "expected DecompositionError";
  } catch (const DecompositionError& e) {
    EXPECT_EQ(e.gate_index(), 2u);
  }
  // An RY followed by a CNOT on the same qubit does not merge with a later H.
  const Circuit d(2, {Gate::ry(1, 0.1), Gate::cnot(0, 1), Gate::h(1)});
  EXPECT_THROW(decompose_to_basis(d), DecompositionError);
}

TEST(LightConeTest, RandomCasesMatchUnfiltered) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 * std::uniform_int_distribution<int>(2, 5)(rng);
    const int l = std::uniform_int_distribution<int>(0, 3)(rng);
    const AnsatzParams p = random_params(n, l, trial % 2 == 0, rng);
    const Circuit c = build_alt_ansatz(n, p);
    const oracle::Vec psi = oracle::run(c);
    for (int i = 0; i < n; ++i) {
      const std::vector<std::vector<int>> supports = {{i}, {i, (i + 1) % n}};
      for (const auto& sup : supports) {
        const FilteredCircuit f = light_cone_slice(c, sup);
        const int m = static_cast<int>(sup.size());
        EXPECT_LE(f.circuit.n_qubits(), std::min(m + 2 * l, n));
        const oracle::Vec phi = oracle::run(f.circuit);
        const std::string letters(sup.size(), 'Z');
        const double full = oracle::expectation(psi, n, sup, letters);
        const double cut = oracle::expectation(phi, f.circuit.n_qubits(), f.circuit.measured(), letters);
        EXPECT_NEAR(full, cut, 1e-12);
        for (std::size_t k = 0; k < sup.size(); ++k)
          EXPECT_EQ(f.labels[static_cast<std::size_t>(f.circuit.measured()[k])], sup[k]);
      }
    }
  }
}

TEST(LightConeTest, WidthBoundIsAttained) {
  // The pair coupled by the final CNOT layer sees two fewer qubits than the
  // misaligned pair, which reaches the full m + 2l.
  const Circuit c = build_alt_ansatz(20, AnsatzParams::zeros(20, 3, true));
  const std::vector<int> aligned = {0, 1}, misaligned = {1, 2};
  EXPECT_EQ(light_cone_filter(c, aligned).n_qubits(), 6);
  EXPECT_EQ(light_cone_filter(c, misaligned).n_qubits(), 8);
  const std::vector<int> single = {3};
  EXPECT_EQ(light_cone_filter(c, single).n_qubits(), 6);
}

TEST(LightConeTest, WideConeKeepsEverything) {
  const Circuit c = build_alt_ansatz(36, AnsatzParams::zeros(36, 17, true));
  const std::vector<int> sup = {1, 2};
  const Circuit f = light_cone_filter(c, sup);
  EXPECT_EQ(f.n_qubits(), 36);
  // Only the first RY layer lies fully inside the cone.
  EXPECT_LT(f.gates().size(), c.gates().size());
  EXPECT_EQ(f.count(GateKind::kCnot) > 0, true);
}

TEST(LightConeTest, DepthZeroSingleQubit) {
  const Circuit c = build_alt_ansatz(8, AnsatzParams::zeros(8, 0, true));
  const std::vector<int> sup = {5};
  const Circuit f = light_cone_filter(c, sup);
  EXPECT_EQ(f.n_qubits(), 1);
  ASSERT_EQ(f.gates().size(), 1u);
  EXPECT_EQ(f.gates()[0].kind, GateKind::kRy);
  EXPECT_EQ(f.measured(), std::vector<int>{0});
}

TEST(FoldTest, ScaleOneUnchanged) {
  const Circuit c = build_alt_ansatz(8, AnsatzParams::zeros(8, 10, true));
  EXPECT_EQ(fold_cnots(c, 1.0, 3), c);
  EXPECT_THROW(fold_cnots(c, 0.5, 3), DomainError);
}

TEST(FoldTest, OddScalesPreserveState) {
  std::mt19937_64 rng(31);
  const Circuit c = build_alt_ansatz(8, random_params(8, 10, true, rng));
  ASSERT_EQ(c.count(GateKind::kCnot), 40u);
  for (double scale : {3.0, 5.0}) {
    const Circuit f = fold_cnots(c, scale, 9);
    EXPECT_EQ(f.count(GateKind::kCnot), static_cast<std::size_t>(40 * scale));
    const auto a = oracle::run(c), b = oracle::run(f);
    EXPECT_NEAR(std::abs(a.dot(b)), 1.0, 1e-10);
  }
}

TEST(FoldTest, FractionalScaleHitsExpectedCount) {
  std::mt19937_64 rng(32);
  const Circuit c = build_alt_ansatz(8, random_params(8, 10, true, rng));
  double total = 0.0;
  const int reps = 400;
  for (int s = 0; s < reps; ++s) {
    const Circuit f = fold_cnots(c, 2.0, static_cast<std::uint64_t>(s));
    const std::size_t k = f.count(GateKind::kCnot);
    EXPECT_GE(k, 40u);
    EXPECT_LE(k, 120u);
    total += static_cast<double>(k);
  }
  // Each CNOT contributes 1 or 3 with probability 1/2: sd per draw = sqrt(40).
  EXPECT_NEAR(total / reps, 80.0, 4 * std::sqrt(40.0 / reps));
  const Circuit f = fold_cnots(c, 2.0, 77);
  EXPECT_EQ(f, fold_cnots(c, 2.0, 77));
  EXPECT_NEAR(std::abs(oracle::run(c).dot(oracle::run(f))), 1.0, 1e-10);
}

TEST(RandomizedCompileTest, AllDressingsAreIdentities) {
  const std::string letters = "IXYZ";
  const oracle::Mat cx = oracle::dense_gate(2, Gate::cnot(0, 1));
  for (char a : letters) {
    for (char b : letters) {
      const CnotDressing d = dress_cnot(a, b);
      const oracle::Mat before = oracle::kron(oracle::pauli(d.before_target), oracle::pauli(d.before_control));
      const oracle::Mat after = oracle::kron(oracle::pauli(d.after_target), oracle::pauli(d.after_control));
      EXPECT_LT(oracle::phase_distance(after * cx * before, cx), 1e-12) << a << b;
    }
  }
  const CnotDressing x = dress_cnot('X', 'I');
  EXPECT_EQ(x.after_control, 'X');
  EXPECT_EQ(x.after_target, 'X');
  const CnotDressing none = dress_cnot('I', 'I');
  EXPECT_EQ(none.after_control, 'I');
  EXPECT_EQ(none.after_target, 'I');
}

TEST(RandomizedCompileTest, StateUnchanged) {
  std::mt19937_64 rng(41);
  const Circuit c = build_alt_ansatz(6, random_params(6, 3, false, rng));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Circuit r = randomized_compile(c, seed);
    EXPECT_EQ(r.count(GateKind::kCnot), c.count(GateKind::kCnot));
    EXPECT_GT(r.gates().size(), c.gates().size());
    EXPECT_NEAR(std::abs(oracle::run(c).dot(oracle::run(r))), 1.0, 1e-10);
  }
  EXPECT_EQ(randomized_compile(c, 4), randomized_compile(c, 4));
}

TEST(AssignmentTest, Enumeration) {
  EXPECT_EQ(enumerate_assignments(3).size(), 6u);
  EXPECT_THROW(enumerate_assignments(2), TopologyError);
  const auto all = enumerate_assignments(20);
  ASSERT_EQ(all.size(), 40u);
  std::set<std::vector<int>> distinct;
  for (const auto& a : all) {
    distinct.insert(a.mapping);
    for (int i = 0; i < 20; ++i) {
      const int d = std::abs(a.mapping[static_cast<std::size_t>(i)] -
                             a.mapping[static_cast<std::size_t>((i + 1) % 20)]);
      EXPECT_TRUE(d == 1 || d == 19);
    }
  }
  EXPECT_EQ(distinct.size(), 40u);
  EXPECT_EQ(QubitAssignment::make(4, 0, true).mapping, (std::vector<int>{0, 3, 2, 1}));
  EXPECT_FALSE(all[0].reflected);
  EXPECT_TRUE(all[1].reflected);
  EXPECT_EQ(all[2].rotation, 1);
}

TEST(TextFormatTest, RoundTrip) {
  std::mt19937_64 rng(51);
  const Circuit c = randomized_compile(
      decompose_to_basis(build_alt_ansatz(6, random_params(6, 2, false, rng))), 3);
  const std::string text = to_text(c);
  EXPECT_EQ(parse_circuit(text), c);
  EXPECT_EQ(text.rfind("qubits 6; measured 0,1,2,3,4,5\n", 0), 0u);
  const Circuit h = parse_circuit("qubits 2; measured 1\n# basis change\nRY 1 0.5\nH 1\n");
  EXPECT_EQ(h.gates().size(), 2u);
  EXPECT_EQ(h.measured(), std::vector<int>{1});
  EXPECT_THROW(parse_circuit("qubits 2; measured 0\nFOO 1\n"), Error);
}

}  // namespace
}  // namespace mf
