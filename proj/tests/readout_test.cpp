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

#include <bit>
#include <random>

#include "mitiq_forge/errors.hpp"
#include "mitiq_forge/readout.hpp"

namespace mf {
namespace {

Eigen::VectorXd random_distribution(int n, std::mt19937_64& rng) {
  std::exponential_distribution<double> ex(1.0);
  Eigen::VectorXd f(Eigen::Index(1) << n);
  for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = ex(rng);
  return f / f.sum();
}

double parity(const Eigen::VectorXd& f) {
  double p = 0.0;
  for (Eigen::Index x = 0; x < f.size(); ++x) p += (std::popcount(static_cast<std::uint64_t>(x)) & 1) ? -f[x] : f[x];
  return p;
}

// Observed distribution: g(y) = sum_x f(x) prod_k P(y_k | x_k).
Eigen::VectorXd confusion_propagate(const Eigen::VectorXd& f, const ReadoutRates& r) {
  const auto n = static_cast<int>(r.size());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(f.size());
  for (Eigen::Index x = 0; x < f.size(); ++x) {
    for (Eigen::Index y = 0; y < f.size(); ++y) {
      double p = 1.0;
      for (int k = 0; k < n; ++k) {
        const bool xk = (x >> k) & 1, yk = (y >> k) & 1;
        const double flip = xk ? r.e1[static_cast<std::size_t>(k)] : r.e0[static_cast<std::size_t>(k)];
        p *= xk == yk ? 1.0 - flip : flip;
      }
      g[y] += f[x] * p;
    }
  }
  return g;
}

TEST(ReadoutTest, ExactMatchesConfusionMatrix) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> rate(0.0, 0.3);
  for (int n = 1; n <= 4; ++n) {
    for (int trial = 0; trial < 200; ++trial) {
      ReadoutRates r;
      for (int k = 0; k < n; ++k) {
        r.e0.push_back(rate(rng));
        r.e1.push_back(rate(rng));
      }
      const Eigen::VectorXd f = random_distribution(n, rng);
      EXPECT_NEAR(biased_parity_exact(f, r), parity(confusion_propagate(f, r)), 1e-12);
    }
  }
}

TEST(ReadoutTest, ExactSpecialCases) {
  std::mt19937_64 rng(2);
  const Eigen::VectorXd f = random_distribution(3, rng);
  EXPECT_NEAR(biased_parity_exact(f, ReadoutRates::uniform(3, 0.07, 0.07)), parity(f) * std::pow(0.86, 3), 1e-14);
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(8);
  delta[0] = 1.0;
  const ReadoutRates r{{0.01, 0.02, 0.03}, {0.2, 0.2, 0.2}};
  EXPECT_NEAR(biased_parity_exact(delta, r), 0.98 * 0.96 * 0.94, 1e-15);
  EXPECT_THROW(biased_parity_exact(2 * delta, r), DomainError);
  EXPECT_THROW(biased_parity_exact(Eigen::VectorXd::Ones(4) / 4, r), DomainError);
}

TEST(ReadoutTest, ExactMatchesMonteCarlo) {
  std::mt19937_64 rng(3);
  const Eigen::VectorXd f = random_distribution(3, rng);
  const ReadoutRates r{{0.05, 0.02, 0.08}, {0.1, 0.15, 0.04}};
  std::discrete_distribution<int> pick(f.data(), f.data() + f.size());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int samples = 1000000;
  long long sum = 0;
  for (int s = 0; s < samples; ++s) {
    int x = pick(rng);
    for (int k = 0; k < 3; ++k) {
      const bool one = (x >> k) & 1;
      if (u(rng) < (one ? r.e1[static_cast<std::size_t>(k)] : r.e0[static_cast<std::size_t>(k)])) x ^= 1 << k;
    }
    sum += (std::popcount(static_cast<unsigned>(x)) & 1) ? -1 : 1;
  }
  const double mc = static_cast<double>(sum) / samples;
  const double exact = biased_parity_exact(f, r);
  EXPECT_NEAR(mc, exact, 4 * std::sqrt((1 - exact * exact) / samples));
}

TEST(ReadoutTest, SingleQubitMap) {
  const ReadoutRates r = ReadoutRates::uniform(1, 0.05, 0.1);
  // p = 1: read 0 with probability 0.95, 1 with 0.05.
  EXPECT_NEAR(biased_parity_N1(1.0, r), 0.95 - 0.05, 1e-15);
  EXPECT_NEAR(biased_parity_N1(0.3, ReadoutRates::uniform(1, 0.1, 0.1)), 0.3 * 0.8, 1e-15);
  for (double a : {0.0, 0.2, 0.5, 0.9, 1.0}) {
    Eigen::VectorXd f(2);
    f << a, 1 - a;
    EXPECT_NEAR(biased_parity_N1(parity(f), r), biased_parity_exact(f, r), 1e-15);
  }
  EXPECT_THROW(biased_parity_N1(0.0, ReadoutRates::uniform(2, 0.0, 0.0)), DomainError);
}

TEST(ReadoutTest, TwoQubitBounds) {
  const ParityBounds same = biased_parity_N2_bounds(0.4, 0.07, 0.07);
  EXPECT_NEAR(same.lo, 0.4 * 0.86 * 0.86, 1e-15);
  EXPECT_NEAR(same.hi, same.lo, 1e-15);
  EXPECT_NEAR(same.mid, same.lo, 1e-15);
  EXPECT_NEAR(biased_parity_N2_bounds(0.0, 0.05, 0.1).mid, 0.0025, 1e-15);
  const ParityBounds a = biased_parity_N2_bounds(0.3, 0.05, 0.1), b = biased_parity_N2_bounds(0.3, 0.1, 0.05);
  EXPECT_EQ(a.lo, b.lo);
  EXPECT_EQ(a.hi, b.hi);

  std::mt19937_64 rng(4);
  const ReadoutRates r = ReadoutRates::uniform(2, 0.05, 0.1);
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::VectorXd f = random_distribution(2, rng);
    const ParityBounds bd = biased_parity_N2_bounds(parity(f), 0.05, 0.1);
    const double e = biased_parity_exact(f, r);
    EXPECT_LE(bd.lo, e + 1e-15);
    EXPECT_GE(bd.hi, e - 1e-15);
  }
}

TEST(ReadoutTest, ExtremalDistributionsAttainBounds) {
  const ReadoutRates r = ReadoutRates::uniform(2, 0.05, 0.1);
  for (double p : {-1.0, -0.4, 0.0, 0.3, 1.0}) {
    // Support on one-count 0 and 1 gives the upper bound; on 1 and 2 the lower.
    Eigen::VectorXd hi(4), lo(4);
    hi << (1 + p) / 2, (1 - p) / 4, (1 - p) / 4, 0;
    lo << 0, (1 - p) / 2, 0, (1 + p) / 2;
    const ParityBounds bd = biased_parity_N2_bounds(p, 0.05, 0.1);
    EXPECT_NEAR(biased_parity_exact(hi, r), bd.hi, 1e-12);
    EXPECT_NEAR(biased_parity_exact(lo, r), bd.lo, 1e-12);
  }
}

TEST(ReadoutTest, ApproximationImprovesWithN) {
  std::mt19937_64 rng(5);
  auto rms = [&](int n) {
    const ReadoutRates r = ReadoutRates::uniform(n, 0.05, 0.1);
    double acc = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
      const Eigen::VectorXd f = random_distribution(n, rng);
      const double d = biased_parity_exact(f, r) - biased_parity_approx(parity(f), ReadoutRates::uniform(1, 0.05, 0.1), n).value;
      acc += d * d;
    }
    return std::sqrt(acc / 300);
  };
  const double r3 = rms(3), r10 = rms(10);
  EXPECT_LT(r10, r3);
  EXPECT_EQ(biased_parity_approx(0.0, ReadoutRates::uniform(1, 0.05, 0.1), 5).value, 0.0);
  EXPECT_EQ(biased_parity_approx(0.7, ReadoutRates::uniform(1, 0.0, 0.0), 5).value, 0.7);
  EXPECT_FALSE(biased_parity_approx(0.7, ReadoutRates::uniform(1, 0.0, 0.0), 2).in_regime);
  EXPECT_TRUE(biased_parity_approx(0.7, ReadoutRates::uniform(1, 0.0, 0.0), 3).in_regime);
}

TEST(ReadoutTest, OffsetShrinksWithN) {
  // Offset at p = 0 under uniform rates, from the exact map with f uniform
  // over strings of even and odd parity.
  double previous = 1.0;
  for (int n = 1; n <= 5; ++n) {
    const ReadoutRates r = ReadoutRates::uniform(n, 0.05, 0.1);
    Eigen::VectorXd f = Eigen::VectorXd::Constant(Eigen::Index(1) << n, 1.0 / static_cast<double>(1 << n));
    const double offset = std::abs(biased_parity_exact(f, r));
    EXPECT_LT(offset, previous);
    previous = offset;
  }
}

TEST(MitigateTest, InvertsForwardMaps) {
  const ReadoutRates r = ReadoutRates::uniform(1, 0.05, 0.1);
  for (double p : {-1.0, -0.3, 0.0, 0.6, 1.0}) {
    EXPECT_NEAR(mitigate_parity(biased_parity_N1(p, r), 0.0, r, 1).value, p, 1e-12);
    EXPECT_NEAR(mitigate_parity(biased_parity_N2_bounds(p, 0.05, 0.1).mid, 0.0, r, 2).value, p, 1e-12);
    EXPECT_NEAR(mitigate_parity(biased_parity_approx(p, r, 4).value, 0.0, r, 4).value, p, 1e-12);
  }
  const auto id = mitigate_parity(0.42, 0.01, ReadoutRates::uniform(1, 0.0, 0.0), 2);
  EXPECT_EQ(id.value, 0.42);
  EXPECT_EQ(id.sigma, 0.01);
  const auto scaled = mitigate_parity(0.5, 0.01, r, 3);
  EXPECT_NEAR(scaled.sigma, 0.01 / std::pow(0.85, 3), 1e-15);
  const auto big = mitigate_parity(0.99, 0.001, ReadoutRates::uniform(1, 0.2, 0.2), 1);
  EXPECT_TRUE(big.clamped);
  EXPECT_NEAR(big.value, 1.0 + 3 * 0.001 / 0.6, 1e-12);
  EXPECT_THROW(mitigate_parity(0.5, 0.0, ReadoutRates::uniform(1, 0.4999999, 0.4999999), 1), NonInvertibleError);
}

TEST(MitigateTest, TensoredRecoversAllZeros) {
  const DeviceModel d = DeviceModel::uniform(4, 0.0, 0.0, 0.05, 0.1);
  const Circuit c(2, {}, {0, 1});
  NoiseConfig nc;
  nc.device = d;
  nc.assignment = QubitAssignment::identity(4);
  nc.labels = {0, 1};
  nc.seed = 5;
  const ShotTable s = sample_noisy(c, nc, 1000000);
  const std::vector<int> sup = {0, 1};
  const ReadoutRates r = ReadoutRates::uniform(2, 0.05, 0.1);
  const auto m = mitigate_parity_tensored(s, sup, r);
  EXPECT_NEAR(m.value, 1.0, 4 * m.sigma);
  const auto p0 = mitigate_zero_probability(s, r);
  EXPECT_NEAR(p0.value, 1.0, 4 * p0.sigma);
  // The midpoint map drops the (1 - e0 - e1)(e1 - e0)(<Z0> + <Z1>) cross
  // term, overshoots past +1 here and is caught by the clamp.
  const auto raw = parity_expectation(s, sup);
  EXPECT_NEAR(raw.value, 0.85 * 0.85 + 2 * 0.85 * 0.05 + 0.05 * 0.05, 4 * raw.sigma);
  const auto mid = mitigate_parity(raw.value, raw.sigma, r, 2);
  EXPECT_TRUE(mid.clamped);
}

TEST(MitigateTest, TensoredIsUnbiasedForMixedStates) {
  // Exact expectation of the per-shot estimator under the confusion channel.
  std::mt19937_64 rng(6);
  const ReadoutRates r{{0.03, 0.07}, {0.12, 0.05}};
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd f = random_distribution(2, rng);
    const Eigen::VectorXd g = confusion_propagate(f, r);
    ShotTable s{{}, 0, {0, 1}};
    const char* keys[4] = {"00", "10", "01", "11"};
    const std::uint64_t scale = 1ull << 40;
    for (int y = 0; y < 4; ++y) {
      const auto k = static_cast<std::uint64_t>(std::llround(g[y] * static_cast<double>(scale)));
      s.counts[keys[y]] = k;
      s.shots += k;
    }
    const std::vector<int> sup = {0, 1};
    EXPECT_NEAR(mitigate_parity_tensored(s, sup, r).value, parity(f), 1e-9);
    EXPECT_NEAR(mitigate_zero_probability(s, r).value, f[0], 1e-9);
  }
}

TEST(ReadoutStudyTest, DistributionsHitTheRequestedParity) {
  for (double p : {-1.0, -0.25, 0.0, 0.6, 1.0}) {
    const Eigen::VectorXd f = random_distribution_with_parity(5, p, 77);
    EXPECT_NEAR(f.sum(), 1.0, 1e-12);
    EXPECT_GE(f.minCoeff(), 0.0);
    EXPECT_NEAR(parity(f), p, 1e-12);
  }
  EXPECT_THROW(random_distribution_with_parity(3, 1.5, 1), DomainError);
}

TEST(ReadoutStudyTest, ResidualPattern) {
  const std::vector<int> sizes{1, 2, 3, 10};
  const ReadoutStudy s = readout_study(sizes, 41, 0.05, 0.1, 3);
  ASSERT_EQ(s.summary.size(), 4u);
  EXPECT_LT(s.summary[0].max_abs_residual, 1e-15);  // N1 is exact up to rounding
  EXPECT_EQ(s.summary[1].bound_violations, 0);
  EXPECT_LT(s.summary[3].rms_residual, s.summary[2].rms_residual);
  for (const auto& pt : s.points) {
    if (pt.N == 2) {
      ASSERT_TRUE(pt.bounds.has_value());
      EXPECT_TRUE(pt.within_bounds);
    }
  }
}

}  // namespace
}  // namespace mf
