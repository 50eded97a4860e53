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

#include "mitiq_forge/readout.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>

#include "mitiq_forge/errors.hpp"
#include "mitiq_forge/util.hpp"

namespace mf {
namespace {

constexpr double kMinInvertible = 1e-6;

MitigatedParity clamp(double value, double sigma) {
  MitigatedParity m{value, sigma, false};
  const double bound = 1.0 + 3.0 * sigma;
  if (value > bound || value < -bound) {
    m.value = std::clamp(value, -bound, bound);
    m.clamped = true;
  }
  return m;
}

std::vector<std::size_t> positions(const ShotTable& s, std::span<const int> support) {
  std::vector<std::size_t> pos;
  for (int q : support) {
    const auto it = std::find(s.measured.begin(), s.measured.end(), q);
    if (it == s.measured.end()) throw SupportError("qubit " + std::to_string(q) + " was not measured");
    pos.push_back(static_cast<std::size_t>(it - s.measured.begin()));
  }
  return pos;
}

// Mean and standard error of a per-shot statistic g(key).
MitigatedParity shot_mean(const ShotTable& s, const std::function<double(const std::string&)>& g) {
  if (s.shots == 0) throw DomainError("empty shot table");
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& [key, k] : s.counts) {
    const double v = g(key);
    sum += static_cast<double>(k) * v;
    sum_sq += static_cast<double>(k) * v * v;
  }
  const double n = static_cast<double>(s.shots);
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean);
  return clamp(mean, std::sqrt(var / n));
}

void check_invertible(const ReadoutRates& r) {
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (1.0 - r.e0[k] - r.e1[k] < kMinInvertible) throw NonInvertibleError("readout map is not invertible");
  }
}

}  // namespace

ReadoutRates ReadoutRates::uniform(int n, double e0, double e1) {
  ReadoutRates r{std::vector<double>(static_cast<std::size_t>(n), e0),
                 std::vector<double>(static_cast<std::size_t>(n), e1)};
  r.validate();
  return r;
}

ReadoutRates ReadoutRates::from_device(const DeviceModel& d, std::span<const int> physical) {
  ReadoutRates r;
  for (int q : physical) {
    r.e0.push_back(d.readout_e0.at(static_cast<std::size_t>(q)));
    r.e1.push_back(d.readout_e1.at(static_cast<std::size_t>(q)));
  }
  return r;
}

void ReadoutRates::validate() const {
  if (e0.size() != e1.size()) throw DomainError("readout rate lists differ in length");
  for (std::size_t k = 0; k < e0.size(); ++k) {
    if (!(e0[k] >= 0 && e0[k] < 0.5 && e1[k] >= 0 && e1[k] < 0.5)) {
      throw DomainError("readout rates must lie in [0, 0.5)");
    }
  }
}

double biased_parity_exact(const Eigen::VectorXd& f, const ReadoutRates& r) {
  r.validate();
  const std::size_t n = r.size();
  if (n > 30 || f.size() != (Eigen::Index(1) << n)) throw DomainError("distribution size must be 2^N");
  if (f.minCoeff() < 0.0 || std::abs(f.sum() - 1.0) > 1e-9) throw DomainError("distribution is not normalized");
  double acc = 0.0;
  for (Eigen::Index x = 0; x < f.size(); ++x) {
    double w = (std::popcount(static_cast<std::uint64_t>(x)) & 1) ? -1.0 : 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      w *= ((x >> k) & 1) ? 1.0 - 2.0 * r.e1[k] : 1.0 - 2.0 * r.e0[k];
    }
    acc += f[x] * w;
  }
  return acc;
}

double biased_parity_N1(double p, const ReadoutRates& r) {
  r.validate();
  if (r.size() != 1) throw DomainError("N1 map needs exactly one qubit of rates");
  return p * (1.0 - r.e0[0] - r.e1[0]) + r.e1[0] - r.e0[0];
}

ParityBounds biased_parity_N2_bounds(double p, double e0, double e1) {
  ReadoutRates::uniform(1, e0, e1);  // validates
  if (e0 > e1) std::swap(e0, e1);
  const double m = 1.0 - e0 - e1, d = e1 - e0;
  return {(1.0 - 2.0 * e1) * (p * m - d), (1.0 - 2.0 * e0) * (p * m + d), p * m * m + d * d};
}

ApproxParity biased_parity_approx(double p, const ReadoutRates& r, int N) {
  r.validate();
  if (N < 1) throw DomainError("N must be >= 1");
  if (r.size() != 1 && r.size() != static_cast<std::size_t>(N)) throw DomainError("rate list length must be 1 or N");
  double factor = 1.0;
  for (int k = 0; k < N; ++k) {
    const std::size_t i = r.size() == 1 ? 0 : static_cast<std::size_t>(k);
    factor *= 1.0 - r.e0[i] - r.e1[i];
  }
  return {p * factor, N >= 3};
}

MitigatedParity mitigate_parity(double p_noisy, double sigma, const ReadoutRates& r, int N) {
  r.validate();
  if (N < 1) throw DomainError("N must be >= 1");
  if (r.size() != 1 && r.size() != static_cast<std::size_t>(N)) throw DomainError("rate list length must be 1 or N");
  double slope = 1.0, offset = 1.0;
  for (int k = 0; k < N; ++k) {
    const std::size_t i = r.size() == 1 ? 0 : static_cast<std::size_t>(k);
    slope *= 1.0 - r.e0[i] - r.e1[i];
    offset *= r.e1[i] - r.e0[i];
  }
  if (std::abs(slope) < kMinInvertible) throw NonInvertibleError("readout map is not invertible");
  if (N >= 3) offset = 0.0;
  const double scaled_sigma = sigma / slope;
  return clamp((p_noisy - offset) / slope, scaled_sigma);
}

MitigatedParity mitigate_parity_tensored(const ShotTable& s, std::span<const int> support,
                                         const ReadoutRates& r) {
  r.validate();
  if (r.size() != support.size()) throw DomainError("one rate pair per support qubit is required");
  check_invertible(r);
  const std::vector<std::size_t> pos = positions(s, support);
  return shot_mean(s, [&](const std::string& key) {
    double v = 1.0;
    for (std::size_t k = 0; k < pos.size(); ++k) {
      const double spin = key[pos[k]] == '1' ? -1.0 : 1.0;
      v *= (spin - (r.e1[k] - r.e0[k])) / (1.0 - r.e0[k] - r.e1[k]);
    }
    return v;
  });
}

MitigatedParity mitigate_zero_probability(const ShotTable& s, const ReadoutRates& r) {
  r.validate();
  if (r.size() != s.measured.size()) throw DomainError("one rate pair per measured qubit is required");
  check_invertible(r);
  return shot_mean(s, [&](const std::string& key) {
    double v = 1.0;
    for (std::size_t k = 0; k < key.size(); ++k) {
      const double spin = key[k] == '1' ? -1.0 : 1.0;
      v *= 0.5 * (1.0 + (spin - (r.e1[k] - r.e0[k])) / (1.0 - r.e0[k] - r.e1[k]));
    }
    return v;
  });
}

Eigen::VectorXd random_distribution_with_parity(int N, double p, std::uint64_t seed) {
  if (N < 1 || N > 24) throw DomainError("N must be in [1, 24]");
  if (!(std::abs(p) <= 1.0)) throw DomainError("parity must lie in [-1, 1]");
  const Eigen::Index dim = Eigen::Index(1) << N;
  Eigen::VectorXd f(dim);
  double even = 0.0, odd = 0.0;
  std::uint64_t state = seed;
  for (Eigen::Index x = 0; x < dim; ++x) {
    // Exponential draws normalized per class give flat-Dirichlet weights.
    state = mix64(state + 0x9e3779b97f4a7c15ULL);
    f[x] = -std::log1p(-unit_uniform(state));
    (std::popcount(static_cast<std::uint64_t>(x)) & 1 ? odd : even) += f[x];
  }
  for (Eigen::Index x = 0; x < dim; ++x) {
    const bool is_odd = std::popcount(static_cast<std::uint64_t>(x)) & 1;
    f[x] *= is_odd ? (1.0 - p) / 2.0 / odd : (1.0 + p) / 2.0 / even;
  }
  return f;
}

ReadoutStudy readout_study(std::span<const int> sizes, int count, double e0, double e1, std::uint64_t seed) {
  if (count < 2) throw DomainError("readout study needs at least two points per size");
  ReadoutStudy out;
  out.e0 = e0;
  out.e1 = e1;
  const ReadoutRates one = ReadoutRates::uniform(1, e0, e1);
  for (int N : sizes) {
    const ReadoutRates rates = ReadoutRates::uniform(N, e0, e1);
    ReadoutStudySummary sum;
    sum.N = N;
    double acc = 0.0;
    for (int i = 0; i < count; ++i) {
      ReadoutStudyPoint pt;
      pt.N = N;
      pt.p = -1.0 + 2.0 * i / (count - 1);
      const Eigen::VectorXd f = random_distribution_with_parity(
          N, pt.p, derive_seed(seed, {static_cast<std::uint64_t>(N), static_cast<std::uint64_t>(i)}));
      pt.p_tilde = biased_parity_exact(f, rates);
      if (N == 1) {
        pt.model = biased_parity_N1(pt.p, one);
      } else if (N == 2) {
        pt.bounds = biased_parity_N2_bounds(pt.p, e0, e1);
        pt.model = pt.bounds->mid;
        pt.within_bounds = pt.p_tilde >= pt.bounds->lo - 1e-12 && pt.p_tilde <= pt.bounds->hi + 1e-12;
        if (!pt.within_bounds) ++sum.bound_violations;
      } else {
        pt.model = biased_parity_approx(pt.p, one, N).value;
      }
      pt.residual = pt.p_tilde - pt.model;
      acc += pt.residual * pt.residual;
      sum.max_abs_residual = std::max(sum.max_abs_residual, std::abs(pt.residual));
      out.points.push_back(std::move(pt));
    }
    sum.rms_residual = std::sqrt(acc / count);
    out.summary.push_back(sum);
  }
  return out;
}

}  // namespace mf
