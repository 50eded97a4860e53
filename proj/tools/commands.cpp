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

#include "commands.hpp"

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <sstream>

#include "mitiq_forge/benchmark.hpp"
#include "mitiq_forge/circuit.hpp"
#include "mitiq_forge/hamiltonian.hpp"
#include "mitiq_forge/readout.hpp"
#include "mitiq_forge/util.hpp"
#include "mitiq_forge/vqe.hpp"

namespace mf::cli {
namespace {

using ojson = nlohmann::ordered_json;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

// Common report envelope. `seed` is a number, or a list for benchmarks.
ojson envelope(const std::string& command, const LoadedConfig& c, const ojson& seed, ojson result) {
  ojson j;
  j["tool"] = "mitiq-forge";
  j["versions"] = {{"mitiq_forge", std::string(kVersion)},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                 "." + std::to_string(EIGEN_MINOR_VERSION)}};
  j["command"] = command;
  j["seed"] = seed;
  j["config_digest"] = digest(c.digest + "|seed=" + seed.dump());
  j["result"] = std::move(result);
  return j;
}

void emit(const RunOptions& o, Written& written, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(o.out);
  write_file_atomic(o.out / name, text);
  written.push_back(name);
}

std::uint64_t effective_seed(const LoadedConfig& c, const RunOptions& o) {
  return o.seed ? *o.seed : config_seed(c);
}

// Approximation column: value and relative error, or null with the reason.
ojson approximation(const std::function<double()>& f, double exact) {
  try {
    const double v = f();
    return {{"energy", v}, {"rel_error", std::abs(v - exact) / std::abs(exact)}};
  } catch (const Error& e) {
    return {{"energy", nullptr}, {"reason", e.what()}};
  }
}

std::string csv_cell(const ojson& approx) {
  return approx["energy"].is_null() ? "" : fmt(approx["energy"].get<double>());
}

}  // namespace

Written cmd_ground_state(const LoadedConfig& c, const RunOptions& o) {
  const GroundStateConfig g = parse_ground_state(c);
  const std::uint64_t seed = effective_seed(c, o);
  ojson rows = ojson::array();
  std::ostringstream csv;
  csv << "h_x,exact_ground,exact_first_excited,small_hx,large_hx,small_hz\n";
  for (double hx : g.h_x) {
    IsingParams p = g.model;
    p.h_x = hx;
    const SpectrumResult s = exact_spectrum(p, false);
    ojson row;
    row["h_x"] = hx;
    row["exact"] = {{"ground", s.ground_energy},
                    {"first_excited", s.first_excited_energy},
                    {"degenerate", s.degenerate},
                    {"residual", s.residual},
                    {"matvecs", s.matvecs}};
    row["small_hx"] = approximation([&] { return perturbative_energy_small_hx(p); }, s.ground_energy);
    row["large_hx"] = approximation([&] { return perturbative_energy_large_hx(p); }, s.ground_energy);
    if (!g.small_hz) {
      row["small_hz"] = {{"energy", nullptr}, {"reason", "disabled"}};
    } else if (p.n > 14) {
      row["small_hz"] = {{"energy", nullptr}, {"reason", "requires n <= 14"}};
    } else {
      row["small_hz"] = approximation([&] { return perturbative_energy_small_hz(p); }, s.ground_energy);
    }
    csv << fmt(hx) << ',' << fmt(s.ground_energy) << ',' << fmt(s.first_excited_energy) << ','
        << csv_cell(row["small_hx"]) << ',' << csv_cell(row["large_hx"]) << ',' << csv_cell(row["small_hz"])
        << '\n';
    rows.push_back(std::move(row));
  }
  ojson result;
  result["model"] = {{"n", g.model.n}, {"J", g.model.J}, {"h_z", g.model.h_z}, {"cyclic", g.model.cyclic}};
  result["rows"] = std::move(rows);
  Written w;
  emit(o, w, "ground_state.json", envelope("ground-state", c, seed, std::move(result)).dump(2) + "\n");
  emit(o, w, "ground_state.csv", csv.str());
  return w;
}

Written cmd_optimize(const LoadedConfig& c, const RunOptions& o) {
  const OptimizeConfig cfg = parse_optimize(c);
  const std::uint64_t seed = effective_seed(c, o);
  const IsingParams& h = cfg.model;
  const int layers = cfg.layers;
  const bool symmetric = cfg.symmetric;
  const auto dim = static_cast<int>(AnsatzParams::expected_size(h.n, layers, symmetric));

  Objective f;
  if (cfg.noisy) {
    f = estimator_objective(h, layers, symmetric, *cfg.device, cfg.estimator);
  } else {
    f = [h, layers, symmetric](const Eigen::VectorXd& theta, std::uint64_t) {
      return Evaluation{ansatz_energy(h, AnsatzParams{layers, theta, symmetric}), 0.0};
    };
  }
  Reference ref;
  if (cfg.reference) {
    ref = [h, layers, symmetric](const Eigen::VectorXd& theta) {
      return ansatz_energy(h, AnsatzParams{layers, theta, symmetric});
    };
  }

  Written w;
  SpsaResult r;
  try {
    r = spsa_optimize(f, dim, cfg.spsa, seed, ref);
  } catch (const OptimizationError& e) {
    // Keep what was recorded before the objective failed.
    emit(o, w, "trace.csv", e.trace().to_csv());
    throw;
  }

  const AnsatzParams best{layers, r.theta, symmetric};
  const Circuit circuit = build_alt_ansatz(h.n, best);
  const double best_exact = ansatz_energy(h, best);
  ojson result;
  result["model"] = {{"n", h.n}, {"J", h.J}, {"h_x", h.h_x}, {"h_z", h.h_z}};
  result["layers"] = layers;
  result["symmetric"] = symmetric;
  result["objective"] = cfg.noisy ? "noisy" : "exact";
  if (cfg.noisy) {
    result["device_digest"] = device_digest(*cfg.device);
    result["estimator"] = cfg.estimator.canonical();
  }
  result["spsa"] = {{"a", cfg.spsa.a},         {"calibrated_a", r.trace.calibrated_a},
                    {"c", cfg.spsa.c},         {"alpha", cfg.spsa.alpha},
                    {"gamma", cfg.spsa.gamma}, {"A", cfg.spsa.stability()},
                    {"max_iter", cfg.spsa.max_iter}};
  result["iterations"] = r.trace.records.size();
  result["best_value"] = r.trace.best_value;
  result["best_exact_energy"] = best_exact;
  if (h.n <= 20) {
    const SpectrumResult s = exact_spectrum(h, false);
    result["exact_ground"] = s.ground_energy;
    result["exact_first_excited"] = s.first_excited_energy;
    result["below_first_excited"] = best_exact < s.first_excited_energy;
  }
  result["theta"] = std::vector<double>(r.theta.data(), r.theta.data() + r.theta.size());
  emit(o, w, "best_circuit.txt", to_text(circuit));
  emit(o, w, "trace.csv", r.trace.to_csv());
  emit(o, w, "optimize.json", envelope("optimize", c, seed, std::move(result)).dump(2) + "\n");
  return w;
}

Written cmd_benchmark(const LoadedConfig& c, const RunOptions& o) {
  BenchmarkCliConfig cfg = parse_benchmark(c);
  if (o.seed) cfg.benchmark.seeds = {*o.seed};
  const std::filesystem::path cache = cfg.cache_dir.empty() ? o.out / "cache" : cfg.cache_dir;
  EnergyCache energies(cache / "energies");
  const BenchmarkReport report = run_benchmark(cfg.benchmark, cfg.device, &energies, cache / "circuits");

  Written w;
  const ojson seeds = cfg.benchmark.seeds;
  emit(o, w, "benchmark.json",
       envelope("benchmark", c, seeds, ojson::parse(benchmark_to_json(report))).dump(2) + "\n");
  emit(o, w, "heatmap.csv", benchmark_rows_csv(report));
  emit(o, w, "damping.csv", benchmark_observed_csv(report));
  return w;
}

Written cmd_readout_study(const LoadedConfig& c, const RunOptions& o) {
  const ReadoutStudyConfig cfg = parse_readout_study(c);
  const std::uint64_t seed = effective_seed(c, o);
  const ReadoutStudy s = readout_study(cfg.sizes, cfg.points, cfg.e0, cfg.e1, seed);

  ojson points = ojson::array();
  std::ostringstream pcsv;
  pcsv << "N,p,p_tilde,model,residual,lower,upper,within_bounds\n";
  for (const auto& p : s.points) {
    ojson j{{"N", p.N}, {"p", p.p}, {"p_tilde", p.p_tilde}, {"model", p.model}, {"residual", p.residual}};
    if (p.bounds) j["bounds"] = {{"lo", p.bounds->lo}, {"hi", p.bounds->hi}, {"mid", p.bounds->mid}};
    j["within_bounds"] = p.within_bounds;
    points.push_back(std::move(j));
    pcsv << p.N << ',' << fmt(p.p) << ',' << fmt(p.p_tilde) << ',' << fmt(p.model) << ',' << fmt(p.residual)
         << ',' << (p.bounds ? fmt(p.bounds->lo) : "") << ',' << (p.bounds ? fmt(p.bounds->hi) : "") << ','
         << (p.within_bounds ? 1 : 0) << '\n';
  }
  ojson summary = ojson::array();
  std::ostringstream scsv;
  scsv << "N,model,rms_residual,max_abs_residual,bound_violations\n";
  for (const auto& m : s.summary) {
    const char* model = m.N == 1 ? "N1" : m.N == 2 ? "N2_midpoint" : "average";
    summary.push_back({{"N", m.N},
                       {"model", model},
                       {"rms_residual", m.rms_residual},
                       {"max_abs_residual", m.max_abs_residual},
                       {"bound_violations", m.bound_violations}});
    scsv << m.N << ',' << model << ',' << fmt(m.rms_residual) << ',' << fmt(m.max_abs_residual) << ','
         << m.bound_violations << '\n';
  }
  ojson result{{"e0", s.e0}, {"e1", s.e1}, {"points_per_size", cfg.points}};
  result["summary"] = std::move(summary);
  result["points"] = std::move(points);

  Written w;
  emit(o, w, "readout_study.json", envelope("readout-study", c, seed, std::move(result)).dump(2) + "\n");
  emit(o, w, "readout_points.csv", pcsv.str());
  emit(o, w, "readout_summary.csv", scsv.str());
  return w;
}

}  // namespace mf::cli
