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

#include "mitiq_forge/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "mitiq_forge/errors.hpp"
#include "mitiq_forge/util.hpp"

namespace mf {
namespace {

// Stream tags for derive_seed.
enum : std::uint64_t { kFoldStream = 1, kCompileStream = 2, kSampleStream = 3, kRegisterStream = 4 };

// One assignment x compilation draw; shots within a trajectory are correlated.
struct Cell {
  std::size_t assignment = 0;
  std::vector<ShotTable> trajectories;
};

struct TermSamples {
  FilteredCircuit fc;
  std::vector<QubitAssignment> assignments;
  std::vector<ShotTable> tables;  // pooled per assignment
  std::vector<Cell> cells;
};

struct Job {
  std::size_t term = 0;
  std::size_t assignment = 0;
  int draw = 0;
  std::uint64_t shots = 0;
};

std::vector<int> measured_physical(const FilteredCircuit& fc, const QubitAssignment& a) {
  const std::vector<int> phys = physical_layout(fc.labels, a, fc.circuit.n_qubits());
  std::vector<int> out;
  for (int q : fc.circuit.measured()) out.push_back(phys[static_cast<std::size_t>(q)]);
  return out;
}

// Samples every term circuit with a nonzero coefficient; `skip` marks the rest.
std::vector<TermSamples> sample_terms(const std::vector<FilteredCircuit>& circuits,
                                      const std::vector<bool>& skip, const DeviceModel& d,
                                      const EstimatorConfig& cfg, std::uint64_t seed,
                                      std::uint64_t stream_offset) {
  const auto cells = static_cast<std::uint64_t>(cfg.assignments) * static_cast<std::uint64_t>(cfg.rc_instances);
  if (cfg.shots_per_term < cells) {
    throw BudgetError("shots_per_term (" + std::to_string(cfg.shots_per_term) +
                      ") is smaller than assignments x rc_instances (" + std::to_string(cells) + ")");
  }
  std::vector<TermSamples> samples(circuits.size());
  std::vector<Job> jobs;
  for (std::size_t t = 0; t < circuits.size(); ++t) {
    if (skip[t]) continue;
    TermSamples& s = samples[t];
    s.fc = circuits[t];
    if (cfg.fold_scale != 1.0) {
      s.fc.circuit = fold_cnots(s.fc.circuit, cfg.fold_scale, derive_seed(seed, {stream_offset + t, kFoldStream}));
    }
    s.assignments = select_assignments(d, s.fc.circuit, cfg.assignments, s.fc.labels, cfg.score);
    s.tables.assign(s.assignments.size(), ShotTable{{}, 0, s.fc.circuit.measured()});
    const std::uint64_t base = cfg.shots_per_term / cells;
    const std::uint64_t extra = cfg.shots_per_term % cells;
    std::uint64_t cell = 0;
    for (std::size_t a = 0; a < s.assignments.size(); ++a) {
      for (int r = 0; r < cfg.rc_instances; ++r, ++cell) {
        jobs.push_back({t, a, r, base + (cell < extra ? 1 : 0)});
      }
    }
  }
  std::vector<std::vector<ShotTable>> results(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    const Job& job = jobs[j];
    const TermSamples& s = samples[job.term];
    const std::uint64_t t = stream_offset + job.term;
    const auto a = static_cast<std::uint64_t>(job.assignment);
    const auto r = static_cast<std::uint64_t>(job.draw);
    const Circuit c = cfg.rc_instances > 1 || job.draw > 0
                          ? randomized_compile(s.fc.circuit, derive_seed(seed, {t, kCompileStream, a, r}))
                          : s.fc.circuit;
    NoiseConfig nc;
    nc.device = d;
    nc.assignment = s.assignments[job.assignment];
    nc.labels = s.fc.labels;
    nc.depolarizing_on = cfg.depolarizing_on;
    nc.readout_on = cfg.readout_on;
    nc.shots_per_trajectory = cfg.shots_per_trajectory;
    nc.seed = derive_seed(seed, {t, kSampleStream, a, r});
    results[j] = sample_noisy_trajectories(c, nc, job.shots);
  });
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    TermSamples& s = samples[jobs[j].term];
    for (const ShotTable& tr : results[j]) s.tables[jobs[j].assignment].merge(tr);
    s.cells.push_back({jobs[j].assignment, std::move(results[j])});
  }
  return samples;
}

struct Combined {
  double value = 0.0, sigma = 0.0;
  bool clamped = false;
};

// Shot-weighted combination of per-assignment estimates.
template <typename PerAssignment>
Combined combine(const TermSamples& s, PerAssignment&& estimate) {
  double total = 0.0;
  for (const auto& t : s.tables) total += static_cast<double>(t.shots);
  Combined out;
  double var = 0.0;
  for (std::size_t a = 0; a < s.tables.size(); ++a) {
    const MitigatedParity m = estimate(a);
    const double w = static_cast<double>(s.tables[a].shots) / total;
    out.value += w * m.value;
    var += w * w * m.sigma * m.sigma;
    out.clamped = out.clamped || m.clamped;
  }
  out.sigma = std::sqrt(var);
  return out;
}

// Standard error of a shot-weighted mean of per-shot quantities, from the
// spread of trajectory means around their cell mean. Zero when no cell has
// two trajectories.
template <typename PerTable>
double trajectory_sigma(const TermSamples& s, PerTable&& mean_of) {
  double total = 0.0, weight2 = 0.0, ss = 0.0;
  std::size_t dof = 0;
  for (const Cell& cell : s.cells) {
    std::vector<double> x;
    double n_cell = 0.0, cell_mean = 0.0;
    for (const ShotTable& tr : cell.trajectories) {
      const auto n = static_cast<double>(tr.shots);
      x.push_back(mean_of(tr, cell.assignment));
      n_cell += n;
      cell_mean += n * x.back();
      total += n;
      weight2 += n * n;
    }
    if (x.size() < 2) continue;
    cell_mean /= n_cell;
    for (double v : x) ss += (v - cell_mean) * (v - cell_mean);
    dof += x.size() - 1;
  }
  if (dof == 0) return 0.0;
  return std::sqrt(ss / static_cast<double>(dof) * weight2) / total;
}

std::vector<ReadoutRates> assignment_rates(const TermSamples& s, const DeviceModel& d) {
  std::vector<ReadoutRates> out;
  for (const auto& a : s.assignments) out.push_back(ReadoutRates::from_device(d, measured_physical(s.fc, a)));
  return out;
}

ShotTable pooled(const TermSamples& s) {
  ShotTable all{{}, 0, s.fc.circuit.measured()};
  for (const auto& t : s.tables) all.merge(t);
  return all;
}

TermEstimate estimate_term(const PauliTerm& term, const TermSamples& s, const DeviceModel& d,
                           const EstimatorConfig& cfg) {
  TermEstimate e;
  e.term = term;
  const std::vector<int>& support = s.fc.circuit.measured();
  const ParityEstimate raw = parity_expectation(pooled(s), support);
  const double raw_traj = trajectory_sigma(
      s, [&](const ShotTable& tr, std::size_t) { return parity_expectation(tr, support).value; });
  e.raw = raw.value;
  e.raw_sigma = std::max(raw.sigma, raw_traj);
  if (cfg.readout_on) {
    const std::vector<ReadoutRates> rates = assignment_rates(s, d);
    const bool tensored = cfg.readout_mode == ReadoutMode::kTensored;
    const Combined m = combine(s, [&](std::size_t a) {
      if (tensored) return mitigate_parity_tensored(s.tables[a], support, rates[a]);
      const ParityEstimate p = parity_expectation(s.tables[a], support);
      return mitigate_parity(p.value, p.sigma, rates[a], static_cast<int>(support.size()));
    });
    e.mitigated = m.value;
    if (tensored) {
      e.mitigated_sigma = std::max(m.sigma, trajectory_sigma(s, [&](const ShotTable& tr, std::size_t a) {
        return mitigate_parity_tensored(tr, support, rates[a]).value;
      }));
    } else {
      // The inversion is close to a rescaling, so it inherits the raw inflation.
      e.mitigated_sigma = raw.sigma > 0.0 ? m.sigma * e.raw_sigma / raw.sigma : m.sigma;
    }
    e.clamped = m.clamped;
  } else {
    e.mitigated = e.raw;
    e.mitigated_sigma = e.raw_sigma;
  }
  e.value = cfg.readout_mitigation ? e.mitigated : e.raw;
  e.sigma = cfg.readout_mitigation ? e.mitigated_sigma : e.raw_sigma;
  return e;
}

EnergyEstimate assemble(std::vector<TermEstimate> per_term) {
  EnergyEstimate e;
  double var = 0.0, raw_var = 0.0, mit_var = 0.0;
  for (const TermEstimate& t : per_term) {
    const double c = t.term.coefficient;
    e.value += c * t.value;
    e.raw += c * t.raw;
    e.mitigated += c * t.mitigated;
    var += c * c * t.sigma * t.sigma;
    raw_var += c * c * t.raw_sigma * t.raw_sigma;
    mit_var += c * c * t.mitigated_sigma * t.mitigated_sigma;
    e.clamped = e.clamped || t.clamped;
  }
  e.sigma = std::sqrt(var);
  e.raw_sigma = std::sqrt(raw_var);
  e.mitigated_sigma = std::sqrt(mit_var);
  e.per_term = std::move(per_term);
  return e;
}

EnergyEstimate energy_from_samples(const std::vector<PauliTerm>& terms,
                                   const std::vector<TermSamples>& samples,
                                   const std::vector<bool>& skip, const DeviceModel& d,
                                   const EstimatorConfig& cfg) {
  std::vector<TermEstimate> per_term;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    if (skip[t]) {
      TermEstimate zero;
      zero.term = terms[t];
      per_term.push_back(zero);
    } else {
      per_term.push_back(estimate_term(terms[t], samples[t], d, cfg));
    }
  }
  return assemble(std::move(per_term));
}

std::string terms_text(const std::vector<PauliTerm>& terms) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& t : terms) os << t.coefficient << ' ' << describe(t) << ';';
  return os.str();
}

}  // namespace

void EstimatorConfig::validate() const {
  if (shots_per_term < 1 || assignments < 1 || rc_instances < 1 || shots_per_trajectory < 1) {
    throw ConfigError("estimator counts must be >= 1");
  }
  if (!(fold_scale >= 1.0)) throw ConfigError("fold_scale must be >= 1");
}

std::string EstimatorConfig::canonical() const {
  std::ostringstream os;
  os.precision(17);
  os << "shots=" << shots_per_term << ";assignments=" << assignments << ";rc=" << rc_instances
     << ";mitigate=" << readout_mitigation << ";mode=" << static_cast<int>(readout_mode)
     << ";fold=" << fold_scale << ";spt=" << shots_per_trajectory << ";depol=" << depolarizing_on
     << ";readout=" << readout_on << ";score_sq=" << score.include_single_qubit
     << ";score_ro=" << score.include_readout;
  return os.str();
}

std::string energy_to_json(const EnergyEstimate& e) {
  nlohmann::ordered_json j;
  j["value"] = e.value;
  j["sigma"] = e.sigma;
  j["raw"] = e.raw;
  j["raw_sigma"] = e.raw_sigma;
  j["mitigated"] = e.mitigated;
  j["mitigated_sigma"] = e.mitigated_sigma;
  j["clamped"] = e.clamped;
  j["config_hash"] = e.config_hash;
  auto& terms = j["per_term"] = nlohmann::ordered_json::array();
  for (const auto& t : e.per_term) {
    terms.push_back({{"term", describe(t.term)}, {"kind", to_string(t.term.kind)},
                     {"support", t.term.support}, {"coefficient", t.term.coefficient},
                     {"value", t.value}, {"sigma", t.sigma}, {"raw", t.raw},
                     {"raw_sigma", t.raw_sigma}, {"mitigated", t.mitigated},
                     {"mitigated_sigma", t.mitigated_sigma}, {"clamped", t.clamped}});
  }
  return j.dump(2);
}

EnergyEstimate energy_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    EnergyEstimate e;
    e.value = j.at("value").get<double>();
    e.sigma = j.at("sigma").get<double>();
    e.raw = j.at("raw").get<double>();
    e.raw_sigma = j.at("raw_sigma").get<double>();
    e.mitigated = j.at("mitigated").get<double>();
    e.mitigated_sigma = j.at("mitigated_sigma").get<double>();
    e.clamped = j.at("clamped").get<bool>();
    e.config_hash = j.at("config_hash").get<std::string>();
    for (const auto& t : j.at("per_term")) {
      TermEstimate te;
      const std::string kind = t.at("kind").get<std::string>();
      te.term.kind = kind == "ZZ" ? PauliKind::kZZ : kind == "X" ? PauliKind::kX : PauliKind::kZ;
      if (kind != "ZZ" && kind != "X" && kind != "Z") throw ConfigError("unknown term kind " + kind);
      te.term.support = t.at("support").get<std::vector<int>>();
      te.term.coefficient = t.at("coefficient").get<double>();
      te.value = t.at("value").get<double>();
      te.sigma = t.at("sigma").get<double>();
      te.raw = t.at("raw").get<double>();
      te.raw_sigma = t.at("raw_sigma").get<double>();
      te.mitigated = t.at("mitigated").get<double>();
      te.mitigated_sigma = t.at("mitigated_sigma").get<double>();
      te.clamped = t.at("clamped").get<bool>();
      e.per_term.push_back(std::move(te));
    }
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("energy json: ") + ex.what());
  }
}

std::string to_string(DampingMethod m) {
  switch (m) {
    case DampingMethod::kObserved: return "observed";
    case DampingMethod::kZne: return "zne";
    case DampingMethod::kFromPert: return "from_pert";
    case DampingMethod::kDepthFit: return "depth_fit";
    case DampingMethod::kZeroThetaFidelity: return "zero_theta_fidelity";
    case DampingMethod::kZeroThetaEnergy: return "zero_theta_energy";
    case DampingMethod::kZneFirst: return "zne_first";
    case DampingMethod::kZneLast: return "zne_last";
    case DampingMethod::kMultiplyFidelities: return "multiply_fidelities";
    case DampingMethod::kNoiseModelSim: return "noise_model_sim";
  }
  return "?";
}

FilteredCircuit term_circuit(const Circuit& ansatz, const PauliTerm& t) {
  for (int q : t.support) {
    if (q < 0 || q >= ansatz.n_qubits()) throw SupportError("term " + describe(t) + " is not on the ansatz");
  }
  Circuit c = ansatz;
  if (t.kind == PauliKind::kX) {
    std::vector<Gate> gates = ansatz.gates();
    gates.push_back(Gate::h(t.support[0]));
    c = Circuit(ansatz.n_qubits(), std::move(gates), ansatz.measured());
  }
  FilteredCircuit f = light_cone_slice(c, t.support);
  f.circuit = decompose_to_basis(f.circuit);
  return f;
}

double light_cone_expectation(const Circuit& ansatz, const PauliTerm& t) {
  const FilteredCircuit f = term_circuit(ansatz, t);
  const std::vector<int>& m = f.circuit.measured();
  const PauliTerm parity{1.0, m.size() == 1 ? PauliKind::kZ : PauliKind::kZZ, m};
  return exact_expectation(f.circuit, parity);
}

EnergyCache::EnergyCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

std::optional<EnergyEstimate> EnergyCache::find(const std::string& key) const {
  {
    std::shared_lock lock(mutex_);
    const auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
  }
  if (dir_.empty()) return std::nullopt;
  const std::filesystem::path file = dir_ / (key + ".json");
  if (!std::filesystem::exists(file)) return std::nullopt;
  EnergyEstimate e;
  try {
    e = energy_from_json(read_file(file));
  } catch (const ConfigError&) {
    return std::nullopt;  // torn or foreign file; measure again
  }
  std::unique_lock lock(mutex_);
  entries_.emplace(key, e);
  return e;
}

void EnergyCache::insert(const std::string& key, const EnergyEstimate& e) {
  std::unique_lock lock(mutex_);
  entries_.emplace(key, e);
  if (dir_.empty()) return;
  write_file_atomic(dir_ / (key + ".json"), energy_to_json(e));
}

std::size_t EnergyCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::string energy_key(const Circuit& ansatz, const std::vector<PauliTerm>& terms,
                       const DeviceModel& d, const EstimatorConfig& cfg, std::uint64_t seed) {
  return digest(to_text(ansatz) + "|" + terms_text(terms) + "|" + device_to_json(d) + "|" +
                cfg.canonical() + "|" + std::to_string(seed));
}

EnergyEstimate measure_energy(const Circuit& ansatz, const std::vector<PauliTerm>& terms,
                              const DeviceModel& d, const EstimatorConfig& cfg, std::uint64_t seed,
                              EnergyCache* cache) {
  cfg.validate();
  const std::string key = energy_key(ansatz, terms, d, cfg, seed);
  if (cache) {
    if (auto hit = cache->find(key)) return *hit;
  }
  std::vector<FilteredCircuit> circuits;
  std::vector<bool> skip;
  for (const PauliTerm& t : terms) {
    circuits.push_back(term_circuit(ansatz, t));
    skip.push_back(t.coefficient == 0.0);
  }
  const auto samples = sample_terms(circuits, skip, d, cfg, seed, 0);
  EnergyEstimate e = energy_from_samples(terms, samples, skip, d, cfg);
  e.config_hash = key;
  if (cache) cache->insert(key, e);
  return e;
}

DampingEstimate damping_from(const EnergyEstimate& e, double exact_energy, bool use_raw) {
  if (std::abs(exact_energy) < 1e-9) throw DomainError("damping is undefined for a vanishing exact energy");
  const double v = use_raw ? e.raw : e.value;
  const double s = use_raw ? e.raw_sigma : e.sigma;
  return {v / exact_energy, s / std::abs(exact_energy), DampingMethod::kObserved, std::nullopt};
}

DampingEstimate measure_damping(const Circuit& ansatz, const std::vector<PauliTerm>& terms,
                                const DeviceModel& d, const EstimatorConfig& cfg,
                                double exact_energy, std::uint64_t seed, EnergyCache* cache) {
  if (std::abs(exact_energy) < 1e-9) throw DomainError("damping is undefined for a vanishing exact energy");
  return damping_from(measure_energy(ansatz, terms, d, cfg, seed, cache), exact_energy, false);
}

ZeroThetaMeasurement measure_zero_theta(int n, int layers, const std::vector<PauliTerm>& terms,
                                        const DeviceModel& d, const EstimatorConfig& cfg,
                                        std::uint64_t seed) {
  cfg.validate();
  const Circuit ansatz = build_alt_ansatz(n, AnsatzParams::zeros(n, layers, true));
  std::vector<FilteredCircuit> circuits;
  std::vector<bool> skip;
  for (const PauliTerm& t : terms) {
    circuits.push_back(term_circuit(ansatz, t));
    skip.push_back(t.coefficient == 0.0);
  }
  const auto samples = sample_terms(circuits, skip, d, cfg, seed, 0);

  ZeroThetaMeasurement out;
  out.energy = energy_from_samples(terms, samples, skip, d, cfg);
  out.energy.config_hash = energy_key(ansatz, terms, d, cfg, seed);
  for (const PauliTerm& t : terms) out.ideal_energy += t.coefficient * light_cone_expectation(ansatz, t);

  // All-zeros probability per Z / ZZ term, weighted by coefficient x ideal value.
  auto zero_fraction = [](const ShotTable& s) {
    const std::string zeros(s.measured.size(), '0');
    const auto it = s.counts.find(zeros);
    const double p = it == s.counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(s.shots);
    return MitigatedParity{p, std::sqrt(p * (1 - p) / static_cast<double>(s.shots)), false};
  };
  double w_sum = 0.0, f_raw = 0.0, f_mit = 0.0, v_raw = 0.0, v_mit = 0.0;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    if (skip[t] || terms[t].kind == PauliKind::kX) continue;
    const double w = terms[t].coefficient * light_cone_expectation(ansatz, terms[t]);
    const TermSamples& s = samples[t];
    MitigatedParity raw = zero_fraction(pooled(s));
    raw.sigma = std::max(raw.sigma, trajectory_sigma(s, [&](const ShotTable& tr, std::size_t) {
      return zero_fraction(tr).value;
    }));
    Combined mit{raw.value, raw.sigma, false};
    if (cfg.readout_on) {
      const std::vector<ReadoutRates> rates = assignment_rates(s, d);
      mit = combine(s, [&](std::size_t a) { return mitigate_zero_probability(s.tables[a], rates[a]); });
      mit.sigma = std::max(mit.sigma, trajectory_sigma(s, [&](const ShotTable& tr, std::size_t a) {
        return mitigate_zero_probability(tr, rates[a]).value;
      }));
    }
    w_sum += w;
    f_raw += w * raw.value;
    f_mit += w * mit.value;
    v_raw += w * w * raw.sigma * raw.sigma;
    v_mit += w * w * mit.sigma * mit.sigma;
  }
  if (w_sum == 0.0) throw DomainError("no Z or ZZ terms to calibrate on");
  out.fidelity_raw = {f_raw / w_sum, std::sqrt(v_raw) / std::abs(w_sum), DampingMethod::kZeroThetaFidelity, std::nullopt};
  const DampingEstimate mitigated{f_mit / w_sum, std::sqrt(v_mit) / std::abs(w_sum),
                                  DampingMethod::kZeroThetaFidelity, std::nullopt};
  out.fidelity = cfg.readout_mitigation ? mitigated : out.fidelity_raw;

  // Whole register, no light cone.
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) all[static_cast<std::size_t>(q)] = q;
  FilteredCircuit full{decompose_to_basis(ansatz).with_measured(all), all};
  const auto reg = sample_terms({full}, {false}, d, cfg, seed, kRegisterStream << 32);
  const TermSamples& r = reg[0];
  const MitigatedParity reg_raw = zero_fraction(pooled(r));
  DampingEstimate reg_est{reg_raw.value,
                          std::max(reg_raw.sigma, trajectory_sigma(r, [&](const ShotTable& tr, std::size_t) {
                            return zero_fraction(tr).value;
                          })),
                          DampingMethod::kZeroThetaFidelity, std::nullopt};
  if (cfg.readout_mitigation && cfg.readout_on) {
    const std::vector<ReadoutRates> rates = assignment_rates(r, d);
    const Combined m = combine(r, [&](std::size_t a) { return mitigate_zero_probability(r.tables[a], rates[a]); });
    reg_est.c = m.value;
    reg_est.sigma = std::max(m.sigma, trajectory_sigma(r, [&](const ShotTable& tr, std::size_t a) {
      return mitigate_zero_probability(tr, rates[a]).value;
    }));
  }
  out.register_fidelity = reg_est;
  return out;
}

}  // namespace mf
