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

#include "mitiq_forge/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "mitiq_forge/errors.hpp"
#include "mitiq_forge/util.hpp"

namespace mf {
namespace {

using json = nlohmann::ordered_json;

enum : std::uint64_t { kTargetStream = 1, kPertStream = 2, kZeroThetaStream = 3, kModelStream = 4 };

constexpr struct {
  BenchmarkMethod method;
  const char* name;
} kMethodNames[] = {
    {BenchmarkMethod::kNone, "none"},
    {BenchmarkMethod::kZne, "zne"},
    {BenchmarkMethod::kFromPert, "from_pert"},
    {BenchmarkMethod::kDepthFit, "depth_fit"},
    {BenchmarkMethod::kZeroThetaFidelity, "zero_theta_fidelity"},
    {BenchmarkMethod::kZeroThetaEnergy, "zero_theta_energy"},
    {BenchmarkMethod::kZneFirst, "zne_first"},
    {BenchmarkMethod::kZneLast, "zne_last"},
    {BenchmarkMethod::kMultiplyFidelities, "multiply_fidelities"},
    {BenchmarkMethod::kNoiseModelSim, "noise_model_sim"},
};

std::string model_text(const IsingParams& h) {
  std::ostringstream os;
  os.precision(17);
  os << "n=" << h.n << ";J=" << h.J << ";hx=" << h.h_x << ";hz=" << h.h_z << ";cyclic=" << h.cyclic;
  return os.str();
}

std::string params_to_json(const OptimizedCircuit& c) {
  json j;
  j["layers"] = c.layers;
  j["symmetric"] = c.params.symmetric;
  j["energy"] = c.energy;
  j["values"] = std::vector<double>(c.params.values.data(), c.params.values.data() + c.params.values.size());
  return j.dump(2);
}

std::optional<OptimizedCircuit> params_from_json(const std::string& text, int n) {
  try {
    const auto j = json::parse(text);
    OptimizedCircuit c;
    c.layers = j.at("layers").get<int>();
    c.params.layers = c.layers;
    c.params.symmetric = j.at("symmetric").get<bool>();
    const auto v = j.at("values").get<std::vector<double>>();
    if (v.size() != AnsatzParams::expected_size(n, c.layers, c.params.symmetric)) return std::nullopt;
    c.params.values = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    c.energy = j.at("energy").get<double>();
    c.circuit = build_alt_ansatz(n, c.params);
    return c;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

bool is_calibration_method(BenchmarkMethod m) {
  return m != BenchmarkMethod::kNone && m != BenchmarkMethod::kZne && m != BenchmarkMethod::kMultiplyFidelities;
}

void finish_row(BenchmarkRow& row) {
  row.rel_error = std::abs(row.e_mitigated - row.e_true) / std::abs(row.e_true);
  row.rel_sigma = row.e_sigma / std::abs(row.e_true);
  row.effectiveness = classify_effectiveness(row.e_mitigated, row.e_sigma, row.e_true);
}

void set_mitigated(BenchmarkRow& row, double e, double e_sigma, const DampingEstimate& c) {
  const MitigatedEnergy m = apply_damping(e, e_sigma, c);
  row.c = c.c;
  row.c_sigma = c.sigma;
  row.e_mitigated = m.value;
  row.e_sigma = m.sigma;
}

// Failed cells keep the unextrapolated energy for reference.
void record_failure(BenchmarkRow& row, const std::string& reason, double e, double e_sigma) {
  row.status = "fit_failure";
  row.reason = reason;
  row.c = row.c_sigma = 0.0;
  row.e_mitigated = e;
  row.e_sigma = e_sigma;
  row.rel_error = std::abs(e - row.e_true) / std::abs(row.e_true);
  row.rel_sigma = e_sigma / std::abs(row.e_true);
  row.effectiveness = -1;
}

// Damping implied by a method that returns an energy directly.
void set_energy(BenchmarkRow& row, double e_unmitigated, double value, double sigma) {
  row.e_mitigated = value;
  row.e_sigma = sigma;
  row.c = value != 0.0 ? e_unmitigated / value : 0.0;
  row.c_sigma = value != 0.0 ? std::abs(row.c) * sigma / std::abs(value) : 0.0;
}

std::string fixed(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

}  // namespace

std::string to_string(BenchmarkMethod m) {
  for (const auto& e : kMethodNames) {
    if (e.method == m) return e.name;
  }
  return "?";
}

BenchmarkMethod benchmark_method_from_string(const std::string& name) {
  for (const auto& e : kMethodNames) {
    if (name == e.name) return e.method;
  }
  throw ConfigError("unknown method \"" + name + "\"");
}

std::vector<BenchmarkMethod> all_benchmark_methods() {
  std::vector<BenchmarkMethod> out;
  for (const auto& e : kMethodNames) out.push_back(e.method);
  return out;
}

std::string to_string(ReadoutVariant v) {
  return v == ReadoutVariant::kCalibrationRaw ? "calibration_raw" : "all_mitigated";
}

ReadoutVariant readout_variant_from_string(const std::string& name) {
  if (name == "calibration_raw") return ReadoutVariant::kCalibrationRaw;
  if (name == "all_mitigated") return ReadoutVariant::kAllMitigated;
  throw ConfigError("unknown readout variant \"" + name + "\"");
}

void OptimizerSettings::validate() const {
  if (restarts < 1 || first_sweeps < 1 || warm_sweeps < 0) throw ConfigError("optimizer counts out of range");
}

std::string OptimizerSettings::canonical() const {
  std::ostringstream os;
  os << "restarts=" << restarts << ";first=" << first_sweeps << ";warm=" << warm_sweeps << ";seed=" << seed;
  return os.str();
}

std::vector<OptimizedCircuit> optimized_chain(const IsingParams& h, std::span<const int> layers, bool symmetric,
                                              const OptimizerSettings& opts, const std::filesystem::path& cache_dir) {
  opts.validate();
  std::vector<int> sorted(layers.begin(), layers.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (!cache_dir.empty()) std::filesystem::create_directories(cache_dir);

  std::vector<OptimizedCircuit> out;
  std::string path = "chain|" + model_text(h) + "|sym=" + std::to_string(symmetric) + "|" + opts.canonical();
  for (int l : sorted) {
    if (l < 0) throw ConfigError("layer counts must be >= 0");
    path += "|" + std::to_string(l);
    const std::filesystem::path file = cache_dir.empty() ? std::filesystem::path{} : cache_dir / (digest(path) + ".json");
    if (!file.empty() && std::filesystem::exists(file)) {
      if (auto hit = params_from_json(read_file(file), h.n)) {
        out.push_back(std::move(*hit));
        continue;
      }
    }
    ClassicalOptions co;
    if (out.empty()) {
      co.restarts = opts.restarts;
      co.max_sweeps = opts.first_sweeps;
    } else {
      co.restarts = 1;
      co.max_sweeps = std::max(opts.warm_sweeps, 1);
      co.initial = out.back().params;
    }
    ClassicalResult r;
    if (!out.empty() && opts.warm_sweeps == 0) {
      r.params = prepend_zero_layers(out.back().params, h.n, l - out.back().layers);
      r.circuit = build_alt_ansatz(h.n, r.params);
      r.energy = ansatz_energy(h, r.params);
    } else {
      r = classical_optimize(h, l, symmetric, derive_seed(opts.seed, {static_cast<std::uint64_t>(l)}), co);
    }
    OptimizedCircuit c{l, r.params, r.circuit, r.energy};
    if (!file.empty()) write_file_atomic(file, params_to_json(c));
    out.push_back(std::move(c));
  }
  return out;
}

void BenchmarkConfig::validate() const {
  if (model.n < 3) throw ConfigError("benchmark needs n >= 3");
  if (layers.empty()) throw ConfigError("layer sweep is empty");
  for (int l : layers) {
    if (l < 1) throw ConfigError("layer counts must be >= 1");
  }
  for (int l : method_layers) {
    if (std::find(layers.begin(), layers.end(), l) == layers.end()) {
      throw ConfigError("method layer " + std::to_string(l) + " is not in the layer sweep");
    }
  }
  if (methods.empty()) throw ConfigError("method list is empty");
  if (variants.empty()) throw ConfigError("variant list is empty");
  if (seeds.empty()) throw ConfigError("seed list is empty");
  const bool has = [&] {
    for (auto m : methods) {
      if (m == BenchmarkMethod::kFromPert) return true;
    }
    return false;
  }();
  if (has && pert_hx.empty()) throw ConfigError("from_pert needs perturbative h_x values");
  if (zne_scales.size() < 2 || std::find(zne_scales.begin(), zne_scales.end(), 1.0) == zne_scales.end()) {
    throw ConfigError("zne_scales needs >= 2 entries including 1");
  }
  for (double s : zne_scales) {
    if (!(s >= 1.0)) throw ConfigError("zne scales must be >= 1");
  }
  if (depth_fit_max < 1) throw ConfigError("depth_fit_max must be >= 1");
  if (!(noise_model_scale >= 0.0)) throw ConfigError("noise_model_scale must be >= 0");
  estimator.validate();
  optimizer.validate();
}

std::string BenchmarkConfig::canonical() const {
  std::ostringstream os;
  os.precision(17);
  os << model_text(model) << ";sym=" << symmetric << ";layers=";
  for (int l : layers) os << l << ',';
  os << ";method_layers=";
  for (int l : method_layers) os << l << ',';
  os << ";methods=";
  for (auto m : methods) os << to_string(m) << ',';
  os << ";variants=";
  for (auto v : variants) os << to_string(v) << ',';
  os << ";pert=";
  for (double h : pert_hx) os << h << ',';
  os << ";scales=";
  for (double s : zne_scales) os << s << ',';
  os << ";depth_max=" << depth_fit_max << ";model_scale=" << noise_model_scale << ";est={" << estimator.canonical()
     << "};opt={" << optimizer.canonical() << "};seeds=";
  for (auto s : seeds) os << s << ',';
  return os.str();
}

const BenchmarkRow* BenchmarkReport::find(std::uint64_t seed, ReadoutVariant variant, int layers,
                                          BenchmarkMethod method) const {
  for (const auto& r : rows) {
    if (r.seed == seed && r.variant == variant && r.layers == layers && r.method == method) return &r;
  }
  return nullptr;
}

int BenchmarkReport::max_layers_with_class(std::uint64_t seed, ReadoutVariant variant, BenchmarkMethod method,
                                           int min_class) const {
  int best = 0;
  for (const auto& r : rows) {
    if (r.seed == seed && r.variant == variant && r.method == method && r.effectiveness >= min_class) {
      best = std::max(best, r.layers);
    }
  }
  return best;
}

BenchmarkReport run_benchmark(const BenchmarkConfig& cfg, const DeviceModel& d, EnergyCache* cache,
                              const std::filesystem::path& circuit_cache_dir) {
  cfg.validate();
  d.validate();
  if (d.n_physical < cfg.model.n) throw ConfigError("device has fewer qubits than the model");
  const auto has = [&](BenchmarkMethod m) {
    return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end();
  };

  BenchmarkReport report;
  report.config_digest = digest(cfg.canonical());
  report.device_digest = device_digest(d);
  const std::vector<PauliTerm> terms = expand_terms(cfg.model);
  report.circuits = optimized_chain(cfg.model, cfg.layers, cfg.symmetric, cfg.optimizer, circuit_cache_dir);

  std::vector<IsingParams> pert_models;
  std::vector<std::vector<OptimizedCircuit>> pert_chains;
  if (has(BenchmarkMethod::kFromPert)) {
    for (double hx : cfg.pert_hx) {
      IsingParams p = cfg.model;
      p.h_x = hx;
      pert_models.push_back(p);
      pert_chains.push_back(optimized_chain(p, cfg.layers, cfg.symmetric, cfg.optimizer, circuit_cache_dir));
    }
  }
  const DeviceModel belief = d.scaled(cfg.noise_model_scale, 1.0);
  const EstimatorConfig& est = cfg.estimator;
  const std::size_t n_layers = report.circuits.size();

  for (std::uint64_t seed : cfg.seeds) {
    // Observed damping at every layer count.
    std::vector<EnergyEstimate> target(n_layers);
    for (std::size_t i = 0; i < n_layers; ++i) {
      const OptimizedCircuit& oc = report.circuits[i];
      const std::uint64_t ms = derive_seed(seed, {static_cast<std::uint64_t>(oc.layers)});
      target[i] = measure_energy(oc.circuit, terms, d, est, derive_seed(ms, {kTargetStream}), cache);
      ObservedRow o;
      o.seed = seed;
      o.layers = oc.layers;
      o.e_true = oc.energy;
      o.raw = target[i].raw;
      o.raw_sigma = target[i].raw_sigma;
      o.mitigated = target[i].value;
      o.mitigated_sigma = target[i].sigma;
      o.c_raw = damping_from(target[i], oc.energy, true);
      o.c_mitigated = damping_from(target[i], oc.energy, false);
      report.observed.push_back(o);
    }
    const std::size_t first_obs = report.observed.size() - n_layers;
    auto depth_points = [&](bool raw) {
      std::vector<DepthPoint> pts;
      for (std::size_t i = 0; i < n_layers; ++i) {
        const ObservedRow& o = report.observed[first_obs + i];
        const DampingEstimate& c = raw ? o.c_raw : o.c_mitigated;
        pts.push_back({o.layers, c.c, c.sigma});
      }
      return pts;
    };

    for (std::size_t i = 0; i < n_layers; ++i) {
      const OptimizedCircuit& oc = report.circuits[i];
      const int l = oc.layers;
      if (!cfg.method_layers.empty() &&
          std::find(cfg.method_layers.begin(), cfg.method_layers.end(), l) == cfg.method_layers.end()) {
        continue;
      }
      const std::uint64_t ms = derive_seed(seed, {static_cast<std::uint64_t>(l)});
      const std::uint64_t target_seed = derive_seed(ms, {kTargetStream});
      const EnergyEstimate& e = target[i];
      std::optional<ZeroThetaMeasurement> zero;

      for (ReadoutVariant variant : cfg.variants) {
        for (BenchmarkMethod method : cfg.methods) {
          const bool raw = variant == ReadoutVariant::kCalibrationRaw && is_calibration_method(method);
          BenchmarkRow row;
          row.seed = seed;
          row.variant = variant;
          row.layers = l;
          row.method = method;
          row.e_true = oc.energy;
          const double e_v = energy_value(e, raw);
          const double s_v = energy_sigma(e, raw);
          try {
            switch (method) {
              case BenchmarkMethod::kNone:
                set_energy(row, e_v, e_v, s_v);
                break;
              case BenchmarkMethod::kZne: {
                const ZneResult z = zne(oc.circuit, terms, d, est, cfg.zne_scales, target_seed, cache, false);
                set_energy(row, e_v, z.value, z.sigma);
                break;
              }
              case BenchmarkMethod::kFromPert: {
                std::vector<PerturbativePoint> pts;
                for (std::size_t k = 0; k < pert_models.size(); ++k) {
                  const OptimizedCircuit& pc = pert_chains[k][i];
                  pts.push_back({pc.circuit, pert_models[k], pc.energy});
                }
                set_mitigated(row, e_v, s_v,
                              predict_from_pert(pts, d, est, derive_seed(ms, {kPertStream}), cache, raw));
                break;
              }
              case BenchmarkMethod::kDepthFit: {
                const auto pts = depth_points(raw);
                set_mitigated(row, e_v, s_v, predict_from_depth(pts, cfg.depth_fit_max, l));
                break;
              }
              case BenchmarkMethod::kZeroThetaFidelity:
              case BenchmarkMethod::kZeroThetaEnergy: {
                if (!zero) zero = measure_zero_theta(cfg.model.n, l, terms, d, est, derive_seed(ms, {kZeroThetaStream}));
                const auto zv = method == BenchmarkMethod::kZeroThetaFidelity ? ZeroThetaVariant::kFidelity
                                                                              : ZeroThetaVariant::kEnergy;
                set_mitigated(row, e_v, s_v, zero_theta_damping(*zero, zv, raw));
                break;
              }
              case BenchmarkMethod::kZneFirst:
              case BenchmarkMethod::kZneLast: {
                const auto order = method == BenchmarkMethod::kZneFirst ? ZneOrder::kFirst : ZneOrder::kLast;
                const ZneCombinedResult z =
                    zne_combined(oc.circuit, terms, l, d, est, order, cfg.zne_scales, target_seed, cache, raw);
                set_energy(row, e_v, z.value, z.sigma);
                break;
              }
              case BenchmarkMethod::kMultiplyFidelities:
                set_mitigated(row, e_v, s_v, predict_multiply_fidelities(oc.circuit, terms, d, est));
                break;
              case BenchmarkMethod::kNoiseModelSim:
                set_mitigated(row, e_v, s_v,
                              predict_noise_model_sim(oc.circuit, terms, belief, est, oc.energy,
                                                      derive_seed(ms, {kModelStream}), cache, raw));
                break;
            }
            finish_row(row);
          } catch (const FitError& ex) {
            record_failure(row, ex.what(), ex.fallback().value_or(e_v), s_v);
          } catch (const DomainError& ex) {
            record_failure(row, ex.what(), e_v, s_v);
          }
          report.rows.push_back(std::move(row));
        }
      }
    }
  }
  return report;
}

std::string benchmark_to_json(const BenchmarkReport& r) {
  json j;
  j["config_digest"] = r.config_digest;
  j["device_digest"] = r.device_digest;
  auto& circuits = j["circuits"] = json::array();
  for (const auto& c : r.circuits) {
    circuits.push_back({{"layers", c.layers},
                        {"energy", c.energy},
                        {"circuit_digest", digest(to_text(c.circuit))},
                        {"params", std::vector<double>(c.params.values.data(),
                                                       c.params.values.data() + c.params.values.size())}});
  }
  auto& observed = j["observed"] = json::array();
  for (const auto& o : r.observed) {
    observed.push_back({{"seed", o.seed},
                        {"layers", o.layers},
                        {"e_true", o.e_true},
                        {"raw", o.raw},
                        {"raw_sigma", o.raw_sigma},
                        {"mitigated", o.mitigated},
                        {"mitigated_sigma", o.mitigated_sigma},
                        {"c_raw", o.c_raw.c},
                        {"c_raw_sigma", o.c_raw.sigma},
                        {"c_mitigated", o.c_mitigated.c},
                        {"c_mitigated_sigma", o.c_mitigated.sigma}});
  }
  auto& rows = j["rows"] = json::array();
  for (const auto& row : r.rows) {
    json x{{"seed", row.seed},
           {"variant", to_string(row.variant)},
           {"layers", row.layers},
           {"method", to_string(row.method)},
           {"status", row.status},
           {"c_pred", row.c},
           {"sigma", row.c_sigma},
           {"e_mitigated", row.e_mitigated},
           {"e_sigma", row.e_sigma},
           {"e_true", row.e_true},
           {"rel_error", row.rel_error},
           {"rel_sigma", row.rel_sigma},
           {"class", row.effectiveness}};
    if (!row.reason.empty()) x["reason"] = row.reason;
    rows.push_back(std::move(x));
  }
  return j.dump(2);
}

std::string benchmark_rows_csv(const BenchmarkReport& r) {
  std::ostringstream os;
  os << "seed,variant,layers,method,status,c_pred,c_sigma,e_mitigated,e_sigma,e_true,rel_error,rel_sigma,class\n";
  for (const auto& row : r.rows) {
    os << row.seed << ',' << to_string(row.variant) << ',' << row.layers << ',' << to_string(row.method) << ','
       << row.status << ',' << fixed(row.c) << ',' << fixed(row.c_sigma) << ',' << fixed(row.e_mitigated) << ','
       << fixed(row.e_sigma) << ',' << fixed(row.e_true) << ',' << fixed(row.rel_error) << ','
       << fixed(row.rel_sigma) << ',' << row.effectiveness << '\n';
  }
  return os.str();
}

std::string benchmark_observed_csv(const BenchmarkReport& r) {
  std::ostringstream os;
  os << "seed,layers,e_true,raw,raw_sigma,mitigated,mitigated_sigma,c_raw,c_raw_sigma,c_mitigated,c_mitigated_sigma\n";
  for (const auto& o : r.observed) {
    os << o.seed << ',' << o.layers << ',' << fixed(o.e_true) << ',' << fixed(o.raw) << ',' << fixed(o.raw_sigma)
       << ',' << fixed(o.mitigated) << ',' << fixed(o.mitigated_sigma) << ',' << fixed(o.c_raw.c) << ','
       << fixed(o.c_raw.sigma) << ',' << fixed(o.c_mitigated.c) << ',' << fixed(o.c_mitigated.sigma) << '\n';
  }
  return os.str();
}

}  // namespace mf
