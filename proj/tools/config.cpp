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

#include "config.hpp"

#include <utility>

#include "mitiq_forge/util.hpp"

namespace mf::cli {

ObjectReader::ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
  if (!j_.is_object()) throw ConfigError(where_ + " must be a JSON object");
}

const json& ObjectReader::at(const std::string& key) {
  if (!j_.contains(key)) throw ConfigError("missing required key " + path(key));
  seen_.insert(key);
  return j_.at(key);
}

namespace {

int as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where + " must be an integer");
  const auto x = v.get<std::int64_t>();
  if (x < INT32_MIN || x > INT32_MAX) throw ConfigError(where + " is out of range");
  return static_cast<int>(x);
}

std::uint64_t as_u64(const json& v, const std::string& where) {
  if (!v.is_number_unsigned()) throw ConfigError(where + " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

double as_double(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + " must be a number");
  return v.get<double>();
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + " must be a string");
  return v.get<std::string>();
}

template <typename T, typename F>
std::vector<T> as_list(const json& v, const std::string& where, F each) {
  if (!v.is_array()) throw ConfigError(where + " must be an array");
  std::vector<T> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(each(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace

int ObjectReader::get_int(const std::string& key) { return as_int(at(key), path(key)); }
std::uint64_t ObjectReader::get_u64(const std::string& key) { return as_u64(at(key), path(key)); }
double ObjectReader::get_double(const std::string& key) { return as_double(at(key), path(key)); }

bool ObjectReader::get_bool(const std::string& key) {
  const json& v = at(key);
  if (!v.is_boolean()) throw ConfigError(path(key) + " must be true or false");
  return v.get<bool>();
}

std::string ObjectReader::get_string(const std::string& key) { return as_string(at(key), path(key)); }

std::vector<int> ObjectReader::get_int_list(const std::string& key) {
  return as_list<int>(at(key), path(key), as_int);
}
std::vector<std::uint64_t> ObjectReader::get_u64_list(const std::string& key) {
  return as_list<std::uint64_t>(at(key), path(key), as_u64);
}
std::vector<double> ObjectReader::get_double_list(const std::string& key) {
  return as_list<double>(at(key), path(key), as_double);
}
std::vector<std::string> ObjectReader::get_string_list(const std::string& key) {
  return as_list<std::string>(at(key), path(key), as_string);
}

void ObjectReader::finish() const {
  for (const auto& item : j_.items()) {
    if (!seen_.count(item.key())) throw ConfigError("unknown key " + where_ + "." + item.key());
  }
}

LoadedConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw ConfigError("config file not found: " + path.string());
  LoadedConfig c;
  try {
    c.root = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!c.root.is_object()) throw ConfigError("config root must be a JSON object");
  c.base_dir = std::filesystem::absolute(path).parent_path();
  // json keeps object keys sorted, so dump() is canonical for equal content.
  c.digest = digest(c.root.dump());
  return c;
}

std::uint64_t config_seed(const LoadedConfig& c) {
  if (!c.root.contains("seed")) return 1;
  return as_u64(c.root.at("seed"), "config.seed");
}

IsingParams read_model(const json& j, const std::string& where, bool need_hx) {
  ObjectReader r(j, where);
  IsingParams p;
  p.n = r.get_int("n");
  r.maybe("J", p.J, &ObjectReader::get_double);
  if (need_hx || r.has("h_x")) p.h_x = r.get_double("h_x");
  r.maybe("h_z", p.h_z, &ObjectReader::get_double);
  r.maybe("cyclic", p.cyclic, &ObjectReader::get_bool);
  r.finish();
  if (p.n < 2) throw ConfigError(where + ".n must be at least 2");
  if (!p.cyclic) throw ConfigError(where + ".cyclic: only the cyclic chain is supported");
  return p;
}

EstimatorConfig read_estimator(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  EstimatorConfig c;
  r.maybe("shots_per_term", c.shots_per_term, &ObjectReader::get_u64);
  r.maybe("assignments", c.assignments, &ObjectReader::get_int);
  r.maybe("rc_instances", c.rc_instances, &ObjectReader::get_int);
  r.maybe("readout_mitigation", c.readout_mitigation, &ObjectReader::get_bool);
  if (r.has("readout_mode")) {
    const std::string mode = r.get_string("readout_mode");
    if (mode == "tensored") {
      c.readout_mode = ReadoutMode::kTensored;
    } else if (mode == "formula") {
      c.readout_mode = ReadoutMode::kFormula;
    } else {
      throw ConfigError(r.path("readout_mode") + " must be \"tensored\" or \"formula\"");
    }
  }
  r.maybe("fold_scale", c.fold_scale, &ObjectReader::get_double);
  r.maybe("shots_per_trajectory", c.shots_per_trajectory, &ObjectReader::get_int);
  r.maybe("depolarizing_on", c.depolarizing_on, &ObjectReader::get_bool);
  r.maybe("readout_on", c.readout_on, &ObjectReader::get_bool);
  if (r.has("score")) {
    ObjectReader s(r.at("score"), r.path("score"));
    s.maybe("include_single_qubit", c.score.include_single_qubit, &ObjectReader::get_bool);
    s.maybe("include_readout", c.score.include_readout, &ObjectReader::get_bool);
    s.finish();
  }
  r.finish();
  c.validate();
  return c;
}

SpsaConfig read_spsa(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  SpsaConfig c;
  r.maybe("a", c.a, &ObjectReader::get_double);
  r.maybe("c", c.c, &ObjectReader::get_double);
  r.maybe("alpha", c.alpha, &ObjectReader::get_double);
  r.maybe("gamma", c.gamma, &ObjectReader::get_double);
  r.maybe("A", c.A, &ObjectReader::get_double);
  r.maybe("max_iter", c.max_iter, &ObjectReader::get_int);
  r.maybe("calib_evals", c.calib_evals, &ObjectReader::get_int);
  r.maybe("target_step", c.target_step, &ObjectReader::get_double);
  r.finish();
  c.validate();
  return c;
}

OptimizerSettings read_optimizer(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  OptimizerSettings o;
  r.maybe("restarts", o.restarts, &ObjectReader::get_int);
  r.maybe("first_sweeps", o.first_sweeps, &ObjectReader::get_int);
  r.maybe("warm_sweeps", o.warm_sweeps, &ObjectReader::get_int);
  r.maybe("seed", o.seed, &ObjectReader::get_u64);
  r.finish();
  o.validate();
  return o;
}

namespace {

// {"kind": "synthetic", "n", "seed"} | {"kind": "uniform", "n", "cnot",
// "sq", "e0", "e1"} | {"kind": "noiseless", "n"}.
DeviceModel inline_device(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  const std::string kind = r.get_string("kind");
  const int n = r.get_int("n");
  if (n < 2) throw ConfigError(where + ".n must be at least 2");
  DeviceModel d;
  if (kind == "synthetic") {
    d = synthetic_device(n, r.get_u64("seed"));
  } else if (kind == "uniform") {
    const double cnot = r.get_double("cnot");
    const double sq = r.get_double("sq");
    const double e0 = r.get_double("e0");
    const double e1 = r.get_double("e1");
    d = DeviceModel::uniform(n, cnot, sq, e0, e1);
  } else if (kind == "noiseless") {
    d = DeviceModel::noiseless(n);
  } else {
    throw ConfigError(where + ".kind must be synthetic, uniform or noiseless");
  }
  r.finish();
  d.validate();
  return d;
}

}  // namespace

DeviceModel read_device(ObjectReader& r, const std::filesystem::path& base_dir) {
  const json& entry = r.at("device");
  DeviceModel d;
  if (entry.is_string()) {
    std::filesystem::path p = entry.get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    if (!std::filesystem::is_regular_file(p)) throw ConfigError("device profile not found: " + p.string());
    d = load_device(p.string());
  } else {
    d = inline_device(entry, r.path("device"));
  }
  if (r.has("device_scale")) {
    ObjectReader s(r.at("device_scale"), r.path("device_scale"));
    double gate = 1.0, readout = 1.0;
    s.maybe("gate", gate, &ObjectReader::get_double);
    s.maybe("readout", readout, &ObjectReader::get_double);
    s.finish();
    if (gate < 0 || readout < 0) throw ConfigError(r.path("device_scale") + " factors must be non-negative");
    d = d.scaled(gate, readout);
  }
  return d;
}

GroundStateConfig parse_ground_state(const LoadedConfig& c) {
  ObjectReader r(c.root, "config");
  if (r.has("seed")) r.get_u64("seed");
  GroundStateConfig g;
  g.model = read_model(r.at("model"), "config.model", false);
  if (r.has("h_x")) {
    g.h_x = r.get_double_list("h_x");
  } else if (c.root.at("model").contains("h_x")) {
    g.h_x = {g.model.h_x};
  } else {
    throw ConfigError("config needs an h_x list or model.h_x");
  }
  if (g.h_x.empty()) throw ConfigError("config.h_x must not be empty");
  r.maybe("small_hz", g.small_hz, &ObjectReader::get_bool);
  r.finish();
  if (g.model.n > 24) throw ConfigError("config.model.n must be at most 24 for exact diagonalization");
  return g;
}

OptimizeConfig parse_optimize(const LoadedConfig& c) {
  ObjectReader r(c.root, "config");
  if (r.has("seed")) r.get_u64("seed");
  OptimizeConfig o;
  o.model = read_model(r.at("model"), "config.model", true);
  o.layers = r.get_int("layers");
  if (o.layers < 0) throw ConfigError("config.layers must be non-negative");
  r.maybe("symmetric", o.symmetric, &ObjectReader::get_bool);
  const std::string objective = r.has("objective") ? r.get_string("objective") : "noisy";
  if (objective != "noisy" && objective != "exact") {
    throw ConfigError("config.objective must be \"noisy\" or \"exact\"");
  }
  o.noisy = objective == "noisy";
  if (o.noisy) {
    o.device = read_device(r, c.base_dir);
    if (o.device->n_physical != o.model.n) {
      throw ConfigError("device has " + std::to_string(o.device->n_physical) + " qubits, model needs " +
                        std::to_string(o.model.n));
    }
  } else if (r.has("device") || r.has("device_scale")) {
    throw ConfigError("config.device is only used with the noisy objective");
  }
  if (r.has("estimator")) {
    if (!o.noisy) throw ConfigError("config.estimator is only used with the noisy objective");
    o.estimator = read_estimator(r.at("estimator"), "config.estimator");
  }
  if (r.has("spsa")) o.spsa = read_spsa(r.at("spsa"), "config.spsa");
  r.maybe("reference", o.reference, &ObjectReader::get_bool);
  r.finish();
  if (o.model.n > 24 || o.model.n % 2 != 0) throw ConfigError("config.model.n must be even and at most 24");
  return o;
}

BenchmarkCliConfig parse_benchmark(const LoadedConfig& c) {
  ObjectReader r(c.root, "config");
  BenchmarkCliConfig out;
  BenchmarkConfig& b = out.benchmark;
  if (r.has("seed")) b.seeds = {r.get_u64("seed")};
  if (r.has("seeds")) {
    if (c.root.contains("seed")) throw ConfigError("config sets both seed and seeds");
    b.seeds = r.get_u64_list("seeds");
  }
  b.model = read_model(r.at("model"), "config.model", true);
  r.maybe("symmetric", b.symmetric, &ObjectReader::get_bool);
  b.layers = r.get_int_list("layers");
  r.maybe("method_layers", b.method_layers, &ObjectReader::get_int_list);
  if (r.has("methods")) {
    b.methods.clear();
    for (const auto& m : r.get_string_list("methods")) b.methods.push_back(benchmark_method_from_string(m));
  }
  if (r.has("variants")) {
    b.variants.clear();
    for (const auto& v : r.get_string_list("variants")) b.variants.push_back(readout_variant_from_string(v));
  }
  r.maybe("pert_hx", b.pert_hx, &ObjectReader::get_double_list);
  r.maybe("zne_scales", b.zne_scales, &ObjectReader::get_double_list);
  r.maybe("depth_fit_max", b.depth_fit_max, &ObjectReader::get_int);
  r.maybe("noise_model_scale", b.noise_model_scale, &ObjectReader::get_double);
  if (r.has("estimator")) b.estimator = read_estimator(r.at("estimator"), "config.estimator");
  if (r.has("optimizer")) b.optimizer = read_optimizer(r.at("optimizer"), "config.optimizer");
  out.device = read_device(r, c.base_dir);
  if (r.has("cache_dir")) {
    out.cache_dir = r.get_string("cache_dir");
    if (out.cache_dir.is_relative()) out.cache_dir = c.base_dir / out.cache_dir;
  }
  r.finish();
  b.validate();
  if (out.device.n_physical != b.model.n) {
    throw ConfigError("device has " + std::to_string(out.device.n_physical) + " qubits, model needs " +
                      std::to_string(b.model.n));
  }
  return out;
}

ReadoutStudyConfig parse_readout_study(const LoadedConfig& c) {
  ObjectReader r(c.root, "config");
  if (r.has("seed")) r.get_u64("seed");
  ReadoutStudyConfig s;
  r.maybe("sizes", s.sizes, &ObjectReader::get_int_list);
  r.maybe("points", s.points, &ObjectReader::get_int);
  r.maybe("e0", s.e0, &ObjectReader::get_double);
  r.maybe("e1", s.e1, &ObjectReader::get_double);
  r.finish();
  if (s.sizes.empty()) throw ConfigError("config.sizes must not be empty");
  for (int n : s.sizes) {
    if (n < 1 || n > 20) throw ConfigError("config.sizes entries must lie in [1, 20]");
  }
  if (s.points < 2) throw ConfigError("config.points must be at least 2");
  if (!(s.e0 >= 0 && s.e0 < 0.5 && s.e1 >= 0 && s.e1 < 0.5)) {
    throw ConfigError("config.e0 and config.e1 must lie in [0, 0.5)");
  }
  return s;
}

}  // namespace mf::cli
