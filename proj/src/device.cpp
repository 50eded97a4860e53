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

#include "mitiq_forge/device.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "mitiq_forge/errors.hpp"
#include "mitiq_forge/util.hpp"

namespace mf {
namespace {

using json = nlohmann::json;

void check_rate(double p, const std::string& what) {
  if (!(p >= 0.0 && p < 0.5)) throw ConfigError(what + " must lie in [0, 0.5), got " + std::to_string(p));
}

std::string edge_key(int i, int n) { return std::to_string(i) + "-" + std::to_string((i + 1) % n); }

// Standard normal from two raw draws (Box-Muller); portable across platforms.
double gaussian(std::mt19937_64& rng) {
  const double u1 = 1.0 - unit_uniform(rng());
  const double u2 = unit_uniform(rng());
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<double> read_rates(const json& j, const char* key, int n) {
  if (!j.contains(key)) throw ConfigError(std::string("device profile lacks \"") + key + "\"");
  const json& arr = j.at(key);
  if (!arr.is_array() || static_cast<int>(arr.size()) != n) {
    throw ConfigError(std::string("\"") + key + "\" must be an array of length n");
  }
  std::vector<double> out;
  for (const json& v : arr) {
    if (!v.is_number()) throw ConfigError(std::string("\"") + key + "\" entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

double DeviceModel::cnot(int a, int b) const {
  const int n = n_physical;
  if (a < 0 || b < 0 || a >= n || b >= n) throw TopologyError("CNOT qubit outside the device");
  if ((a + 1) % n == b) return cnot_error[static_cast<std::size_t>(a)];
  if ((b + 1) % n == a) return cnot_error[static_cast<std::size_t>(b)];
  throw TopologyError("CNOT between non-neighbouring physical qubits " + std::to_string(a) +
                      " and " + std::to_string(b));
}

void DeviceModel::validate() const {
  if (n_physical < 3) throw ConfigError("device needs at least 3 qubits on the loop");
  const auto n = static_cast<std::size_t>(n_physical);
  if (cnot_error.size() != n || readout_e0.size() != n || readout_e1.size() != n ||
      sq_error.size() != n) {
    throw ConfigError("device rate lists must all have length n");
  }
  for (std::size_t i = 0; i < n; ++i) {
    check_rate(cnot_error[i], "cnot_error");
    check_rate(readout_e0[i], "readout_e0");
    check_rate(readout_e1[i], "readout_e1");
    check_rate(sq_error[i], "sq_error");
  }
}

DeviceModel DeviceModel::uniform(int n, double cnot_error, double sq_error, double e0, double e1) {
  const auto size = static_cast<std::size_t>(n);
  DeviceModel d{n,
                std::vector<double>(size, cnot_error),
                std::vector<double>(size, e0),
                std::vector<double>(size, e1),
                std::vector<double>(size, sq_error),
                "uniform"};
  d.validate();
  return d;
}

DeviceModel DeviceModel::scaled(double gate_factor, double readout_factor) const {
  DeviceModel d = *this;
  for (double& p : d.cnot_error) p *= gate_factor;
  for (double& p : d.sq_error) p *= gate_factor;
  for (double& p : d.readout_e0) p *= readout_factor;
  for (double& p : d.readout_e1) p *= readout_factor;
  d.validate();
  return d;
}

DeviceModel synthetic_device(int n, std::uint64_t seed, const SyntheticOptions& opts) {
  std::mt19937_64 rng(seed);
  auto draw = [&](double mean) {
    // Log-normal with the requested mean.
    const double s = opts.log_spread;
    return std::min(0.49, mean * std::exp(s * gaussian(rng) - 0.5 * s * s));
  };
  DeviceModel d;
  d.n_physical = n;
  for (int i = 0; i < n; ++i) d.cnot_error.push_back(draw(opts.cnot_mean));
  for (int i = 0; i < n; ++i) d.sq_error.push_back(draw(opts.cnot_mean * opts.sq_ratio));
  for (int i = 0; i < n; ++i) d.readout_e0.push_back(draw(opts.readout_e0_mean));
  for (int i = 0; i < n; ++i) d.readout_e1.push_back(draw(opts.readout_e1_mean));
  std::ostringstream os;
  os << "synthetic loop, seed " << seed << ", cnot mean " << opts.cnot_mean << ", sq ratio "
     << opts.sq_ratio << ", readout means " << opts.readout_e0_mean << "/" << opts.readout_e1_mean
     << ", log spread " << opts.log_spread;
  d.description = os.str();
  d.validate();
  return d;
}

std::string device_to_json(const DeviceModel& d) {
  json j = json::object();
  j["n"] = d.n_physical;
  if (!d.description.empty()) j["description"] = d.description;
  j["readout_e0"] = d.readout_e0;
  j["readout_e1"] = d.readout_e1;
  json edges = json::object();
  for (int i = 0; i < d.n_physical; ++i) edges[edge_key(i, d.n_physical)] = d.cnot_error[static_cast<std::size_t>(i)];
  j["cnot_error"] = edges;
  j["sq_error"] = d.sq_error;
  return j.dump(2) + "\n";
}

DeviceModel device_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("device profile is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("device profile must be a JSON object");
  static const std::vector<std::string> kKeys = {"n", "description", "readout_e0", "readout_e1",
                                                 "cnot_error", "sq_error"};
  for (const auto& item : j.items()) {
    if (std::find(kKeys.begin(), kKeys.end(), item.key()) == kKeys.end()) {
      throw ConfigError("unknown device profile key \"" + item.key() + "\"");
    }
  }
  if (!j.contains("n") || !j.at("n").is_number_integer()) throw ConfigError("device profile needs integer \"n\"");
  DeviceModel d;
  d.n_physical = j.at("n").get<int>();
  if (d.n_physical < 3) throw ConfigError("device needs at least 3 qubits on the loop");
  if (j.contains("description")) d.description = j.at("description").get<std::string>();
  d.readout_e0 = read_rates(j, "readout_e0", d.n_physical);
  d.readout_e1 = read_rates(j, "readout_e1", d.n_physical);
  d.sq_error = read_rates(j, "sq_error", d.n_physical);
  if (!j.contains("cnot_error") || !j.at("cnot_error").is_object()) {
    throw ConfigError("device profile needs a \"cnot_error\" object");
  }
  const json& edges = j.at("cnot_error");
  d.cnot_error.assign(static_cast<std::size_t>(d.n_physical), -1.0);
  for (const auto& item : edges.items()) {
    int a = -1, b = -1;
    char dash = 0;
    std::istringstream is(item.key());
    if (!(is >> a >> dash >> b) || dash != '-' || !is.eof()) {
      throw ConfigError("bad cnot_error key \"" + item.key() + "\"");
    }
    const int n = d.n_physical;
    int edge = -1;
    if (a >= 0 && b >= 0 && a < n && b < n) {
      if ((a + 1) % n == b) edge = a;
      else if ((b + 1) % n == a) edge = b;
    }
    if (edge < 0) throw ConfigError("cnot_error key \"" + item.key() + "\" is not a loop edge");
    if (!item.value().is_number()) throw ConfigError("cnot_error values must be numbers");
    d.cnot_error[static_cast<std::size_t>(edge)] = item.value().get<double>();
  }
  for (int i = 0; i < d.n_physical; ++i) {
    if (d.cnot_error[static_cast<std::size_t>(i)] < 0.0) {
      throw ConfigError("cnot_error missing edge " + edge_key(i, d.n_physical));
    }
  }
  d.validate();
  return d;
}

DeviceModel load_device(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open device profile " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return device_from_json(buf.str());
}

void save_device(const DeviceModel& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write device profile " + path);
  out << device_to_json(d);
}

std::string device_digest(const DeviceModel& d) { return digest(device_to_json(d)); }

double score_assignment(const DeviceModel& d, const Circuit& c, const QubitAssignment& a,
                        std::span<const int> labels, const ScoreOptions& opts) {
  if (static_cast<int>(a.mapping.size()) != d.n_physical) {
    throw TopologyError("assignment loop size differs from the device");
  }
  const std::vector<int> phys = physical_layout(labels, a, c.n_qubits());
  auto at = [&](int q) { return phys[static_cast<std::size_t>(q)]; };
  double score = 1.0;
  for (const Gate& g : c.gates()) {
    switch (g.kind) {
      case GateKind::kCnot:
        score *= 1.0 - d.cnot(at(g.qubit), at(g.target));
        break;
      case GateKind::kSx:
        if (opts.include_single_qubit) score *= 1.0 - d.sq_error[static_cast<std::size_t>(at(g.qubit))];
        break;
      case GateKind::kRy:
        if (opts.include_single_qubit) {
          const double f = 1.0 - d.sq_error[static_cast<std::size_t>(at(g.qubit))];
          score *= f * f;
        }
        break;
      default:
        break;
    }
  }
  if (opts.include_readout) {
    for (int q : c.measured()) {
      const auto p = static_cast<std::size_t>(at(q));
      score *= 1.0 - 0.5 * (d.readout_e0[p] + d.readout_e1[p]);
    }
  }
  return score;
}

std::vector<QubitAssignment> select_assignments(const DeviceModel& d, const Circuit& c, int count,
                                                std::span<const int> labels,
                                                const ScoreOptions& opts) {
  if (count < 1 || count > 2 * d.n_physical) {
    throw DomainError("assignment count must lie in [1, 2n]");
  }
  std::vector<QubitAssignment> all = enumerate_assignments(d.n_physical);
  std::vector<double> scores;
  scores.reserve(all.size());
  for (const auto& a : all) scores.push_back(score_assignment(d, c, a, labels, opts));
  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return scores[x] > scores[y]; });
  std::vector<QubitAssignment> out;
  for (int k = 0; k < count; ++k) out.push_back(all[order[static_cast<std::size_t>(k)]]);
  return out;
}

}  // namespace mf
