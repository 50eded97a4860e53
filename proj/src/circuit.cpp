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

#include "mitiq_forge/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "mitiq_forge/errors.hpp"

namespace mf {
namespace {

constexpr double kPi = std::numbers::pi;

int wrap(int i, int n) { return ((i % n) + n) % n; }

// Symplectic bits of a Pauli letter.
struct PauliBits {
  bool x = false, z = false;
};

PauliBits bits_of(char p) {
  switch (p) {
    case 'X': return {true, false};
    case 'Y': return {true, true};
    case 'Z': return {false, true};
    default: return {false, false};
  }
}

char letter_of(PauliBits b) {
  if (b.x && b.z) return 'Y';
  if (b.x) return 'X';
  if (b.z) return 'Z';
  return 'I';
}

char gate_letter(GateKind k) {
  switch (k) {
    case GateKind::kX: return 'X';
    case GateKind::kY: return 'Y';
    case GateKind::kZ: return 'Z';
    default: return 'I';
  }
}

}  // namespace

Gate Gate::pauli(int q, char pauli) {
  switch (pauli) {
    case 'X': return {GateKind::kX, q, -1, 0.0};
    case 'Y': return {GateKind::kY, q, -1, 0.0};
    case 'Z': return {GateKind::kZ, q, -1, 0.0};
    default: throw DomainError(std::string("unknown Pauli letter '") + pauli + "'");
  }
}

Circuit::Circuit(int n_qubits, std::vector<Gate> gates, std::vector<int> measured)
    : n_qubits_(n_qubits), gates_(std::move(gates)), measured_(std::move(measured)) {
  if (n_qubits_ < 1) throw DomainError("circuit needs at least one qubit");
  auto in_range = [&](int q) { return q >= 0 && q < n_qubits_; };
  for (std::size_t i = 0; i < gates_.size(); ++i) {
    const Gate& g = gates_[i];
    if (!in_range(g.qubit) || (g.is_cnot() && !in_range(g.target))) {
      throw DomainError("gate " + std::to_string(i) + " acts outside the register");
    }
    if (g.is_cnot() && g.qubit == g.target) {
      throw DomainError("gate " + std::to_string(i) + ": CNOT control equals target");
    }
  }
  std::vector<bool> seen(static_cast<std::size_t>(n_qubits_), false);
  for (int q : measured_) {
    if (!in_range(q)) throw DomainError("measured qubit out of range");
    if (seen[static_cast<std::size_t>(q)]) throw DomainError("measured qubits must be distinct");
    seen[static_cast<std::size_t>(q)] = true;
  }
}

std::size_t Circuit::count(GateKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(gates_.begin(), gates_.end(), [&](const Gate& g) { return g.kind == kind; }));
}

Circuit Circuit::with_measured(std::vector<int> measured) const {
  return Circuit(n_qubits_, gates_, std::move(measured));
}

bool is_loop_local(const Circuit& c) {
  const int n = c.n_qubits();
  return std::all_of(c.gates().begin(), c.gates().end(), [&](const Gate& g) {
    if (!g.is_cnot()) return true;
    return wrap(g.qubit - g.target, n) == 1 || wrap(g.target - g.qubit, n) == 1;
  });
}

AnsatzParams AnsatzParams::zeros(int n, int layers, bool symmetric) {
  AnsatzParams p;
  p.layers = layers;
  p.symmetric = symmetric;
  p.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(expected_size(n, layers, symmetric)));
  return p;
}

QubitAssignment QubitAssignment::make(int n, int rotation, bool reflected) {
  QubitAssignment a;
  a.rotation = wrap(rotation, n);
  a.reflected = reflected;
  a.mapping.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    a.mapping[static_cast<std::size_t>(i)] =
        reflected ? wrap(a.rotation - i, n) : wrap(i + a.rotation, n);
  }
  return a;
}

Circuit build_alt_ansatz(int n, const AnsatzParams& params) {
  if (n < 2 || n % 2 != 0) {
    throw TopologyError("ALT ansatz needs an even loop with n >= 2, got " + std::to_string(n));
  }
  if (params.layers < 0) throw ShapeError("negative layer count");
  const std::size_t want = AnsatzParams::expected_size(n, params.layers, params.symmetric);
  if (static_cast<std::size_t>(params.values.size()) != want) {
    throw ShapeError("expected " + std::to_string(want) + " angles for n=" + std::to_string(n) +
                     ", l=" + std::to_string(params.layers) +
                     (params.symmetric ? " (symmetric)" : " (full)") + ", got " +
                     std::to_string(params.values.size()));
  }
  std::vector<Gate> gates;
  gates.reserve(static_cast<std::size_t>(n * (params.layers + 1) + n / 2 * params.layers));
  for (int q = 0; q < n; ++q) gates.push_back(Gate::ry(q, params.angle(n, 0, q)));
  for (int k = 1; k <= params.layers; ++k) {
    const int offset = (k % 2 == 1) ? 0 : 1;
    for (int q = offset; q < n + offset; q += 2) gates.push_back(Gate::cnot(wrap(q, n), wrap(q + 1, n)));
    for (int q = 0; q < n; ++q) gates.push_back(Gate::ry(q, params.angle(n, k, q)));
  }
  std::vector<int> measured(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) measured[static_cast<std::size_t>(q)] = q;
  return Circuit(n, std::move(gates), std::move(measured));
}

AnsatzParams expand_symmetric(const AnsatzParams& params, int n) {
  if (!params.symmetric) throw PreconditionError("parameters are already in full layout");
  if (static_cast<std::size_t>(params.values.size()) !=
      AnsatzParams::expected_size(n, params.layers, true)) {
    throw ShapeError("symmetric parameter length mismatch");
  }
  AnsatzParams full = AnsatzParams::zeros(n, params.layers, false);
  for (int k = 0; k <= params.layers; ++k) {
    for (int q = 0; q < n; ++q) full.values[k * n + q] = params.angle(n, k, q);
  }
  return full;
}

Circuit decompose_to_basis(const Circuit& c) {
  const auto& in = c.gates();
  std::vector<bool> consumed(in.size(), false);
  std::vector<Gate> out;
  out.reserve(in.size() * 4);
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (consumed[i]) continue;
    const Gate& g = in[i];
    switch (g.kind) {
      case GateKind::kRy: {
        std::size_t next = i + 1;
        while (next < in.size() && !in[next].touches(g.qubit)) ++next;
        const bool merge = next < in.size() && in[next].kind == GateKind::kH;
        const int q = g.qubit;
        if (merge) {
          consumed[next] = true;
          out.push_back(Gate::rz(q, -kPi));
          out.push_back(Gate::sx(q));
          out.push_back(Gate::rz(q, 1.5 * kPi - g.angle));
          out.push_back(Gate::sx(q));
          out.push_back(Gate::rz(q, kPi));
        } else {
          out.push_back(Gate::sx(q));
          out.push_back(Gate::rz(q, kPi + g.angle));
          out.push_back(Gate::sx(q));
          out.push_back(Gate::rz(q, kPi));
        }
        break;
      }
      case GateKind::kH:
        throw DecompositionError(i, "H must directly follow an RY on the same qubit");
      default:
        out.push_back(g);
    }
  }
  return Circuit(c.n_qubits(), std::move(out), c.measured());
}

FilteredCircuit light_cone_slice(const Circuit& c, std::span<const int> observable) {
  const int n = c.n_qubits();
  if (observable.empty()) throw DomainError("light cone of an empty observable");
  std::vector<bool> in_cone(static_cast<std::size_t>(n), false);
  for (int q : observable) {
    if (q < 0 || q >= n) throw DomainError("observable qubit out of range");
    in_cone[static_cast<std::size_t>(q)] = true;
  }
  const auto& gates = c.gates();
  std::vector<bool> keep(gates.size(), false);
  for (std::size_t i = gates.size(); i-- > 0;) {
    const Gate& g = gates[i];
    auto hit = [&](int q) { return in_cone[static_cast<std::size_t>(q)]; };
    if (g.is_cnot()) {
      if (hit(g.qubit) || hit(g.target)) {
        keep[i] = true;
        in_cone[static_cast<std::size_t>(g.qubit)] = true;
        in_cone[static_cast<std::size_t>(g.target)] = true;
      }
    } else if (hit(g.qubit)) {
      keep[i] = true;
    }
  }

  // Loop order starting just after a qubit outside the cone, so a contiguous
  // arc keeps its neighbours adjacent after relabeling.
  int start = 0;
  for (int q = 0; q < n; ++q) {
    if (!in_cone[static_cast<std::size_t>(q)]) {
      start = wrap(q + 1, n);
      break;
    }
  }
  std::vector<int> labels;
  std::vector<int> compact(static_cast<std::size_t>(n), -1);
  for (int s = 0; s < n; ++s) {
    const int q = wrap(start + s, n);
    if (in_cone[static_cast<std::size_t>(q)]) {
      compact[static_cast<std::size_t>(q)] = static_cast<int>(labels.size());
      labels.push_back(q);
    }
  }
  std::vector<Gate> out;
  for (std::size_t i = 0; i < gates.size(); ++i) {
    if (!keep[i]) continue;
    Gate g = gates[i];
    g.qubit = compact[static_cast<std::size_t>(g.qubit)];
    if (g.is_cnot()) g.target = compact[static_cast<std::size_t>(g.target)];
    out.push_back(g);
  }
  std::vector<int> measured;
  for (int q : observable) measured.push_back(compact[static_cast<std::size_t>(q)]);
  return {Circuit(static_cast<int>(labels.size()), std::move(out), std::move(measured)),
          std::move(labels)};
}

Circuit light_cone_filter(const Circuit& c, std::span<const int> observable) {
  return light_cone_slice(c, observable).circuit;
}

Circuit fold_cnots(const Circuit& c, double scale, std::uint64_t seed) {
  if (!(scale >= 1.0)) throw DomainError("fold scale must be >= 1");
  int base = static_cast<int>(std::floor(scale));
  if (base % 2 == 0) --base;
  const double extra_prob = (scale - base) / 2.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Gate> out;
  out.reserve(c.gates().size() + c.count(GateKind::kCnot) * static_cast<std::size_t>(base + 1));
  for (const Gate& g : c.gates()) {
    if (!g.is_cnot()) {
      out.push_back(g);
      continue;
    }
    int reps = base;
    if (extra_prob > 0.0 && unif(rng) < extra_prob) reps += 2;
    for (int r = 0; r < reps; ++r) out.push_back(g);
  }
  return Circuit(c.n_qubits(), std::move(out), c.measured());
}

CnotDressing dress_cnot(char control_pauli, char target_pauli) {
  const PauliBits a = bits_of(control_pauli), b = bits_of(target_pauli);
  // CNOT conjugation: X_c -> X_c X_t, Z_t -> Z_c Z_t.
  const PauliBits ac{a.x, a.z != b.z};
  const PauliBits bc{b.x != a.x, b.z};
  return {letter_of(a), letter_of(b), letter_of(ac), letter_of(bc)};
}

Circuit randomized_compile(const Circuit& c, std::uint64_t seed) {
  static constexpr char kLetters[4] = {'I', 'X', 'Y', 'Z'};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, 15);
  std::vector<Gate> out;
  out.reserve(c.gates().size() * 2);
  auto emit = [&](int q, char p) {
    if (p != 'I') out.push_back(Gate::pauli(q, p));
  };
  for (const Gate& g : c.gates()) {
    if (!g.is_cnot()) {
      out.push_back(g);
      continue;
    }
    const int draw = pick(rng);
    const CnotDressing d = dress_cnot(kLetters[draw / 4], kLetters[draw % 4]);
    emit(g.qubit, d.before_control);
    emit(g.target, d.before_target);
    out.push_back(g);
    emit(g.qubit, d.after_control);
    emit(g.target, d.after_target);
  }
  return Circuit(c.n_qubits(), std::move(out), c.measured());
}

std::vector<QubitAssignment> enumerate_assignments(int n) {
  if (n < 3) throw TopologyError("assignments need a loop of at least 3 qubits");
  std::vector<QubitAssignment> out;
  out.reserve(static_cast<std::size_t>(2 * n));
  for (int r = 0; r < n; ++r) {
    out.push_back(QubitAssignment::make(n, r, false));
    out.push_back(QubitAssignment::make(n, r, true));
  }
  return out;
}

std::vector<int> physical_layout(std::span<const int> labels, const QubitAssignment& a,
                                 int n_circuit_qubits) {
  std::vector<int> out(static_cast<std::size_t>(n_circuit_qubits));
  for (int q = 0; q < n_circuit_qubits; ++q) {
    const int logical = labels.empty() ? q : labels[static_cast<std::size_t>(q)];
    if (logical < 0 || static_cast<std::size_t>(logical) >= a.mapping.size()) {
      throw TopologyError("circuit qubit does not fit the assignment loop");
    }
    out[static_cast<std::size_t>(q)] = a.mapping[static_cast<std::size_t>(logical)];
  }
  return out;
}

std::string to_text(const Circuit& c) {
  std::ostringstream os;
  os << "qubits " << c.n_qubits() << "; measured ";
  for (std::size_t i = 0; i < c.measured().size(); ++i) os << (i ? "," : "") << c.measured()[i];
  os << '\n';
  char buf[64];
  for (const Gate& g : c.gates()) {
    switch (g.kind) {
      case GateKind::kCnot: os << "CNOT " << g.qubit << ' ' << g.target << '\n'; break;
      case GateKind::kRy:
      case GateKind::kRz:
        std::snprintf(buf, sizeof(buf), "%.17g", g.angle);
        os << (g.kind == GateKind::kRy ? "RY " : "RZ ") << g.qubit << ' ' << buf << '\n';
        break;
      case GateKind::kSx: os << "SX " << g.qubit << '\n'; break;
      case GateKind::kH: os << "H " << g.qubit << '\n'; break;
      default: os << gate_letter(g.kind) << ' ' << g.qubit << '\n';
    }
  }
  return os.str();
}

Circuit parse_circuit(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int n = -1;
  std::vector<int> measured;
  std::vector<Gate> gates;
  int line_no = 0;
  auto fail = [&](const std::string& why) {
    throw DomainError("circuit text line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string op;
    if (!(ls >> op)) continue;
    if (n < 0) {
      if (op != "qubits") fail("expected header 'qubits n; measured ...'");
      std::string rest;
      std::getline(ls, rest);
      const auto semi = rest.find(';');
      if (semi == std::string::npos) fail("header missing ';'");
      try {
        n = std::stoi(rest.substr(0, semi));
      } catch (const std::exception&) {
        fail("bad qubit count");
      }
      std::string tail = rest.substr(semi + 1);
      std::istringstream ts(tail);
      std::string word, list;
      ts >> word;
      if (word != "measured") fail("header missing 'measured'");
      std::getline(ts, list);
      std::replace(list.begin(), list.end(), ',', ' ');
      std::istringstream qs(list);
      int q;
      while (qs >> q) measured.push_back(q);
      if (!qs.eof()) fail("bad measured list");
      continue;
    }
    int a = 0, b = 0;
    double theta = 0.0;
    if (op == "CNOT") {
      if (!(ls >> a >> b)) fail("CNOT needs two qubits");
      gates.push_back(Gate::cnot(a, b));
    } else if (op == "RY" || op == "RZ") {
      if (!(ls >> a >> theta)) fail(op + " needs a qubit and an angle");
      gates.push_back(op == "RY" ? Gate::ry(a, theta) : Gate::rz(a, theta));
    } else if (op == "SX" || op == "H" || op == "X" || op == "Y" || op == "Z") {
      if (!(ls >> a)) fail(op + " needs a qubit");
      if (op == "SX") gates.push_back(Gate::sx(a));
      else if (op == "H") gates.push_back(Gate::h(a));
      else gates.push_back(Gate::pauli(a, op[0]));
    } else {
      fail("unknown gate '" + op + "'");
    }
    std::string junk;
    if (ls >> junk) fail("trailing tokens");
  }
  if (n < 0) throw DomainError("circuit text has no header");
  return Circuit(n, std::move(gates), std::move(measured));
}

}  // namespace mf
