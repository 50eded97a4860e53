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

#include "mitiq_forge/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include <json.hpp>

#include "mitiq_forge/errors.hpp"
#include "mitiq_forge/util.hpp"

namespace mf {
namespace {

using cd = std::complex<double>;
using M2 = Mat2<cd>;

constexpr int kMaxQubits = 26;
constexpr std::size_t kCheckpointBytes = std::size_t(256) << 20;
// More checkpoints cost more copying than they save in replay.
constexpr std::size_t kMaxCheckpoints = 48;

bool is_real_gate(const Gate& g) {
  switch (g.kind) {
    case GateKind::kCnot:
    case GateKind::kRy:
    case GateKind::kH:
    case GateKind::kX:
    case GateKind::kZ:
      return true;
    default:
      return false;
  }
}

Mat2<double> real_gate_matrix(const Gate& g) {
  Mat2<double> m;
  switch (g.kind) {
    case GateKind::kRy: {
      const double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
      m << c, -s, s, c;
      break;
    }
    case GateKind::kH: {
      constexpr double r = std::numbers::sqrt2 / 2;
      m << r, r, r, -r;
      break;
    }
    case GateKind::kX: m << 0, 1, 1, 0; break;
    case GateKind::kZ: m << 1, 0, 0, -1; break;
    default: throw DomainError("gate has no real matrix");
  }
  return m;
}

// Gates between consecutive CNOTs on one qubit, fused into a single matrix.
struct Slot {
  int qubit = 0;
  std::vector<std::size_t> gates;  // indices into the circuit
  std::size_t op = 0;              // position in Program::ops
};

struct Op {
  bool is_cnot = false;
  int control = 0, target = 0;  // CNOT operands
  std::size_t slot = 0;         // for single-qubit ops
};

// Circuit compiled to fused single-qubit slots and CNOTs.
struct Program {
  int n = 0;
  std::vector<Op> ops;
  std::vector<Slot> slots;
  std::vector<M2> slot_matrix;
  std::vector<bool> slot_identity;
  std::vector<std::size_t> gate_slot;       // 1q gate -> its slot
  std::vector<std::size_t> cnot_op;         // CNOT gate -> its op
  std::vector<std::size_t> next_slot_ctrl;  // CNOT gate -> slot opened after it
  std::vector<std::size_t> next_slot_tgt;
};

Program compile(const Circuit& c) {
  Program p;
  p.n = c.n_qubits();
  const auto& gates = c.gates();
  p.gate_slot.assign(gates.size(), 0);
  p.cnot_op.assign(gates.size(), 0);
  p.next_slot_ctrl.assign(gates.size(), 0);
  p.next_slot_tgt.assign(gates.size(), 0);
  std::vector<std::size_t> open(static_cast<std::size_t>(p.n));
  auto open_slot = [&](int q) {
    p.slots.push_back({q, {}, 0});
    open[static_cast<std::size_t>(q)] = p.slots.size() - 1;
    return p.slots.size() - 1;
  };
  auto close_slot = [&](int q) {
    const std::size_t s = open[static_cast<std::size_t>(q)];
    p.slots[s].op = p.ops.size();
    p.ops.push_back({false, 0, 0, s});
  };
  for (int q = 0; q < p.n; ++q) open_slot(q);
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const Gate& g = gates[i];
    if (g.is_cnot()) {
      close_slot(g.qubit);
      close_slot(g.target);
      p.cnot_op[i] = p.ops.size();
      p.ops.push_back({true, g.qubit, g.target, 0});
      p.next_slot_ctrl[i] = open_slot(g.qubit);
      p.next_slot_tgt[i] = open_slot(g.target);
    } else {
      const std::size_t s = open[static_cast<std::size_t>(g.qubit)];
      p.slots[s].gates.push_back(i);
      p.gate_slot[i] = s;
    }
  }
  for (int q = 0; q < p.n; ++q) close_slot(q);
  for (const Slot& s : p.slots) {
    M2 m = M2::Identity();
    for (std::size_t gi : s.gates) m = gate_matrix(gates[gi]) * m;
    p.slot_matrix.push_back(m);
    p.slot_identity.push_back(s.gates.empty());
  }
  return p;
}

template <typename Amp>
void run_ops(const Program& p, Eigen::Matrix<Amp, Eigen::Dynamic, 1>& psi, std::size_t begin,
             std::size_t end, const std::vector<Mat2<Amp>>& matrices,
             const std::vector<bool>& skip) {
  for (std::size_t k = begin; k < end; ++k) {
    const Op& op = p.ops[k];
    if (op.is_cnot) {
      kernels::apply_cnot(psi, op.control, op.target);
    } else if (!skip[op.slot]) {
      kernels::apply_1q(psi, p.slots[op.slot].qubit, matrices[op.slot]);
    }
  }
}

void check_size(int n) {
  if (n > kMaxQubits) throw CapacityError("statevector simulation is limited to 26 qubits");
}

Eigen::VectorXd real_state(const Circuit& c) {
  check_size(c.n_qubits());
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(Eigen::Index(1) << c.n_qubits());
  psi[0] = 1.0;
  // Fuse runs of single-qubit gates per qubit before each CNOT.
  std::vector<Mat2<double>> pending(static_cast<std::size_t>(c.n_qubits()), Mat2<double>::Identity());
  std::vector<bool> dirty(static_cast<std::size_t>(c.n_qubits()), false);
  auto flush = [&](int q) {
    const auto k = static_cast<std::size_t>(q);
    if (!dirty[k]) return;
    kernels::apply_1q(psi, q, pending[k]);
    pending[k].setIdentity();
    dirty[k] = false;
  };
  for (const Gate& g : c.gates()) {
    if (g.is_cnot()) {
      flush(g.qubit);
      flush(g.target);
      kernels::apply_cnot(psi, g.qubit, g.target);
    } else {
      const auto k = static_cast<std::size_t>(g.qubit);
      pending[k] = real_gate_matrix(g) * pending[k];
      dirty[k] = true;
    }
  }
  for (int q = 0; q < c.n_qubits(); ++q) flush(q);
  return psi;
}

template <typename Vec>
double expectation_impl(const Vec& psi, const PauliTerm& t) {
  const Eigen::Index dim = psi.size();
  if (t.kind == PauliKind::kX) {
    const Eigen::Index bit = Eigen::Index(1) << t.support.at(0);
    double acc = 0.0;
    for (Eigen::Index x = 0; x < dim; ++x) {
      if (x & bit) continue;
      acc += 2.0 * std::real(std::conj(psi[x]) * psi[x | bit]);
    }
    return acc;
  }
  Eigen::Index mask = 0;
  for (int q : t.support) mask |= Eigen::Index(1) << q;
  double acc = 0.0;
  for (Eigen::Index x = 0; x < dim; ++x) {
    const double w = std::norm(psi[x]);
    acc += (std::popcount(static_cast<std::uint64_t>(x & mask)) & 1) ? -w : w;
  }
  return acc;
}

void check_support(const PauliTerm& t, int n) {
  if (t.support.empty()) throw SupportError("term has empty support");
  for (int q : t.support) {
    if (q < 0 || q >= n) throw SupportError("term " + describe(t) + " is not supported on the circuit");
  }
}

std::string bits_key(std::uint64_t outcome, std::size_t m) {
  std::string key(m, '0');
  for (std::size_t k = 0; k < m; ++k) {
    if ((outcome >> k) & 1) key[k] = '1';
  }
  return key;
}

}  // namespace

Mat2<cd> pauli_matrix(char pauli) {
  M2 m;
  const cd i(0, 1);
  switch (pauli) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m.setIdentity(); break;
  }
  return m;
}

Mat2<cd> gate_matrix(const Gate& g) {
  const cd i(0, 1);
  M2 m;
  switch (g.kind) {
    case GateKind::kRy:
    case GateKind::kH:
      return real_gate_matrix(g).cast<cd>();
    case GateKind::kRz:
      m << std::exp(-i * (g.angle / 2)), 0, 0, std::exp(i * (g.angle / 2));
      return m;
    case GateKind::kSx:
      m << cd(0.5, 0.5), cd(0.5, -0.5), cd(0.5, -0.5), cd(0.5, 0.5);
      return m;
    case GateKind::kX: return pauli_matrix('X');
    case GateKind::kY: return pauli_matrix('Y');
    case GateKind::kZ: return pauli_matrix('Z');
    case GateKind::kCnot: break;
  }
  throw DomainError("CNOT has no single-qubit matrix");
}

StateVector<double> exact_state(const Circuit& c) {
  check_size(c.n_qubits());
  const Program p = compile(c);
  StateVector<double> psi = StateVector<double>::Zero(Eigen::Index(1) << c.n_qubits());
  psi[0] = 1.0;
  run_ops(p, psi, 0, p.ops.size(), p.slot_matrix, p.slot_identity);
  return psi;
}

double state_expectation(const StateVector<double>& psi, const PauliTerm& t) {
  const int n = static_cast<int>(std::lround(std::log2(static_cast<double>(psi.size()))));
  check_support(t, n);
  return expectation_impl(psi, t);
}

double exact_expectation(const Circuit& c, const PauliTerm& t) {
  check_support(t, c.n_qubits());
  const bool real = std::all_of(c.gates().begin(), c.gates().end(), is_real_gate);
  if (real) return expectation_impl(real_state(c), t);
  return expectation_impl(exact_state(c), t);
}

double circuit_energy(const Circuit& c, const std::vector<PauliTerm>& terms) {
  for (const auto& t : terms) check_support(t, c.n_qubits());
  auto sum = [&](const auto& psi) {
    double e = 0.0;
    for (const auto& t : terms) {
      if (t.coefficient != 0.0) e += t.coefficient * expectation_impl(psi, t);
    }
    return e;
  };
  if (std::all_of(c.gates().begin(), c.gates().end(), is_real_gate)) return sum(real_state(c));
  return sum(exact_state(c));
}

void ShotTable::merge(const ShotTable& other) {
  if (shots == 0 && counts.empty()) measured = other.measured;
  if (other.measured != measured) throw DomainError("cannot merge shot tables over different qubits");
  for (const auto& [key, k] : other.counts) counts[key] += k;
  shots += other.shots;
}

std::string shots_to_json(const ShotTable& s) {
  nlohmann::json j;
  j["shots"] = s.shots;
  j["measured"] = s.measured;
  j["counts"] = s.counts;
  return j.dump();
}

ShotTable shots_from_json(const std::string& text) {
  ShotTable s;
  try {
    const auto j = nlohmann::json::parse(text);
    s.shots = j.at("shots").get<std::uint64_t>();
    s.measured = j.at("measured").get<std::vector<int>>();
    s.counts = j.at("counts").get<std::map<std::string, std::uint64_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad shot table: ") + e.what());
  }
  std::uint64_t total = 0;
  for (const auto& [key, k] : s.counts) {
    if (key.size() != s.measured.size()) throw ConfigError("shot table key length mismatch");
    total += k;
  }
  if (total != s.shots) throw ConfigError("shot table counts do not sum to shots");
  return s;
}

namespace {

// Outcome indices per trajectory; bit k of an outcome is measured[k].
std::vector<std::vector<std::uint64_t>> sample_outcomes(const Circuit& c, const NoiseConfig& nc,
                                                        std::uint64_t shots) {
  const int n = c.n_qubits();
  check_size(n);
  if (c.measured().empty()) throw PreconditionError("no measured qubits");
  if (nc.shots_per_trajectory < 1) throw DomainError("shots_per_trajectory must be >= 1");
  const auto& gates = c.gates();
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const GateKind k = gates[i].kind;
    if (k == GateKind::kRy || k == GateKind::kH) {
      throw PreconditionError("sample_noisy needs a circuit decomposed to CNOT/RZ/SX (gate " +
                              std::to_string(i) + ")");
    }
  }
  const std::size_t m = c.measured().size();
  if (m > 24) throw CapacityError("at most 24 measured qubits");

  const std::vector<int> phys = physical_layout(nc.labels, nc.assignment, n);
  const DeviceModel& d = nc.device;
  // Noisy locations and their probabilities.
  std::vector<std::pair<std::size_t, double>> noisy;
  if (nc.depolarizing_on) {
    for (std::size_t i = 0; i < gates.size(); ++i) {
      const Gate& g = gates[i];
      double p = 0.0;
      if (g.is_cnot()) {
        p = d.cnot(phys[static_cast<std::size_t>(g.qubit)], phys[static_cast<std::size_t>(g.target)]);
      } else if (g.kind == GateKind::kSx) {
        p = d.sq_error[static_cast<std::size_t>(phys[static_cast<std::size_t>(g.qubit)])];
      }
      if (p > 0.0) noisy.emplace_back(i, p);
    }
  }
  std::vector<double> e0(m, 0.0), e1(m, 0.0);
  if (nc.readout_on) {
    for (std::size_t k = 0; k < m; ++k) {
      const auto q = static_cast<std::size_t>(phys[static_cast<std::size_t>(c.measured()[k])]);
      e0[k] = d.readout_e0[q];
      e1[k] = d.readout_e1[q];
    }
  }

  const Program prog = compile(c);
  const Eigen::Index dim = Eigen::Index(1) << n;
  const std::size_t n_ops = prog.ops.size();
  const std::size_t state_bytes = static_cast<std::size_t>(dim) * sizeof(cd);
  const std::size_t max_states = std::clamp<std::size_t>(kCheckpointBytes / state_bytes, 1, kMaxCheckpoints);
  const std::size_t stride = noisy.empty() ? n_ops + 1 : std::max<std::size_t>(1, (n_ops + max_states - 1) / max_states);

  // Noiseless checkpoints: checkpoints[j] is the state before op j * stride.
  std::vector<StateVector<double>> checkpoints;
  StateVector<double> psi = StateVector<double>::Zero(dim);
  psi[0] = 1.0;
  for (std::size_t k = 0; k < n_ops; ++k) {
    if (k % stride == 0) checkpoints.push_back(psi);
    run_ops(prog, psi, k, k + 1, prog.slot_matrix, prog.slot_identity);
  }

  const std::uint64_t outcomes = std::uint64_t(1) << m;
  std::vector<std::uint64_t> outcome_bit(m);
  for (std::size_t k = 0; k < m; ++k) outcome_bit[k] = std::uint64_t(1) << c.measured()[k];
  auto marginal_cdf = [&](const StateVector<double>& state) {
    std::vector<double> prob(outcomes, 0.0);
    for (Eigen::Index x = 0; x < dim; ++x) {
      std::uint64_t o = 0;
      for (std::size_t k = 0; k < m; ++k) {
        if (static_cast<std::uint64_t>(x) & outcome_bit[k]) o |= std::uint64_t(1) << k;
      }
      prob[o] += std::norm(state[x]);
    }
    for (std::uint64_t o = 1; o < outcomes; ++o) prob[o] += prob[o - 1];
    return prob;
  };
  const std::vector<double> clean_cdf = marginal_cdf(psi);

  const std::uint64_t spt = static_cast<std::uint64_t>(nc.shots_per_trajectory);
  const std::uint64_t n_traj = (shots + spt - 1) / spt;
  const std::size_t chunks = static_cast<std::size_t>(
      std::min<std::uint64_t>(n_traj, static_cast<std::uint64_t>(thread_count())));
  std::vector<std::vector<std::uint64_t>> result(n_traj);

  parallel_for(chunks, [&](std::size_t chunk) {
    StateVector<double> work(dim);
    std::vector<M2> matrices = prog.slot_matrix;
    std::vector<bool> skip = prog.slot_identity;
    // (slot, position, pauli): insert after slot gate `position`, -1 = before all.
    struct Insert {
      std::size_t slot;
      long position;
      char pauli;
    };
    std::vector<Insert> inserts;
    std::vector<std::size_t> touched;
    static constexpr char kLetters[4] = {'I', 'X', 'Y', 'Z'};
    for (std::uint64_t t = chunk; t < n_traj; t += chunks) {
      std::mt19937_64 rng(derive_seed(nc.seed, {t}));
      inserts.clear();
      for (const auto& [gi, p] : noisy) {
        if (unit_uniform(rng()) >= p) continue;
        const Gate& g = gates[gi];
        if (g.is_cnot()) {
          const auto pick = static_cast<int>(1 + rng() % 15);
          if (pick & 3) inserts.push_back({prog.next_slot_ctrl[gi], -1, kLetters[pick & 3]});
          if (pick >> 2) inserts.push_back({prog.next_slot_tgt[gi], -1, kLetters[pick >> 2]});
        } else {
          const std::size_t s = prog.gate_slot[gi];
          const auto& sg = prog.slots[s].gates;
          const long pos = std::find(sg.begin(), sg.end(), gi) - sg.begin();
          inserts.push_back({s, pos, kLetters[1 + rng() % 3]});
        }
      }
      const std::vector<double>* cdf = &clean_cdf;
      std::vector<double> noisy_cdf;
      if (!inserts.empty()) {
        std::size_t first_op = n_ops;
        touched.clear();
        for (const Insert& ins : inserts) touched.push_back(ins.slot);
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        for (std::size_t s : touched) {
          M2 mat = M2::Identity();
          auto apply_inserts = [&](long pos) {
            for (const Insert& ins : inserts) {
              if (ins.slot == s && ins.position == pos) mat = pauli_matrix(ins.pauli) * mat;
            }
          };
          apply_inserts(-1);
          const auto& sg = prog.slots[s].gates;
          for (std::size_t j = 0; j < sg.size(); ++j) {
            mat = gate_matrix(gates[sg[j]]) * mat;
            apply_inserts(static_cast<long>(j));
          }
          matrices[s] = mat;
          skip[s] = false;
          first_op = std::min(first_op, prog.slots[s].op);
        }
        const std::size_t start = (first_op / stride) * stride;
        work = checkpoints[first_op / stride];
        run_ops(prog, work, start, n_ops, matrices, skip);
        for (std::size_t s : touched) {
          matrices[s] = prog.slot_matrix[s];
          skip[s] = prog.slot_identity[s];
        }
        noisy_cdf = marginal_cdf(work);
        cdf = &noisy_cdf;
      }
      const std::uint64_t n_shots = std::min(spt, shots - t * spt);
      std::vector<std::uint64_t>& out = result[t];
      out.reserve(n_shots);
      const double total = cdf->back();
      for (std::uint64_t s = 0; s < n_shots; ++s) {
        const double u = unit_uniform(rng()) * total;
        auto it = std::upper_bound(cdf->begin(), cdf->end(), u);
        std::uint64_t o = static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(it - cdf->begin(), outcomes - 1));
        if (nc.readout_on) {
          for (std::size_t k = 0; k < m; ++k) {
            const bool one = (o >> k) & 1;
            if (unit_uniform(rng()) < (one ? e1[k] : e0[k])) o ^= std::uint64_t(1) << k;
          }
        }
        out.push_back(o);
      }
    }
  });
  return result;
}

ShotTable tabulate(const std::vector<std::uint64_t>& outcomes, const std::vector<int>& measured) {
  ShotTable table;
  table.measured = measured;
  table.shots = outcomes.size();
  std::map<std::uint64_t, std::uint64_t> tally;
  for (std::uint64_t o : outcomes) ++tally[o];
  for (const auto& [o, k] : tally) table.counts[bits_key(o, measured.size())] = k;
  return table;
}

}  // namespace

ShotTable sample_noisy(const Circuit& c, const NoiseConfig& nc, std::uint64_t shots) {
  std::vector<std::uint64_t> all;
  for (const auto& t : sample_outcomes(c, nc, shots)) all.insert(all.end(), t.begin(), t.end());
  return tabulate(all, c.measured());
}

std::vector<ShotTable> sample_noisy_trajectories(const Circuit& c, const NoiseConfig& nc, std::uint64_t shots) {
  std::vector<ShotTable> out;
  for (const auto& t : sample_outcomes(c, nc, shots)) out.push_back(tabulate(t, c.measured()));
  return out;
}

ParityEstimate parity_expectation(const ShotTable& s, std::span<const int> support) {
  if (s.shots == 0) throw DomainError("empty shot table");
  std::vector<std::size_t> pos;
  for (int q : support) {
    const auto it = std::find(s.measured.begin(), s.measured.end(), q);
    if (it == s.measured.end()) throw SupportError("qubit " + std::to_string(q) + " was not measured");
    pos.push_back(static_cast<std::size_t>(it - s.measured.begin()));
  }
  std::int64_t signed_sum = 0;
  for (const auto& [key, k] : s.counts) {
    int parity = 0;
    for (std::size_t p : pos) parity ^= key[p] == '1';
    signed_sum += parity ? -static_cast<std::int64_t>(k) : static_cast<std::int64_t>(k);
  }
  const double shots = static_cast<double>(s.shots);
  ParityEstimate r;
  r.value = static_cast<double>(signed_sum) / shots;
  r.sigma = std::sqrt(std::max(0.0, 1.0 - r.value * r.value) / shots);
  return r;
}

}  // namespace mf
