#include "qlock/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "qlock/error.hpp"

namespace qlock {

namespace {

struct KindInfo {
  GateKind kind;
  const char* name;
  int arity;
  bool has_param;
};

constexpr KindInfo kKinds[] = {
    {GateKind::I, "id", 1, false},     {GateKind::X, "x", 1, false},
    {GateKind::SX, "sx", 1, false},    {GateKind::SXdg, "sxdg", 1, false},
    {GateKind::H, "h", 1, false},      {GateKind::S, "s", 1, false},
    {GateKind::Sdg, "sdg", 1, false},  {GateKind::T, "t", 1, false},
    {GateKind::Tdg, "tdg", 1, false},  {GateKind::RZ, "rz", 1, true},
    {GateKind::CX, "cx", 2, false},    {GateKind::SWAP, "swap", 2, false},
    {GateKind::CCX, "ccx", 3, false},  {GateKind::C3X, "c3x", 4, false},
};

const KindInfo& info(GateKind kind) {
  for (const auto& entry : kKinds) {
    if (entry.kind == kind) return entry;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown gate kind");
}

}  // namespace

int gate_arity(GateKind kind) { return info(kind).arity; }

const char* gate_name(GateKind kind) { return info(kind).name; }

bool gate_has_param(GateKind kind) { return info(kind).has_param; }

std::optional<GateKind> gate_kind_from_name(std::string_view name) {
  for (const auto& entry : kKinds) {
    if (name == entry.name) return entry.kind;
  }
  return std::nullopt;
}

GateKind adjoint_kind(GateKind kind) {
  switch (kind) {
    case GateKind::S:
      return GateKind::Sdg;
    case GateKind::Sdg:
      return GateKind::S;
    case GateKind::T:
      return GateKind::Tdg;
    case GateKind::Tdg:
      return GateKind::T;
    case GateKind::SX:
      return GateKind::SXdg;
    case GateKind::SXdg:
      return GateKind::SX;
    default:
      return kind;  // self-inverse, or RZ which negates its angle instead
  }
}

Unitary gate_unitary(GateKind kind, double theta) {
  using namespace std::complex_literals;
  const double isq = 1.0 / std::sqrt(2.0);
  switch (kind) {
    case GateKind::I:
      return {{1, 0}, {0, 1}};
    case GateKind::X:
      return {{0, 1}, {1, 0}};
    case GateKind::SX:
      return {{0.5 + 0.5i, 0.5 - 0.5i}, {0.5 - 0.5i, 0.5 + 0.5i}};
    case GateKind::SXdg:
      return {{0.5 - 0.5i, 0.5 + 0.5i}, {0.5 + 0.5i, 0.5 - 0.5i}};
    case GateKind::H:
      return {{isq, isq}, {isq, -isq}};
    case GateKind::S:
      return {{1, 0}, {0, 1i}};
    case GateKind::Sdg:
      return {{1, 0}, {0, -1i}};
    case GateKind::T:
      return {{1, 0}, {0, std::exp(1i * (std::numbers::pi / 4))}};
    case GateKind::Tdg:
      return {{1, 0}, {0, std::exp(-1i * (std::numbers::pi / 4))}};
    case GateKind::RZ:
      return {{std::exp(-1i * (theta / 2)), 0}, {0, std::exp(1i * (theta / 2))}};
    default:
      break;
  }
  // Multi-qubit kinds: permutation matrices under the bit convention that
  // matrix-index bit j corresponds to qubits[j].
  const int arity = gate_arity(kind);
  const size_t dim = size_t{1} << arity;
  Unitary u(dim, std::vector<std::complex<double>>(dim, 0.0));
  for (size_t in = 0; in < dim; ++in) {
    size_t out = in;
    switch (kind) {
      case GateKind::CX:
        if (in & 1) out = in ^ 2;
        break;
      case GateKind::SWAP: {
        const size_t a = in & 1, b = (in >> 1) & 1;
        out = (in & ~size_t{3}) | (a << 1) | b;
        break;
      }
      case GateKind::CCX:
        if ((in & 3) == 3) out = in ^ 4;
        break;
      case GateKind::C3X:
        if ((in & 7) == 7) out = in ^ 8;
        break;
      default:
        throw Error(ErrorCode::InvalidArgument, "unitary for unknown kind");
    }
    u[out][in] = 1.0;
  }
  return u;
}

bool touches_qubit(const Instruction& inst, uint32_t qubit) {
  if (const auto* gate = std::get_if<Gate>(&inst)) {
    return std::find(gate->qubits.begin(), gate->qubits.end(), qubit) !=
           gate->qubits.end();
  }
  if (const auto* barrier = std::get_if<Barrier>(&inst)) {
    return std::find(barrier->qubits.begin(), barrier->qubits.end(), qubit) !=
           barrier->qubits.end();
  }
  return std::get<Measure>(inst).qubit == qubit;
}

Circuit::Circuit(uint32_t n_qubits, uint32_t n_clbits)
    : n_qubits_(n_qubits), n_clbits_(n_clbits) {}

void Circuit::add(Instruction inst) { instructions_.push_back(std::move(inst)); }

void Circuit::add_gate(GateKind kind, std::vector<uint32_t> qubits, double theta) {
  instructions_.push_back(Gate{kind, std::move(qubits), theta});
}

void Circuit::add_barrier(std::vector<uint32_t> qubits, std::string tag) {
  std::sort(qubits.begin(), qubits.end());
  instructions_.push_back(Barrier{std::move(qubits), std::move(tag)});
}

void Circuit::add_full_barrier(std::string tag) {
  std::vector<uint32_t> all(n_qubits_);
  for (uint32_t q = 0; q < n_qubits_; ++q) all[q] = q;
  instructions_.push_back(Barrier{std::move(all), std::move(tag)});
}

void Circuit::add_measure(uint32_t qubit, uint32_t clbit) {
  instructions_.push_back(Measure{qubit, clbit});
}

size_t Circuit::gate_count() const {
  size_t n = 0;
  for (const auto& inst : instructions_) n += std::holds_alternative<Gate>(inst);
  return n;
}

size_t Circuit::barrier_count() const {
  size_t n = 0;
  for (const auto& inst : instructions_) n += std::holds_alternative<Barrier>(inst);
  return n;
}

size_t Circuit::measure_count() const {
  size_t n = 0;
  for (const auto& inst : instructions_) n += std::holds_alternative<Measure>(inst);
  return n;
}

std::vector<uint32_t> Circuit::measured_clbits() const {
  std::set<uint32_t> bits;
  for (const auto& inst : instructions_) {
    if (const auto* m = std::get_if<Measure>(&inst)) bits.insert(m->clbit);
  }
  return {bits.begin(), bits.end()};
}

std::vector<uint32_t> Circuit::measured_qubits() const {
  std::vector<uint32_t> qubits;
  for (const auto& inst : instructions_) {
    if (const auto* m = std::get_if<Measure>(&inst)) qubits.push_back(m->qubit);
  }
  return qubits;
}

std::vector<Violation> Circuit::validate() const {
  std::vector<Violation> out;
  std::vector<bool> measured(n_qubits_, false);
  std::set<uint32_t> used_clbits;
  for (size_t i = 0; i < instructions_.size(); ++i) {
    const auto& inst = instructions_[i];
    if (const auto* gate = std::get_if<Gate>(&inst)) {
      if (static_cast<int>(gate->qubits.size()) != gate_arity(gate->kind)) {
        out.push_back({i, std::string(gate_name(gate->kind)) + " expects " +
                              std::to_string(gate_arity(gate->kind)) + " qubits"});
        continue;
      }
      std::set<uint32_t> seen;
      for (uint32_t q : gate->qubits) {
        if (q >= n_qubits_) {
          out.push_back({i, "qubit " + std::to_string(q) + " out of range"});
        } else if (!seen.insert(q).second) {
          out.push_back({i, "duplicate qubit " + std::to_string(q)});
        } else if (measured[q]) {
          out.push_back({i, "gate on qubit " + std::to_string(q) +
                                " after its measurement"});
        }
      }
    } else if (const auto* barrier = std::get_if<Barrier>(&inst)) {
      for (uint32_t q : barrier->qubits) {
        if (q >= n_qubits_) {
          out.push_back({i, "barrier qubit " + std::to_string(q) + " out of range"});
        }
      }
    } else {
      const auto& m = std::get<Measure>(inst);
      if (m.qubit >= n_qubits_) {
        out.push_back({i, "measured qubit " + std::to_string(m.qubit) + " out of range"});
      } else {
        if (measured[m.qubit]) {
          out.push_back({i, "qubit " + std::to_string(m.qubit) + " measured twice"});
        }
        measured[m.qubit] = true;
      }
      if (m.clbit >= n_clbits_) {
        out.push_back({i, "clbit " + std::to_string(m.clbit) + " out of range"});
      } else if (!used_clbits.insert(m.clbit).second) {
        out.push_back({i, "clbit " + std::to_string(m.clbit) + " written twice"});
      }
    }
  }
  return out;
}

void Circuit::require_valid() const {
  const auto violations = validate();
  if (!violations.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "instruction " + std::to_string(violations.front().index) + ": " +
                    violations.front().message);
  }
}

Circuit Circuit::inverse() const {
  if (has_measures()) {
    throw Error(ErrorCode::MeasurementPresent, "cannot invert a measured circuit");
  }
  Circuit inv(n_qubits_, n_clbits_);
  inv.metadata_ = metadata_;
  for (auto it = instructions_.rbegin(); it != instructions_.rend(); ++it) {
    if (const auto* gate = std::get_if<Gate>(&*it)) {
      inv.add_gate(adjoint_kind(gate->kind), gate->qubits,
                   gate->kind == GateKind::RZ ? -gate->theta : 0.0);
    } else {
      inv.add(*it);
    }
  }
  return inv;
}

Circuit Circuit::concat(const Circuit& then) const {
  if (n_qubits_ != then.n_qubits_) {
    throw Error(ErrorCode::QubitCountMismatch,
                std::to_string(n_qubits_) + " vs " + std::to_string(then.n_qubits_));
  }
  if (has_measures()) {
    throw Error(ErrorCode::MeasurementPresent,
                "left operand of concat must be measure-free");
  }
  Circuit out(n_qubits_, std::max(n_clbits_, then.n_clbits_));
  out.instructions_ = instructions_;
  out.instructions_.insert(out.instructions_.end(), then.instructions_.begin(),
                           then.instructions_.end());
  out.metadata_ = metadata_;
  for (const auto& [key, value] : then.metadata_) out.metadata_[key] = value;
  return out;
}

std::pair<Circuit, Circuit> Circuit::split_at_midpoint() const {
  const size_t gates = gate_count();
  if (gates < 2) {
    throw Error(ErrorCode::TooFewGates, "midpoint split needs at least 2 gates");
  }
  const size_t left_gates = gates / 2;
  size_t boundary = 0;
  size_t seen = 0;
  for (size_t i = 0; i < instructions_.size(); ++i) {
    if (std::holds_alternative<Gate>(instructions_[i])) {
      ++seen;
      if (seen == left_gates) {
        boundary = i + 1;
        break;
      }
    }
  }
  Circuit left(n_qubits_, n_clbits_);
  Circuit right(n_qubits_, n_clbits_);
  left.instructions_.assign(instructions_.begin(), instructions_.begin() + boundary);
  right.instructions_.assign(instructions_.begin() + boundary, instructions_.end());
  left.metadata_ = metadata_;
  right.metadata_ = metadata_;
  return {std::move(left), std::move(right)};
}

}  // namespace qlock
