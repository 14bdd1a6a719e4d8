#include "qlock/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qlock/error.hpp"
#include "qlock/rng.hpp"

namespace qlock {

namespace {

using Amplitude = std::complex<double>;

constexpr double kProbFloor = 1e-12;   // exact-path probabilities below this are noise
constexpr double kAmpFloor = 1e-13;    // sparse entries below this magnitude are dropped

uint64_t parse_basis(uint32_t n_qubits, std::string_view bits) {
  if (bits.size() != n_qubits) {
    throw Error(ErrorCode::InvalidArgument,
                "input length " + std::to_string(bits.size()) + " does not match " +
                    std::to_string(n_qubits) + " qubits");
  }
  uint64_t index = 0;
  for (uint32_t i = 0; i < n_qubits; ++i) {
    if (bits[i] == '1') {
      index |= uint64_t{1} << i;
    } else if (bits[i] != '0') {
      throw Error(ErrorCode::InvalidArgument, "input must be over {0,1}");
    }
  }
  return index;
}

bool classical_kind(GateKind kind) {
  switch (kind) {
    case GateKind::I:
    case GateKind::X:
    case GateKind::CX:
    case GateKind::SWAP:
    case GateKind::CCX:
    case GateKind::C3X:
      return true;
    default:
      return false;
  }
}

// Flattened gate stream for the per-shot engines. Multi-qubit gates carry the
// participating qubits for noise attribution.
struct FlatOp {
  enum class Type : uint8_t { Diag, Full1Q, Flip, CtrlFlip, BitSwap, Nop };
  Type type;
  uint8_t arity;
  uint8_t qubits[4];
  uint64_t ctrl_mask = 0;
  uint64_t flip_mask = 0;
  Amplitude u[4];  // Full1Q: row-major 2x2; Diag: u[0], u[3]
};

struct FlatCircuit {
  std::vector<FlatOp> ops;
  std::vector<Measure> measures;
  std::vector<uint32_t> sorted_clbits;
  bool classical = true;
};

FlatCircuit flatten(const Circuit& circuit) {
  FlatCircuit flat;
  for (const auto& inst : circuit.instructions()) {
    if (const auto* m = std::get_if<Measure>(&inst)) {
      flat.measures.push_back(*m);
      continue;
    }
    const auto* gate = std::get_if<Gate>(&inst);
    if (!gate) continue;  // barrier
    FlatOp op{};
    op.arity = static_cast<uint8_t>(gate->qubits.size());
    for (size_t i = 0; i < gate->qubits.size(); ++i) {
      op.qubits[i] = static_cast<uint8_t>(gate->qubits[i]);
    }
    const auto bit = [&](int i) { return uint64_t{1} << gate->qubits[i]; };
    switch (gate->kind) {
      case GateKind::I:
        op.type = FlatOp::Type::Nop;
        break;
      case GateKind::X:
        op.type = FlatOp::Type::Flip;
        op.flip_mask = bit(0);
        break;
      case GateKind::CX:
        op.type = FlatOp::Type::CtrlFlip;
        op.ctrl_mask = bit(0);
        op.flip_mask = bit(1);
        break;
      case GateKind::CCX:
        op.type = FlatOp::Type::CtrlFlip;
        op.ctrl_mask = bit(0) | bit(1);
        op.flip_mask = bit(2);
        break;
      case GateKind::C3X:
        op.type = FlatOp::Type::CtrlFlip;
        op.ctrl_mask = bit(0) | bit(1) | bit(2);
        op.flip_mask = bit(3);
        break;
      case GateKind::SWAP:
        op.type = FlatOp::Type::BitSwap;
        op.ctrl_mask = bit(0);
        op.flip_mask = bit(1);
        break;
      default: {
        flat.classical = false;
        const Unitary u = gate_unitary(gate->kind, gate->theta);
        if (u[0][1] == 0.0 && u[1][0] == 0.0) {
          op.type = FlatOp::Type::Diag;
        } else {
          op.type = FlatOp::Type::Full1Q;
        }
        op.u[0] = u[0][0];
        op.u[1] = u[0][1];
        op.u[2] = u[1][0];
        op.u[3] = u[1][1];
        break;
      }
    }
    flat.ops.push_back(op);
  }
  flat.sorted_clbits = circuit.measured_clbits();
  return flat;
}

// --- Dense engine -----------------------------------------------------------

void dense_apply(std::vector<Amplitude>& amp, const FlatOp& op) {
  const size_t dim = amp.size();
  switch (op.type) {
    case FlatOp::Type::Nop:
      break;
    case FlatOp::Type::Flip: {
      const uint64_t mask = op.flip_mask;
      for (uint64_t i = 0; i < dim; ++i) {
        if (!(i & mask)) std::swap(amp[i], amp[i | mask]);
      }
      break;
    }
    case FlatOp::Type::CtrlFlip: {
      const uint64_t ctrl = op.ctrl_mask, mask = op.flip_mask;
      for (uint64_t i = 0; i < dim; ++i) {
        if ((i & ctrl) == ctrl && !(i & mask)) std::swap(amp[i], amp[i | mask]);
      }
      break;
    }
    case FlatOp::Type::BitSwap: {
      const uint64_t a = op.ctrl_mask, b = op.flip_mask;
      for (uint64_t i = 0; i < dim; ++i) {
        if ((i & a) && !(i & b)) std::swap(amp[i], amp[(i ^ a) | b]);
      }
      break;
    }
    case FlatOp::Type::Diag: {
      const uint64_t mask = uint64_t{1} << op.qubits[0];
      for (uint64_t i = 0; i < dim; ++i) amp[i] *= (i & mask) ? op.u[3] : op.u[0];
      break;
    }
    case FlatOp::Type::Full1Q: {
      const uint64_t mask = uint64_t{1} << op.qubits[0];
      for (uint64_t i = 0; i < dim; ++i) {
        if (i & mask) continue;
        const Amplitude a0 = amp[i], a1 = amp[i | mask];
        amp[i] = op.u[0] * a0 + op.u[1] * a1;
        amp[i | mask] = op.u[2] * a0 + op.u[3] * a1;
      }
      break;
    }
  }
}

// --- Sparse engine ----------------------------------------------------------

using SparseState = std::vector<std::pair<uint64_t, Amplitude>>;

void sparse_sort(SparseState& state) {
  std::sort(state.begin(), state.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
}

const Amplitude* sparse_find(const SparseState& state, uint64_t index) {
  const auto it = std::lower_bound(
      state.begin(), state.end(), index,
      [](const auto& entry, uint64_t value) { return entry.first < value; });
  if (it != state.end() && it->first == index) return &it->second;
  return nullptr;
}

void sparse_full1q(SparseState& state, uint64_t mask, const Amplitude* u) {
  SparseState next;
  next.reserve(state.size() + 4);
  for (const auto& [idx, a] : state) {
    if (idx & mask) {
      if (sparse_find(state, idx ^ mask)) continue;  // handled with its partner
      const Amplitude b0 = u[1] * a, b1 = u[3] * a;
      if (std::abs(b0) > kAmpFloor) next.emplace_back(idx ^ mask, b0);
      if (std::abs(b1) > kAmpFloor) next.emplace_back(idx, b1);
    } else {
      const Amplitude* hi = sparse_find(state, idx | mask);
      const Amplitude a1 = hi ? *hi : Amplitude{};
      const Amplitude b0 = u[0] * a + u[1] * a1;
      const Amplitude b1 = u[2] * a + u[3] * a1;
      if (std::abs(b0) > kAmpFloor) next.emplace_back(idx, b0);
      if (std::abs(b1) > kAmpFloor) next.emplace_back(idx | mask, b1);
    }
  }
  sparse_sort(next);
  state = std::move(next);
}

void sparse_apply(SparseState& state, const FlatOp& op) {
  switch (op.type) {
    case FlatOp::Type::Nop:
      break;
    case FlatOp::Type::Flip:
      for (auto& entry : state) entry.first ^= op.flip_mask;
      sparse_sort(state);
      break;
    case FlatOp::Type::CtrlFlip: {
      bool changed = false;
      for (auto& entry : state) {
        if ((entry.first & op.ctrl_mask) == op.ctrl_mask) {
          entry.first ^= op.flip_mask;
          changed = true;
        }
      }
      if (changed) sparse_sort(state);
      break;
    }
    case FlatOp::Type::BitSwap: {
      bool changed = false;
      for (auto& entry : state) {
        const bool a = entry.first & op.ctrl_mask;
        const bool b = entry.first & op.flip_mask;
        if (a != b) {
          entry.first ^= op.ctrl_mask | op.flip_mask;
          changed = true;
        }
      }
      if (changed) sparse_sort(state);
      break;
    }
    case FlatOp::Type::Diag: {
      const uint64_t mask = uint64_t{1} << op.qubits[0];
      for (auto& entry : state) entry.second *= (entry.first & mask) ? op.u[3] : op.u[0];
      break;
    }
    case FlatOp::Type::Full1Q:
      sparse_full1q(state, uint64_t{1} << op.qubits[0], op.u);
      break;
  }
}

enum class Pauli : uint8_t { X = 0, Y = 1, Z = 2 };

void sparse_pauli(SparseState& state, Pauli pauli, uint32_t qubit) {
  const uint64_t mask = uint64_t{1} << qubit;
  const Amplitude i_unit(0.0, 1.0);
  switch (pauli) {
    case Pauli::X:
      for (auto& entry : state) entry.first ^= mask;
      sparse_sort(state);
      break;
    case Pauli::Y:
      for (auto& entry : state) {
        entry.second *= (entry.first & mask) ? -i_unit : i_unit;
        entry.first ^= mask;
      }
      sparse_sort(state);
      break;
    case Pauli::Z:
      for (auto& entry : state) {
        if (entry.first & mask) entry.second = -entry.second;
      }
      break;
  }
}

// --- Shared trajectory scaffolding ------------------------------------------

struct OutcomeBuilder {
  const FlatCircuit& flat;
  std::vector<char> clbit_value;  // indexed by clbit

  explicit OutcomeBuilder(const FlatCircuit& f, uint32_t n_clbits)
      : flat(f), clbit_value(n_clbits, '0') {}

  // Applies measurement mapping and readout noise; returns the outcome key.
  std::string finish(uint64_t bits, double p_ro, Rng& rng) {
    for (const auto& m : flat.measures) {
      clbit_value[m.clbit] = (bits >> m.qubit) & 1 ? '1' : '0';
    }
    if (p_ro > 0.0) {
      for (const auto& m : flat.measures) {
        if (rng.next_double() < p_ro) {
          clbit_value[m.clbit] = clbit_value[m.clbit] == '0' ? '1' : '0';
        }
      }
    }
    std::string key;
    key.reserve(flat.sorted_clbits.size());
    for (uint32_t c : flat.sorted_clbits) key.push_back(clbit_value[c]);
    return key;
  }
};

uint64_t sparse_collapse(const SparseState& state, double u) {
  double total = 0.0;
  for (const auto& [idx, a] : state) total += std::norm(a);
  double acc = 0.0;
  const double target = u * total;
  for (const auto& [idx, a] : state) {
    acc += std::norm(a);
    if (acc >= target) return idx;
  }
  return state.back().first;
}

// Per-gate noise decision shared by both trajectory engines so their RNG
// streams stay interchangeable. Calls sink(pauli, qubit) for each fired error.
template <typename Sink>
void draw_gate_noise(const FlatOp& op, const NoiseModel& noise, Rng& rng, Sink&& sink) {
  if (op.arity == 1) {
    if (noise.p1 > 0.0) {
      const double ux = rng.next_double();
      const double uz = rng.next_double();
      if (ux < noise.p1) sink(Pauli::X, op.qubits[0]);
      if (uz < noise.p1) sink(Pauli::Z, op.qubits[0]);
    }
  } else if (noise.p2 > 0.0) {
    for (uint8_t i = 0; i < op.arity; ++i) {
      if (rng.next_double() < noise.p2) {
        sink(static_cast<Pauli>(rng.next_below(3)), op.qubits[i]);
      }
    }
  }
}

Distribution sample_dense_exact(const Circuit& circuit, const FlatCircuit& flat,
                                uint64_t input, uint64_t shots,
                                const NoiseModel& noise, Rng& rng) {
  StateVector state = StateVector::from_index(circuit.n_qubits(), input);
  for (const auto& inst : circuit.instructions()) {
    if (const auto* gate = std::get_if<Gate>(&inst)) state.apply(*gate);
  }
  // Cumulative distribution over basis indices, with sub-floor probabilities
  // treated as exact zeros so permutation circuits give point distributions.
  std::vector<std::pair<double, uint64_t>> cdf;
  double total = 0.0;
  const auto& amp = state.amplitudes();
  for (uint64_t i = 0; i < amp.size(); ++i) {
    const double p = std::norm(amp[i]);
    if (p < kProbFloor) continue;
    total += p;
    cdf.emplace_back(total, i);
  }
  Distribution dist;
  dist.shots = shots;
  OutcomeBuilder builder(flat, circuit.n_clbits());
  for (uint64_t s = 0; s < shots; ++s) {
    const double u = rng.next_double() * total;
    const auto it = std::lower_bound(
        cdf.begin(), cdf.end(), u,
        [](const auto& entry, double value) { return entry.first < value; });
    const uint64_t index = it == cdf.end() ? cdf.back().second : it->second;
    ++dist.counts[builder.finish(index, noise.p_ro, rng)];
  }
  return dist;
}

Distribution sample_classical(const Circuit& circuit, const FlatCircuit& flat,
                              uint64_t input, uint64_t shots,
                              const NoiseModel& noise, Rng& rng) {
  Distribution dist;
  dist.shots = shots;
  OutcomeBuilder builder(flat, circuit.n_clbits());
  for (uint64_t s = 0; s < shots; ++s) {
    uint64_t bits = input;
    for (const auto& op : flat.ops) {
      switch (op.type) {
        case FlatOp::Type::Flip:
          bits ^= op.flip_mask;
          break;
        case FlatOp::Type::CtrlFlip:
          if ((bits & op.ctrl_mask) == op.ctrl_mask) bits ^= op.flip_mask;
          break;
        case FlatOp::Type::BitSwap: {
          const bool a = bits & op.ctrl_mask;
          const bool b = bits & op.flip_mask;
          if (a != b) bits ^= op.ctrl_mask | op.flip_mask;
          break;
        }
        default:
          break;
      }
      draw_gate_noise(op, noise, rng, [&](Pauli pauli, uint32_t qubit) {
        // Z errors only change phase, invisible on a basis state.
        if (pauli != Pauli::Z) bits ^= uint64_t{1} << qubit;
      });
    }
    rng.next_double();  // collapse draw; the state is a basis state
    ++dist.counts[builder.finish(bits, noise.p_ro, rng)];
  }
  return dist;
}

Distribution sample_sparse(const Circuit& circuit, const FlatCircuit& flat,
                           uint64_t input, uint64_t shots, const NoiseModel& noise,
                           Rng& rng) {
  // Noise-free prefix states are shared across shots: cache[i] is the state
  // after ops[0..i). A shot only pays for evolution past its first error.
  std::vector<SparseState> cache(flat.ops.size() + 1);
  cache[0] = {{input, Amplitude{1.0, 0.0}}};
  for (size_t i = 0; i < flat.ops.size(); ++i) {
    cache[i + 1] = cache[i];
    sparse_apply(cache[i + 1], flat.ops[i]);
  }

  Distribution dist;
  dist.shots = shots;
  OutcomeBuilder builder(flat, circuit.n_clbits());
  SparseState state;
  for (uint64_t s = 0; s < shots; ++s) {
    bool deviated = false;
    for (size_t i = 0; i < flat.ops.size(); ++i) {
      if (deviated) sparse_apply(state, flat.ops[i]);
      draw_gate_noise(flat.ops[i], noise, rng, [&](Pauli pauli, uint32_t qubit) {
        if (!deviated) {
          state = cache[i + 1];
          deviated = true;
        }
        sparse_pauli(state, pauli, qubit);
      });
    }
    const SparseState& final_state = deviated ? state : cache.back();
    const uint64_t index = sparse_collapse(final_state, rng.next_double());
    ++dist.counts[builder.finish(index, noise.p_ro, rng)];
  }
  return dist;
}

}  // namespace

StateVector StateVector::from_basis(uint32_t n_qubits, std::string_view bits) {
  return from_index(n_qubits, parse_basis(n_qubits, bits));
}

StateVector StateVector::from_index(uint32_t n_qubits, uint64_t index) {
  if (n_qubits > 20) {
    throw Error(ErrorCode::TooManyQubits,
                std::to_string(n_qubits) + " qubits exceeds the dense limit of 20");
  }
  StateVector sv;
  sv.n_qubits_ = n_qubits;
  sv.amp_.assign(size_t{1} << n_qubits, Amplitude{});
  sv.amp_[index] = 1.0;
  return sv;
}

void StateVector::apply(const Gate& gate) {
  Circuit probe(n_qubits_, 0);
  probe.add_gate(gate.kind, gate.qubits, gate.theta);
  const FlatCircuit flat = flatten(probe);
  dense_apply(amp_, flat.ops.front());
  const double norm = norm_sqr();
  if (std::abs(norm - 1.0) > 1e-10) {
    throw std::logic_error("statevector norm drifted to " + std::to_string(norm));
  }
}

double StateVector::norm_sqr() const {
  double total = 0.0;
  for (const auto& a : amp_) total += std::norm(a);
  return total;
}

StateVector run_statevector(const Circuit& circuit, std::string_view input) {
  circuit.require_valid();
  StateVector state = StateVector::from_basis(circuit.n_qubits(), input);
  for (const auto& inst : circuit.instructions()) {
    if (const auto* gate = std::get_if<Gate>(&inst)) state.apply(*gate);
  }
  return state;
}

Unitary unitary_of(const Circuit& circuit) {
  circuit.require_valid();
  if (circuit.has_measures()) {
    throw Error(ErrorCode::MeasurementPresent, "unitary of a measured circuit");
  }
  if (circuit.n_qubits() > 10) {
    throw Error(ErrorCode::TooManyQubits, "unitary limit is 10 qubits");
  }
  const size_t dim = size_t{1} << circuit.n_qubits();
  const FlatCircuit flat = flatten(circuit);
  Unitary u(dim, std::vector<Amplitude>(dim));
  for (size_t col = 0; col < dim; ++col) {
    StateVector state = StateVector::from_index(circuit.n_qubits(), col);
    std::vector<Amplitude> amp = state.amplitudes();
    for (const auto& op : flat.ops) dense_apply(amp, op);
    for (size_t row = 0; row < dim; ++row) u[row][col] = amp[row];
  }
  return u;
}

bool unitaries_equal(const Unitary& a, const Unitary& b, double tol) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < a.size(); ++j) {
      if (std::abs(a[i][j] - b[i][j]) > tol) return false;
    }
  }
  return true;
}

bool equivalent_up_to_phase(const Unitary& a, const Unitary& b, double tol) {
  if (a.size() != b.size()) return false;
  size_t bi = 0, bj = 0;
  double best = 0.0;
  for (size_t i = 0; i < b.size(); ++i) {
    for (size_t j = 0; j < b.size(); ++j) {
      if (std::abs(b[i][j]) > best) {
        best = std::abs(b[i][j]);
        bi = i;
        bj = j;
      }
    }
  }
  if (best < tol) return false;
  const Amplitude phase = a[bi][bj] / b[bi][bj];
  if (std::abs(std::abs(phase) - 1.0) > tol) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < a.size(); ++j) {
      if (std::abs(a[i][j] - phase * b[i][j]) > tol) return false;
    }
  }
  return true;
}

bool is_classical_reversible(const Circuit& circuit) {
  for (const auto& inst : circuit.instructions()) {
    if (const auto* gate = std::get_if<Gate>(&inst)) {
      if (!classical_kind(gate->kind)) return false;
    }
  }
  return true;
}

Distribution sample(const Circuit& circuit, std::string_view input, uint64_t shots,
                    const NoiseModel& noise, uint64_t seed, SamplePath path) {
  circuit.require_valid();
  if (shots == 0) throw Error(ErrorCode::ZeroShots, "shots must be positive");
  if (!circuit.has_measures()) {
    throw Error(ErrorCode::NoMeasurement, "sampling requires measurements");
  }
  if (circuit.n_qubits() > 20) {
    throw Error(ErrorCode::TooManyQubits, "sampling limit is 20 qubits");
  }
  const uint64_t index = parse_basis(circuit.n_qubits(), input);
  const FlatCircuit flat = flatten(circuit);

  if (path == SamplePath::Auto) {
    if (!noise.gate_noise()) {
      path = SamplePath::DenseExact;
    } else if (flat.classical) {
      path = SamplePath::Classical;
    } else {
      path = SamplePath::SparseTrajectory;
    }
  }
  Rng rng = Rng(seed).substream("sample");
  switch (path) {
    case SamplePath::DenseExact:
      if (noise.gate_noise()) {
        throw Error(ErrorCode::InvalidArgument,
                    "dense exact path cannot apply gate noise");
      }
      return sample_dense_exact(circuit, flat, index, shots, noise, rng);
    case SamplePath::Classical:
      if (!flat.classical) {
        throw Error(ErrorCode::InvalidArgument,
                    "classical path requires a classical-reversible circuit");
      }
      return sample_classical(circuit, flat, index, shots, noise, rng);
    default:
      return sample_sparse(circuit, flat, index, shots, noise, rng);
  }
}

}  // namespace qlock
