#pragma once

// Independent reference implementations the tests check production code
// against. Everything here is built from first principles: hand-entered
// matrices, a bit-vector evaluator for the classical gate set, a column-by-
// column unitary builder, and a layout-aware equivalence check for compiled
// circuits. Nothing in this header calls the production gate tables or the
// production simulator.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qlock/circuit.hpp"
#include "qlock/compiler.hpp"

namespace oracle {

using qlock::Barrier;
using qlock::Circuit;
using qlock::Gate;
using qlock::GateKind;
using qlock::Instruction;
using qlock::Layout;
using qlock::Measure;
using cplx = std::complex<double>;
using Mat = std::vector<std::vector<cplx>>;
using Vec = std::vector<cplx>;

// --- classical bit-vector evaluator -----------------------------------------

inline bool is_classical_kind(GateKind k) {
  switch (k) {
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

// Walks the circuit over a plain bit vector. Input character i is qubit i;
// the returned string lists measured clbits in ascending clbit order, which
// mirrors the outcome-key convention of the sampler being tested.
inline std::string eval_classical(const Circuit& c, const std::string& input) {
  if (input.size() != c.n_qubits()) throw std::logic_error("oracle: input width");
  std::vector<int> bit(c.n_qubits(), 0);
  for (size_t i = 0; i < input.size(); ++i) {
    if (input[i] != '0' && input[i] != '1') throw std::logic_error("oracle: input chars");
    bit[i] = input[i] - '0';
  }
  std::map<uint32_t, int> clbits;
  for (const auto& inst : c.instructions()) {
    if (const auto* g = std::get_if<Gate>(&inst)) {
      const auto& q = g->qubits;
      switch (g->kind) {
        case GateKind::I:
          break;
        case GateKind::X:
          bit[q[0]] ^= 1;
          break;
        case GateKind::CX:
          bit[q[1]] ^= bit[q[0]];
          break;
        case GateKind::SWAP:
          std::swap(bit[q[0]], bit[q[1]]);
          break;
        case GateKind::CCX:
          bit[q[2]] ^= bit[q[0]] & bit[q[1]];
          break;
        case GateKind::C3X:
          bit[q[3]] ^= bit[q[0]] & bit[q[1]] & bit[q[2]];
          break;
        default:
          throw std::logic_error("oracle: non-classical gate");
      }
    } else if (const auto* m = std::get_if<Measure>(&inst)) {
      clbits[m->clbit] = bit[m->qubit];
    }
  }
  std::string out;
  for (const auto& [cl, v] : clbits) out.push_back(static_cast<char>('0' + v));
  return out;
}

// --- hand-entered gate matrices ----------------------------------------------
// Index bit j of a matrix row/column corresponds to the gate's qubits[j].

inline Mat perm_mat(size_t dim, const std::vector<size_t>& sigma) {
  Mat m(dim, Vec(dim, cplx{0.0, 0.0}));
  for (size_t i = 0; i < dim; ++i) m[sigma[i]][i] = 1.0;
  return m;
}

inline Mat mat_of(GateKind kind, double theta = 0.0) {
  const cplx i1{0.0, 1.0};
  const double s2 = 1.0 / std::sqrt(2.0);
  switch (kind) {
    case GateKind::I:
      return {{1.0, 0.0}, {0.0, 1.0}};
    case GateKind::X:
      return {{0.0, 1.0}, {1.0, 0.0}};
    case GateKind::SX:
      return {{0.5 * cplx{1.0, 1.0}, 0.5 * cplx{1.0, -1.0}},
              {0.5 * cplx{1.0, -1.0}, 0.5 * cplx{1.0, 1.0}}};
    case GateKind::SXdg:
      return {{0.5 * cplx{1.0, -1.0}, 0.5 * cplx{1.0, 1.0}},
              {0.5 * cplx{1.0, 1.0}, 0.5 * cplx{1.0, -1.0}}};
    case GateKind::H:
      return {{s2, s2}, {s2, -s2}};
    case GateKind::S:
      return {{1.0, 0.0}, {0.0, i1}};
    case GateKind::Sdg:
      return {{1.0, 0.0}, {0.0, -i1}};
    case GateKind::T:
      return {{1.0, 0.0}, {0.0, std::exp(i1 * std::numbers::pi / 4.0)}};
    case GateKind::Tdg:
      return {{1.0, 0.0}, {0.0, std::exp(-i1 * std::numbers::pi / 4.0)}};
    case GateKind::RZ:
      return {{std::exp(-i1 * theta / 2.0), 0.0}, {0.0, std::exp(i1 * theta / 2.0)}};
    case GateKind::CX:
      // qubits[0] = control = index bit 0, qubits[1] = target = index bit 1.
      return perm_mat(4, {0, 3, 2, 1});
    case GateKind::SWAP:
      return perm_mat(4, {0, 2, 1, 3});
    case GateKind::CCX: {
      std::vector<size_t> sigma{0, 1, 2, 7, 4, 5, 6, 3};
      return perm_mat(8, sigma);
    }
    case GateKind::C3X: {
      std::vector<size_t> sigma(16);
      for (size_t i = 0; i < 16; ++i) sigma[i] = i;
      sigma[7] = 15;
      sigma[15] = 7;
      return perm_mat(16, sigma);
    }
  }
  throw std::logic_error("oracle: unknown kind");
}

inline bool mat_equal(const Mat& a, const Mat& b, double tol) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) return false;
    for (size_t j = 0; j < a[i].size(); ++j) {
      if (std::abs(a[i][j] - b[i][j]) > tol) return false;
    }
  }
  return true;
}

inline bool mat_equal_up_to_phase(const Mat& a, const Mat& b, double tol) {
  if (a.size() != b.size()) return false;
  size_t bi = 0, bj = 0;
  double best = -1.0;
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < a[i].size(); ++j) {
      if (std::abs(a[i][j]) > best) {
        best = std::abs(a[i][j]);
        bi = i;
        bj = j;
      }
    }
  }
  if (best <= tol) return mat_equal(a, b, tol);
  const cplx phase = b[bi][bj] / a[bi][bj];
  if (std::abs(std::abs(phase) - 1.0) > tol) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < a[i].size(); ++j) {
      if (std::abs(phase * a[i][j] - b[i][j]) > tol) return false;
    }
  }
  return true;
}

// --- independent statevector application -------------------------------------
// State index bit i is qubit i, matching the IR convention under test.

inline void apply_gate(Vec& amp, uint32_t n_qubits, const Gate& gate) {
  const Mat u = mat_of(gate.kind, gate.theta);
  const size_t k = gate.qubits.size();
  const size_t sub = size_t{1} << k;
  const size_t dim = size_t{1} << n_qubits;
  std::vector<size_t> stride(k);
  for (size_t j = 0; j < k; ++j) stride[j] = size_t{1} << gate.qubits[j];
  size_t mask = 0;
  for (size_t j = 0; j < k; ++j) mask |= stride[j];
  Vec local(sub);
  for (size_t base = 0; base < dim; ++base) {
    if (base & mask) continue;
    for (size_t s = 0; s < sub; ++s) {
      size_t idx = base;
      for (size_t j = 0; j < k; ++j) {
        if (s & (size_t{1} << j)) idx |= stride[j];
      }
      local[s] = amp[idx];
    }
    for (size_t r = 0; r < sub; ++r) {
      cplx acc{0.0, 0.0};
      for (size_t s = 0; s < sub; ++s) acc += u[r][s] * local[s];
      size_t idx = base;
      for (size_t j = 0; j < k; ++j) {
        if (r & (size_t{1} << j)) idx |= stride[j];
      }
      amp[idx] = acc;
    }
  }
}

inline Vec run_state(const Circuit& c, size_t input_index) {
  Vec amp(size_t{1} << c.n_qubits(), cplx{0.0, 0.0});
  amp[input_index] = 1.0;
  for (const auto& inst : c.instructions()) {
    if (const auto* g = std::get_if<Gate>(&inst)) apply_gate(amp, c.n_qubits(), *g);
  }
  return amp;
}

inline Mat unitary_oracle(const Circuit& c) {
  const size_t dim = size_t{1} << c.n_qubits();
  Mat u(dim, Vec(dim, cplx{0.0, 0.0}));
  for (size_t col = 0; col < dim; ++col) {
    const Vec out = run_state(c, col);
    for (size_t row = 0; row < dim; ++row) u[row][col] = out[row];
  }
  return u;
}

// --- layout-aware compiled equivalence ----------------------------------------
// The physical circuit must act, on every virtual basis input routed through
// the initial layout, like the virtual circuit with its output permuted by the
// final layout. Phantom virtual wires (v >= n_virt) are pinned to |0>. One
// global phase is shared across all columns.

inline Circuit strip_measures(const Circuit& c) {
  Circuit out(c.n_qubits(), c.n_clbits());
  for (const auto& inst : c.instructions()) {
    if (!std::holds_alternative<Measure>(inst)) out.add(inst);
  }
  return out;
}

inline bool compiled_equivalent(const Circuit& virt, const Circuit& phys,
                                const Layout& initial, const Layout& final_l,
                                double tol) {
  const Circuit v = strip_measures(virt);
  const Circuit p = strip_measures(phys);
  const uint32_t nv = v.n_qubits();
  const uint32_t np = p.n_qubits();
  if (initial.size() != np || final_l.size() != np) return false;
  const size_t vdim = size_t{1} << nv;
  const size_t pdim = size_t{1} << np;

  Vec actual_all, expected_all;
  actual_all.reserve(vdim * pdim);
  expected_all.reserve(vdim * pdim);
  for (size_t b = 0; b < vdim; ++b) {
    size_t pin = 0;
    for (uint32_t q = 0; q < nv; ++q) {
      if (b & (size_t{1} << q)) pin |= size_t{1} << initial.v2p(q);
    }
    const Vec actual = run_state(p, pin);
    const Vec vout = run_state(v, b);
    Vec expected(pdim, cplx{0.0, 0.0});
    for (size_t i = 0; i < vdim; ++i) {
      size_t pout = 0;
      for (uint32_t q = 0; q < nv; ++q) {
        if (i & (size_t{1} << q)) pout |= size_t{1} << final_l.v2p(q);
      }
      expected[pout] = vout[i];
    }
    actual_all.insert(actual_all.end(), actual.begin(), actual.end());
    expected_all.insert(expected_all.end(), expected.begin(), expected.end());
  }

  size_t best_at = 0;
  double best = -1.0;
  for (size_t i = 0; i < expected_all.size(); ++i) {
    if (std::abs(expected_all[i]) > best) {
      best = std::abs(expected_all[i]);
      best_at = i;
    }
  }
  if (best < 0.1) return false;  // expected output of a unit vector can't vanish
  const cplx phase = actual_all[best_at] / expected_all[best_at];
  if (std::abs(std::abs(phase) - 1.0) > tol) return false;
  for (size_t i = 0; i < expected_all.size(); ++i) {
    if (std::abs(phase * expected_all[i] - actual_all[i]) > tol) return false;
  }
  return true;
}

// Equivalence for same-width passes (optimize, decompose, translate).
inline bool circuits_equivalent_up_to_phase(const Circuit& a, const Circuit& b,
                                            double tol) {
  return compiled_equivalent(a, b, Layout::trivial(b.n_qubits()),
                             Layout::trivial(b.n_qubits()), tol);
}

// --- random circuit generators ------------------------------------------------

inline std::vector<uint32_t> pick_distinct(std::mt19937_64& rng, uint32_t n, size_t k) {
  std::vector<uint32_t> all(n);
  for (uint32_t i = 0; i < n; ++i) all[i] = i;
  for (size_t j = 0; j < k; ++j) {
    const size_t pick = j + rng() % (n - j);
    std::swap(all[j], all[pick]);
  }
  return std::vector<uint32_t>(all.begin(), all.begin() + static_cast<long>(k));
}

inline Circuit random_classical(std::mt19937_64& rng, uint32_t n_qubits,
                                uint32_t n_gates, bool with_measures) {
  std::vector<GateKind> kinds{GateKind::X, GateKind::CX, GateKind::SWAP,
                              GateKind::CCX, GateKind::C3X};
  std::erase_if(kinds, [&](GateKind k) {
    return static_cast<uint32_t>(qlock::gate_arity(k)) > n_qubits;
  });
  Circuit c(n_qubits, with_measures ? n_qubits : 0);
  for (uint32_t g = 0; g < n_gates; ++g) {
    const GateKind kind = kinds[rng() % kinds.size()];
    c.add_gate(kind, pick_distinct(rng, n_qubits,
                                   static_cast<size_t>(qlock::gate_arity(kind))));
  }
  if (with_measures) {
    // Random nonempty qubit subset measured into clbits 0..k-1 in a random
    // qubit order, exercising arbitrary qubit->clbit wiring.
    const size_t k = 1 + rng() % n_qubits;
    const std::vector<uint32_t> qubits = pick_distinct(rng, n_qubits, k);
    for (size_t j = 0; j < k; ++j) c.add_measure(qubits[j], static_cast<uint32_t>(j));
  }
  return c;
}

inline Circuit random_general(std::mt19937_64& rng, uint32_t n_qubits,
                              uint32_t n_gates, bool with_barriers = false) {
  std::vector<GateKind> kinds{GateKind::I,    GateKind::X,  GateKind::SX,
                              GateKind::SXdg, GateKind::H,  GateKind::S,
                              GateKind::Sdg,  GateKind::T,  GateKind::Tdg,
                              GateKind::RZ,   GateKind::CX, GateKind::SWAP,
                              GateKind::CCX,  GateKind::C3X};
  std::erase_if(kinds, [&](GateKind k) {
    return static_cast<uint32_t>(qlock::gate_arity(k)) > n_qubits;
  });
  Circuit c(n_qubits, 0);
  for (uint32_t g = 0; g < n_gates; ++g) {
    if (with_barriers && rng() % 8 == 0) {
      c.add_full_barrier();
      continue;
    }
    const GateKind kind = kinds[rng() % kinds.size()];
    const double theta =
        kind == GateKind::RZ
            ? 2.0 * std::numbers::pi * (static_cast<double>(rng() >> 11) * 0x1p-53)
            : 0.0;
    c.add_gate(kind,
               pick_distinct(rng, n_qubits, static_cast<size_t>(qlock::gate_arity(kind))),
               theta);
  }
  return c;
}

inline std::string random_basis_input(std::mt19937_64& rng, uint32_t n_qubits) {
  std::string s(n_qubits, '0');
  for (auto& ch : s) ch = (rng() % 2) ? '1' : '0';
  return s;
}

}  // namespace oracle
