#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qlock/circuit.hpp"

namespace qlock {

// Stochastic Pauli channel. After every 1-qubit gate an X error and a Z error
// are each applied independently with probability p1. After every multi-qubit
// gate each participating qubit suffers a uniformly chosen X/Y/Z error with
// probability p2. Each readout bit flips with probability p_ro.
struct NoiseModel {
  double p1 = 0.0;
  double p2 = 0.0;
  double p_ro = 0.0;

  bool gate_noise() const { return p1 > 0.0 || p2 > 0.0; }
  bool is_zero() const { return p1 == 0.0 && p2 == 0.0 && p_ro == 0.0; }

  static NoiseModel none() { return {}; }
  static NoiseModel defaults() { return {0.001, 0.01, 0.01}; }
};

// Measurement outcome histogram. Keys are bit strings over the measured
// clbits: string position j holds the j-th lowest measured clbit, '0'/'1'.
struct Distribution {
  std::map<std::string, uint64_t> counts;
  uint64_t shots = 0;

  bool operator==(const Distribution&) const = default;
};

// Dense statevector. Amplitude index convention: bit i of the index is the
// state of qubit i (qubit 0 = least significant bit). A basis-string "q0q1.."
// therefore maps to the index with bit i = input[i].
class StateVector {
 public:
  static StateVector from_basis(uint32_t n_qubits, std::string_view bits);
  static StateVector from_index(uint32_t n_qubits, uint64_t index);

  uint32_t n_qubits() const { return n_qubits_; }
  const std::vector<std::complex<double>>& amplitudes() const { return amp_; }

  void apply(const Gate& gate);
  double norm_sqr() const;

 private:
  uint32_t n_qubits_ = 0;
  std::vector<std::complex<double>> amp_;
};

// Evolves |input> through all gates (barriers and measures are ignored).
// Norm is checked after every gate application. Limit: 20 qubits.
StateVector run_statevector(const Circuit& circuit, std::string_view input);

// Full unitary by evolving every basis column. Limit: 10 qubits. Throws
// MeasurementPresent if the circuit measures.
Unitary unitary_of(const Circuit& circuit);

bool equivalent_up_to_phase(const Unitary& a, const Unitary& b, double tol);
bool unitaries_equal(const Unitary& a, const Unitary& b, double tol);

// Execution strategy for sample(). Auto picks the cheapest exact engine:
// noise-free circuits are evolved once and sampled from the exact
// distribution; noisy classical-reversible circuits run as per-shot bit-vector
// trajectories; everything else runs as per-shot sparse-state trajectories.
// The explicit values exist so tests can cross-check engines against each
// other; Classical and SparseTrajectory consume identical RNG streams.
enum class SamplePath { Auto, DenseExact, Classical, SparseTrajectory };

// Samples `shots` measurement outcomes. Deterministic in all arguments.
// Requires at least one measure instruction and shots >= 1.
Distribution sample(const Circuit& circuit, std::string_view input, uint64_t shots,
                    const NoiseModel& noise, uint64_t seed,
                    SamplePath path = SamplePath::Auto);

// True when every gate maps computational basis states to computational basis
// states (I, X, CX, SWAP, CCX, C3X only).
bool is_classical_reversible(const Circuit& circuit);

}  // namespace qlock
