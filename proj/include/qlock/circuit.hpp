#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qlock {

// Gate vocabulary. SXdg is a first-class kind (not RZ·SX·RZ) so that taking
// an adjoint is always a pure kind swap, and C3X is first-class so four-qubit
// benchmark gates survive round trips without eager decomposition.
enum class GateKind {
  I,
  X,
  SX,
  SXdg,
  H,
  S,
  Sdg,
  T,
  Tdg,
  RZ,
  CX,
  SWAP,
  CCX,
  C3X,
};

int gate_arity(GateKind kind);
const char* gate_name(GateKind kind);
std::optional<GateKind> gate_kind_from_name(std::string_view name);
bool gate_has_param(GateKind kind);

// Adjoint as a kind swap; RZ additionally negates its angle.
GateKind adjoint_kind(GateKind kind);

// Column-major is irrelevant at 2x2..16x16; matrices are row-major with the
// convention that bit j of a matrix index corresponds to qubits[j] of the
// gate, qubit 0 being the least significant bit.
using Unitary = std::vector<std::vector<std::complex<double>>>;
Unitary gate_unitary(GateKind kind, double theta = 0.0);

struct Gate {
  GateKind kind;
  std::vector<uint32_t> qubits;
  double theta = 0.0;  // RZ only

  bool operator==(const Gate&) const = default;
};

struct Barrier {
  std::vector<uint32_t> qubits;  // sorted; spans all qubits when full-width
  std::string tag;               // empty = untagged

  bool operator==(const Barrier&) const = default;
};

struct Measure {
  uint32_t qubit;
  uint32_t clbit;

  bool operator==(const Measure&) const = default;
};

using Instruction = std::variant<Gate, Barrier, Measure>;

bool touches_qubit(const Instruction& inst, uint32_t qubit);

struct Violation {
  size_t index;  // instruction index
  std::string message;
};

// Flat-register quantum circuit. Instructions execute in list order; there is
// no implicit parallelism. Well-formed circuits keep each qubit's measurement
// (if any) after the last gate touching that qubit.
class Circuit {
 public:
  Circuit() = default;
  Circuit(uint32_t n_qubits, uint32_t n_clbits);

  uint32_t n_qubits() const { return n_qubits_; }
  uint32_t n_clbits() const { return n_clbits_; }

  const std::vector<Instruction>& instructions() const { return instructions_; }

  void add(Instruction inst);
  void add_gate(GateKind kind, std::vector<uint32_t> qubits, double theta = 0.0);
  void add_barrier(std::vector<uint32_t> qubits, std::string tag = "");
  void add_full_barrier(std::string tag = "");
  void add_measure(uint32_t qubit, uint32_t clbit);

  size_t size() const { return instructions_.size(); }
  size_t gate_count() const;
  size_t barrier_count() const;
  size_t measure_count() const;
  bool has_measures() const { return measure_count() > 0; }

  // Measured clbits in ascending order; outcome strings index into this list.
  std::vector<uint32_t> measured_clbits() const;
  // Measured qubits in instruction order.
  std::vector<uint32_t> measured_qubits() const;

  // Structural well-formedness as data: qubit bounds, duplicate operands,
  // arity, clbit bounds, per-qubit measurement-last ordering, and duplicate
  // clbit targets. Empty result means valid.
  std::vector<Violation> validate() const;
  void require_valid() const;  // throws on the first violation

  // Inverse circuit: instructions reversed with each gate replaced by its
  // adjoint. Throws MeasurementPresent if any measure exists.
  Circuit inverse() const;

  // Sequential composition this -> then. Qubit counts must match and this
  // circuit must be measure-free.
  Circuit concat(const Circuit& then) const;

  // Splits so the left part holds the first floor(gate_count/2) gates.
  // Non-gate instructions stay with the segment they precede; re-concatenation
  // reproduces the original instruction list.
  std::pair<Circuit, Circuit> split_at_midpoint() const;

  std::map<std::string, std::string>& metadata() { return metadata_; }
  const std::map<std::string, std::string>& metadata() const { return metadata_; }

  bool operator==(const Circuit&) const = default;

 private:
  uint32_t n_qubits_ = 0;
  uint32_t n_clbits_ = 0;
  std::vector<Instruction> instructions_;
  std::map<std::string, std::string> metadata_;
};

}  // namespace qlock
