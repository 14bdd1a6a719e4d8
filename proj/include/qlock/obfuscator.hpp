#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qlock/circuit.hpp"

namespace qlock {

// Parameters for drawing a random reversible block.
struct RandomBlockParams {
  uint32_t n_qubits = 0;               // width of the circuit the block targets
  uint32_t n_gates = 3;
  std::vector<GateKind> allowed_kinds; // deduplicated and sorted before drawing
  std::vector<uint32_t> qubit_pool;    // candidate qubits, deduplicated
  bool refined = false;
  std::vector<uint32_t> measured;      // required when refined
  uint64_t seed = 0;
};

enum class BarrierSide { Left, Right };

struct InsertionLocation {
  enum class Kind { Front, Middle, Back };
  Kind kind = Kind::Back;
  BarrierSide side = BarrierSide::Left;  // meaningful for Middle only

  static InsertionLocation front() { return {Kind::Front, BarrierSide::Left}; }
  static InsertionLocation middle(BarrierSide side = BarrierSide::Left) {
    return {Kind::Middle, side};
  }
  static InsertionLocation back() { return {Kind::Back, BarrierSide::Left}; }

  bool operator==(const InsertionLocation&) const = default;
};

std::string location_name(const InsertionLocation& location);
InsertionLocation location_from_name(const std::string& name,
                                     BarrierSide side = BarrierSide::Left);

// The secret needed to undo an insertion. Never embedded in the circuit text
// handed to the compiler; the circuit only carries an opaque binding hash.
struct ObfuscationRecord {
  Circuit block;
  InsertionLocation location;
  size_t insertion_index = 0;      // instruction index where the block starts
  std::string barrier_tag;         // middle insertions only
  uint64_t seed = 0;
  size_t original_gate_count = 0;

  // Layouts captured after the obfuscated circuit is compiled; required for
  // stitching. Absent until the compile step fills them in.
  struct CompiledLayouts {
    std::vector<uint32_t> initial_p2v;
    std::vector<uint32_t> final_p2v;
    std::vector<std::pair<std::string, std::vector<uint32_t>>> barrier_p2v;
  };
  std::optional<CompiledLayouts> layouts;
};

// Opaque binding between a record and the circuit it describes. Stamped into
// circuit metadata under kObfHashKey; stable across emit/parse and compile.
inline constexpr const char* kObfHashKey = "obf_hash";
inline constexpr const char* kMiddleBarrierTag = "anchor";

uint64_t record_binding_hash(const ObfuscationRecord& record);

// Draws a block of n_gates reversible gates. Kinds are drawn uniformly from
// the allowed set; operand tuples uniformly without repeated qubits. Refined
// blocks start with X on a uniformly chosen measured qubit and keep every
// later gate off that qubit, narrowing the kind draw to arities that still
// fit. RZ angles, when RZ is allowed, are uniform in [0, 2*pi).
Circuit generate_block(const RandomBlockParams& params);

struct InsertionResult {
  Circuit circuit;
  ObfuscationRecord record;
};

// Places the block: Front before everything, Back after the last gate but
// before measurements, Middle beside a new full-width tagged barrier at the
// gate-count midpoint. Stamps the binding hash into the result's metadata.
InsertionResult insert(const Circuit& original, const Circuit& block,
                       const InsertionLocation& location, uint64_t seed = 0);

struct ObfuscationResult {
  Circuit circuit;
  ObfuscationRecord record;
  std::vector<std::string> warnings;  // stealth violations
};

// generate_block + insert, with params defaulted from the original circuit:
// allowed kinds = kinds present in it, pool = all its qubits, measured = its
// measured qubits. Warns when a block kind does not appear in the original.
ObfuscationResult obfuscate(const Circuit& original, RandomBlockParams params,
                            const InsertionLocation& location);

// Sidecar serialization (versioned JSON).
std::string record_to_json(const ObfuscationRecord& record);
ObfuscationRecord record_from_json(const std::string& text);
void write_record_file(const std::string& path, const ObfuscationRecord& record);
ObfuscationRecord read_record_file(const std::string& path);

}  // namespace qlock
