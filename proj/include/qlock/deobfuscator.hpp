#pragma once

#include <string>

#include "qlock/circuit.hpp"
#include "qlock/compiler.hpp"
#include "qlock/obfuscator.hpp"

namespace qlock {

// How the compiled inverse is wired onto the compiled obfuscated circuit:
// FeedLayout compiles the inverse starting from the junction's layout;
// SwapLayer compiles it on a trivial layout and bridges with explicit SWAPs.
// Residual mismatches after the inverse are bridged in both modes.
enum class StitchMode { FeedLayout, SwapLayer };

std::string stitch_mode_name(StitchMode mode);
StitchMode stitch_mode_from_name(const std::string& name);

// The block's inverse as a standalone virtual circuit.
Circuit build_inverse(const ObfuscationRecord& record);

// SWAP-only circuit, every SWAP on a coupling edge, that rearranges wires
// from one layout into another. Tokens are routed over a BFS spanning tree,
// deepest nodes first, so the result is deterministic. Empty when from == to.
Circuit swap_layer(const Layout& from, const Layout& to, const CouplingMap& map);

struct DeobfuscationResult {
  Circuit circuit;  // physical width, measures re-targeted
  Layout initial_layout;
  Layout final_layout;
  StitchMode mode = StitchMode::FeedLayout;
  std::string location;
  size_t junction_swaps = 0;   // bridge SWAPs inserted at the junctions
  size_t gates_compiled = 0;   // gate count of the compiled obfuscated input
  size_t gates_inverse = 0;    // gate count of the compiled inverse segment
  size_t gates_stitched = 0;   // gate count of the final stitched circuit

  std::string report_json() const;
};

// Rebuilds a CompiledCircuit from a parsed compiled QASM file plus the
// layouts stored in the record sidecar by the compile step. Throws
// RecordMismatch when the sidecar carries no layouts.
CompiledCircuit attach_layouts(const Circuit& compiled, const ObfuscationRecord& record);

// Stores the compile result's layouts into the record for later stitching.
void store_layouts(ObfuscationRecord& record, const CompiledCircuit& compiled);

// Stitches the compiled inverse into the compiled obfuscated circuit at the
// recorded junction: Back appends it before the (re-targeted) measurements,
// Front prepends it, Middle splices it beside the tagged barrier on the
// recorded side. The record must match the circuit's binding hash.
DeobfuscationResult deobfuscate(const CompiledCircuit& compiled_obf,
                                const ObfuscationRecord& record,
                                const CouplingMap& map, StitchMode mode);

}  // namespace qlock
