#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qlock/circuit.hpp"

namespace qlock {

// Undirected device connectivity. Two-qubit gates are legal only on edges.
class CouplingMap {
 public:
  CouplingMap(uint32_t n_physical, std::vector<std::pair<uint32_t, uint32_t>> edges);

  uint32_t n_physical() const { return n_physical_; }
  const std::vector<std::pair<uint32_t, uint32_t>>& edges() const { return edges_; }
  bool connected(uint32_t a, uint32_t b) const;
  const std::vector<uint32_t>& neighbors(uint32_t q) const;
  uint32_t degree(uint32_t q) const;

  // Lexicographically smallest shortest path from a to b.
  std::vector<uint32_t> shortest_path(uint32_t a, uint32_t b) const;

  // The 5-qubit T-shaped device: edges (0,1), (1,2), (1,3), (3,4).
  static CouplingMap valencia();
  static CouplingMap line(uint32_t n);
  // valencia when the circuit fits in 5 qubits, otherwise a line of width n.
  static CouplingMap default_for(uint32_t n_qubits);

  static CouplingMap from_json(const std::string& text);
  std::string to_json() const;

 private:
  uint32_t n_physical_;
  std::vector<std::pair<uint32_t, uint32_t>> edges_;
  std::vector<std::vector<uint32_t>> adjacency_;
};

// Bijection between virtual circuit qubits and physical device qubits.
// Virtual indices beyond the source circuit's width are idle padding, so both
// directions are total over n_physical.
class Layout {
 public:
  Layout() = default;
  static Layout trivial(uint32_t n);
  static Layout from_v2p(std::vector<uint32_t> v2p);

  uint32_t size() const { return static_cast<uint32_t>(v2p_.size()); }
  uint32_t v2p(uint32_t v) const { return v2p_[v]; }
  uint32_t p2v(uint32_t p) const { return p2v_[p]; }
  const std::vector<uint32_t>& v2p_vector() const { return v2p_; }
  const std::vector<uint32_t>& p2v_vector() const { return p2v_; }

  void swap_physical(uint32_t pa, uint32_t pb);

  bool operator==(const Layout&) const = default;

 private:
  std::vector<uint32_t> v2p_;
  std::vector<uint32_t> p2v_;
};

struct PassStat {
  std::string pass;
  size_t gates_before = 0;
  size_t gates_after = 0;
};

struct CompiledCircuit {
  Circuit circuit;  // n_physical qubits, measures re-targeted
  Layout initial_layout;
  Layout final_layout;
  std::vector<PassStat> pass_log;
  // Layout in effect when routing crossed each tagged barrier; needed to
  // splice compiled segments at a junction marked by a barrier.
  std::map<std::string, Layout> barrier_layouts;

  std::string report_json() const;
};

enum class PlacementStrategy { Trivial, Greedy };

struct CompileOptions {
  PlacementStrategy placement = PlacementStrategy::Greedy;
  // Overrides placement entirely when set; must be total over n_physical.
  std::optional<Layout> initial_layout;
};

// Individual passes, each usable standalone.

// Cancels adjacent inverse pairs on identical qubit tuples and merges adjacent
// RZ angles (dropping exact zeros), to a fixpoint. Two gates are adjacent when
// no instruction between them touches any of the first gate's qubits; barriers
// and measures block cancellation on their qubits. Idempotent.
Circuit optimize_virtual(const Circuit& circuit);

// Rewrites CCX, C3X, and SWAP into {1-qubit kinds, CX}. CCX uses the standard
// six-CX construction; C3X uses an ancilla-free phase-gradient construction
// with controlled rotations realized via CX and RZ (equal up to global phase).
Circuit decompose(const Circuit& circuit);

// Chooses the initial layout. Greedy ranks virtual qubits by multi-qubit gate
// participation and assigns the heaviest to the highest-degree physical qubit,
// ties broken by lower index on both sides.
Layout place(const Circuit& circuit, const CouplingMap& map, PlacementStrategy strategy);

struct RouteResult {
  Circuit circuit;
  Layout final_layout;
  std::map<std::string, Layout> barrier_layouts;
};

// Makes every 2-qubit gate coupling-legal by inserting native SWAPs along the
// lexicographically smallest shortest path, moving the first operand one edge
// at a time. Re-targets barriers and measures through the evolving layout.
RouteResult route(const Circuit& circuit, const CouplingMap& map, const Layout& initial);

// Rewrites to the device basis {I, RZ, SX, X} + CX. Native SWAPs (from
// routing) become three CX. CCX/C3X must already be decomposed.
Circuit translate_basis(const Circuit& circuit);

// Full pipeline: optimize, decompose, place, route, translate, optimize.
CompiledCircuit compile(const Circuit& circuit, const CouplingMap& map,
                        const CompileOptions& options = {});

// Physical basis string for a compiled circuit: virtual input bit v lands at
// string position initial.v2p(v); padding qubits read '0'.
std::string map_input_to_physical(std::string_view virtual_input, const Layout& initial);

}  // namespace qlock
