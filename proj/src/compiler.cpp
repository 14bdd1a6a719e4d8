#include "qlock/compiler.hpp"

#include <algorithm>
#include <deque>
#include <numbers>
#include <set>

#include <json.hpp>

#include "qlock/error.hpp"
#include "qlock/qasm.hpp"

namespace qlock {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<uint32_t> layout_to_json_ready(const Layout& layout) {
  return layout.p2v_vector();
}

nlohmann::json layout_json(const Layout& layout) {
  return nlohmann::json{{"p2v", layout_to_json_ready(layout)}};
}

}  // namespace

CouplingMap::CouplingMap(uint32_t n_physical,
                         std::vector<std::pair<uint32_t, uint32_t>> edges)
    : n_physical_(n_physical), adjacency_(n_physical) {
  for (auto [a, b] : edges) {
    if (a >= n_physical || b >= n_physical) {
      throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
    }
    if (a == b) throw Error(ErrorCode::InvalidArgument, "self-loop edge");
    if (a > b) std::swap(a, b);
    if (!connected(a, b)) {
      edges_.emplace_back(a, b);
      adjacency_[a].push_back(b);
      adjacency_[b].push_back(a);
    }
  }
  for (auto& row : adjacency_) std::sort(row.begin(), row.end());
}

bool CouplingMap::connected(uint32_t a, uint32_t b) const {
  if (a > b) std::swap(a, b);
  return std::find(edges_.begin(), edges_.end(), std::make_pair(a, b)) != edges_.end();
}

const std::vector<uint32_t>& CouplingMap::neighbors(uint32_t q) const {
  return adjacency_.at(q);
}

uint32_t CouplingMap::degree(uint32_t q) const {
  return static_cast<uint32_t>(adjacency_.at(q).size());
}

std::vector<uint32_t> CouplingMap::shortest_path(uint32_t a, uint32_t b) const {
  // Distances to b, then a greedy descent from a picking the lowest-index
  // neighbor, which yields the lexicographically smallest shortest path.
  std::vector<int64_t> dist(n_physical_, -1);
  std::deque<uint32_t> queue{b};
  dist[b] = 0;
  while (!queue.empty()) {
    const uint32_t cur = queue.front();
    queue.pop_front();
    for (uint32_t next : adjacency_[cur]) {
      if (dist[next] < 0) {
        dist[next] = dist[cur] + 1;
        queue.push_back(next);
      }
    }
  }
  if (dist[a] < 0) {
    throw Error(ErrorCode::DisconnectedMap,
                "no path between physical qubits " + std::to_string(a) + " and " +
                    std::to_string(b));
  }
  std::vector<uint32_t> path{a};
  uint32_t cur = a;
  while (cur != b) {
    for (uint32_t next : adjacency_[cur]) {
      if (dist[next] == dist[cur] - 1) {
        path.push_back(next);
        cur = next;
        break;
      }
    }
  }
  return path;
}

CouplingMap CouplingMap::valencia() {
  return CouplingMap(5, {{0, 1}, {1, 2}, {1, 3}, {3, 4}});
}

CouplingMap CouplingMap::line(uint32_t n) {
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (uint32_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return CouplingMap(n, std::move(edges));
}

CouplingMap CouplingMap::default_for(uint32_t n_qubits) {
  return n_qubits <= 5 ? valencia() : line(n_qubits);
}

CouplingMap CouplingMap::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("coupling map: ") + e.what());
  }
  if (!j.is_object() || !j.contains("n") || !j.contains("edges")) {
    throw Error(ErrorCode::ParseError, "coupling map needs fields 'n' and 'edges'");
  }
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (const auto& edge : j["edges"]) {
    if (!edge.is_array() || edge.size() != 2) {
      throw Error(ErrorCode::ParseError, "edges must be [a, b] pairs");
    }
    edges.emplace_back(edge[0].get<uint32_t>(), edge[1].get<uint32_t>());
  }
  return CouplingMap(j["n"].get<uint32_t>(), std::move(edges));
}

std::string CouplingMap::to_json() const {
  nlohmann::json j;
  j["n"] = n_physical_;
  j["edges"] = nlohmann::json::array();
  for (const auto& [a, b] : edges_) j["edges"].push_back({a, b});
  return j.dump(2) + "\n";
}

Layout Layout::trivial(uint32_t n) {
  std::vector<uint32_t> v2p(n);
  for (uint32_t i = 0; i < n; ++i) v2p[i] = i;
  return from_v2p(std::move(v2p));
}

Layout Layout::from_v2p(std::vector<uint32_t> v2p) {
  Layout layout;
  layout.p2v_.assign(v2p.size(), UINT32_MAX);
  for (uint32_t v = 0; v < v2p.size(); ++v) {
    const uint32_t p = v2p[v];
    if (p >= v2p.size() || layout.p2v_[p] != UINT32_MAX) {
      throw Error(ErrorCode::InvalidArgument, "layout is not a bijection");
    }
    layout.p2v_[p] = v;
  }
  layout.v2p_ = std::move(v2p);
  return layout;
}

void Layout::swap_physical(uint32_t pa, uint32_t pb) {
  const uint32_t va = p2v_[pa];
  const uint32_t vb = p2v_[pb];
  std::swap(p2v_[pa], p2v_[pb]);
  v2p_[va] = pb;
  v2p_[vb] = pa;
}

std::string CompiledCircuit::report_json() const {
  nlohmann::json j;
  j["initial_layout"] = layout_json(initial_layout);
  j["final_layout"] = layout_json(final_layout);
  j["n_physical"] = circuit.n_qubits();
  j["pass_log"] = nlohmann::json::array();
  for (const auto& stat : pass_log) {
    j["pass_log"].push_back({{"pass", stat.pass},
                             {"gates_before", stat.gates_before},
                             {"gates_after", stat.gates_after}});
  }
  j["barrier_layouts"] = nlohmann::json::object();
  for (const auto& [tag, layout] : barrier_layouts) {
    j["barrier_layouts"][tag] = layout_json(layout);
  }
  return j.dump(2) + "\n";
}

Circuit optimize_virtual(const Circuit& circuit) {
  const auto& input = circuit.instructions();
  std::vector<Instruction> insts(input.begin(), input.end());
  std::vector<bool> alive(insts.size(), true);
  // Per-qubit stacks of the most recent live instruction touching each qubit.
  std::vector<std::vector<size_t>> tops(circuit.n_qubits());

  const auto push = [&](size_t index) {
    const auto& inst = insts[index];
    for (uint32_t q = 0; q < circuit.n_qubits(); ++q) {
      if (touches_qubit(inst, q)) tops[q].push_back(index);
    }
  };
  const auto pop = [&](size_t index) {
    const auto& inst = insts[index];
    for (uint32_t q = 0; q < circuit.n_qubits(); ++q) {
      if (touches_qubit(inst, q)) tops[q].pop_back();
    }
  };

  for (size_t i = 0; i < insts.size(); ++i) {
    auto* gate = std::get_if<Gate>(&insts[i]);
    if (!gate) {
      push(i);
      continue;
    }
    // The candidate partner is the previous live toucher, and it must be the
    // same instruction on every operand qubit or something blocks the pair.
    const auto top_of = [&](uint32_t q) {
      return tops[q].empty() ? SIZE_MAX : tops[q].back();
    };
    size_t partner = top_of(gate->qubits.front());
    for (uint32_t q : gate->qubits) {
      if (top_of(q) != partner) {
        partner = SIZE_MAX;
        break;
      }
    }
    if (partner != SIZE_MAX) {
      if (auto* prev = std::get_if<Gate>(&insts[partner]);
          prev && prev->qubits == gate->qubits) {
        if (prev->kind == GateKind::RZ && gate->kind == GateKind::RZ) {
          const double sum = prev->theta + gate->theta;
          if (sum == 0.0) {
            pop(partner);
            alive[partner] = false;
          } else {
            prev->theta = sum;
          }
          alive[i] = false;
          continue;
        }
        if (gate->kind != GateKind::RZ && gate->kind == adjoint_kind(prev->kind)) {
          pop(partner);
          alive[partner] = false;
          alive[i] = false;
          continue;
        }
      }
    }
    push(i);
  }

  Circuit out(circuit.n_qubits(), circuit.n_clbits());
  out.metadata() = circuit.metadata();
  for (size_t i = 0; i < insts.size(); ++i) {
    if (alive[i]) out.add(std::move(insts[i]));
  }
  return out;
}

namespace {

void emit_ccx(Circuit& out, uint32_t a, uint32_t b, uint32_t t) {
  out.add_gate(GateKind::H, {t});
  out.add_gate(GateKind::CX, {b, t});
  out.add_gate(GateKind::Tdg, {t});
  out.add_gate(GateKind::CX, {a, t});
  out.add_gate(GateKind::T, {t});
  out.add_gate(GateKind::CX, {b, t});
  out.add_gate(GateKind::Tdg, {t});
  out.add_gate(GateKind::CX, {a, t});
  out.add_gate(GateKind::T, {b});
  out.add_gate(GateKind::T, {t});
  out.add_gate(GateKind::CX, {a, b});
  out.add_gate(GateKind::H, {t});
  out.add_gate(GateKind::T, {a});
  out.add_gate(GateKind::Tdg, {b});
  out.add_gate(GateKind::CX, {a, b});
}

// Ancilla-free phase-gradient construction over {H, RZ, CX}; each cx/rz/cx
// cluster realizes one controlled rotation by pi/8.
void emit_c3x(Circuit& out, uint32_t a, uint32_t b, uint32_t c, uint32_t d) {
  const double th = kPi / 8;
  out.add_gate(GateKind::H, {d});
  out.add_gate(GateKind::RZ, {a}, th);
  out.add_gate(GateKind::RZ, {b}, th);
  out.add_gate(GateKind::RZ, {c}, th);
  out.add_gate(GateKind::RZ, {d}, th);
  out.add_gate(GateKind::CX, {a, b});
  out.add_gate(GateKind::RZ, {b}, -th);
  out.add_gate(GateKind::CX, {a, b});
  out.add_gate(GateKind::CX, {b, c});
  out.add_gate(GateKind::RZ, {c}, -th);
  out.add_gate(GateKind::CX, {a, c});
  out.add_gate(GateKind::RZ, {c}, th);
  out.add_gate(GateKind::CX, {b, c});
  out.add_gate(GateKind::RZ, {c}, -th);
  out.add_gate(GateKind::CX, {a, c});
  out.add_gate(GateKind::CX, {c, d});
  out.add_gate(GateKind::RZ, {d}, -th);
  out.add_gate(GateKind::CX, {b, d});
  out.add_gate(GateKind::RZ, {d}, th);
  out.add_gate(GateKind::CX, {c, d});
  out.add_gate(GateKind::RZ, {d}, -th);
  out.add_gate(GateKind::CX, {a, d});
  out.add_gate(GateKind::RZ, {d}, th);
  out.add_gate(GateKind::CX, {c, d});
  out.add_gate(GateKind::RZ, {d}, -th);
  out.add_gate(GateKind::CX, {b, d});
  out.add_gate(GateKind::RZ, {d}, th);
  out.add_gate(GateKind::CX, {c, d});
  out.add_gate(GateKind::RZ, {d}, -th);
  out.add_gate(GateKind::CX, {a, d});
  out.add_gate(GateKind::H, {d});
}

}  // namespace

Circuit decompose(const Circuit& circuit) {
  Circuit out(circuit.n_qubits(), circuit.n_clbits());
  out.metadata() = circuit.metadata();
  for (const auto& inst : circuit.instructions()) {
    const auto* gate = std::get_if<Gate>(&inst);
    if (!gate) {
      out.add(inst);
      continue;
    }
    switch (gate->kind) {
      case GateKind::CCX:
        emit_ccx(out, gate->qubits[0], gate->qubits[1], gate->qubits[2]);
        break;
      case GateKind::C3X:
        emit_c3x(out, gate->qubits[0], gate->qubits[1], gate->qubits[2],
                 gate->qubits[3]);
        break;
      case GateKind::SWAP:
        out.add_gate(GateKind::CX, {gate->qubits[0], gate->qubits[1]});
        out.add_gate(GateKind::CX, {gate->qubits[1], gate->qubits[0]});
        out.add_gate(GateKind::CX, {gate->qubits[0], gate->qubits[1]});
        break;
      default:
        out.add(inst);
        break;
    }
  }
  return out;
}

Layout place(const Circuit& circuit, const CouplingMap& map,
             PlacementStrategy strategy) {
  if (circuit.n_qubits() > map.n_physical()) {
    throw Error(ErrorCode::TooManyVirtualQubits,
                std::to_string(circuit.n_qubits()) + " virtual qubits onto " +
                    std::to_string(map.n_physical()) + " physical");
  }
  const uint32_t n = map.n_physical();
  if (strategy == PlacementStrategy::Trivial) return Layout::trivial(n);

  std::vector<uint32_t> weight(n, 0);
  for (const auto& inst : circuit.instructions()) {
    if (const auto* gate = std::get_if<Gate>(&inst)) {
      if (gate->qubits.size() >= 2) {
        for (uint32_t q : gate->qubits) ++weight[q];
      }
    }
  }
  std::vector<uint32_t> virtuals(n), physicals(n);
  for (uint32_t i = 0; i < n; ++i) virtuals[i] = physicals[i] = i;
  std::stable_sort(virtuals.begin(), virtuals.end(),
                   [&](uint32_t a, uint32_t b) { return weight[a] > weight[b]; });
  std::stable_sort(physicals.begin(), physicals.end(), [&](uint32_t a, uint32_t b) {
    return map.degree(a) > map.degree(b);
  });
  std::vector<uint32_t> v2p(n);
  for (uint32_t i = 0; i < n; ++i) v2p[virtuals[i]] = physicals[i];
  return Layout::from_v2p(std::move(v2p));
}

RouteResult route(const Circuit& circuit, const CouplingMap& map, const Layout& initial) {
  if (circuit.n_qubits() > map.n_physical()) {
    throw Error(ErrorCode::TooManyVirtualQubits,
                std::to_string(circuit.n_qubits()) + " virtual qubits onto " +
                    std::to_string(map.n_physical()) + " physical");
  }
  if (initial.size() != map.n_physical()) {
    throw Error(ErrorCode::InvalidArgument, "layout size does not match device");
  }
  RouteResult result;
  result.circuit = Circuit(map.n_physical(), circuit.n_clbits());
  result.circuit.metadata() = circuit.metadata();
  Layout layout = initial;

  for (const auto& inst : circuit.instructions()) {
    if (const auto* gate = std::get_if<Gate>(&inst)) {
      if (gate->qubits.size() == 1) {
        result.circuit.add_gate(gate->kind, {layout.v2p(gate->qubits[0])}, gate->theta);
      } else if (gate->qubits.size() == 2) {
        uint32_t pa = layout.v2p(gate->qubits[0]);
        const uint32_t pb = layout.v2p(gate->qubits[1]);
        while (!map.connected(pa, pb)) {
          const auto path = map.shortest_path(pa, pb);
          result.circuit.add_gate(GateKind::SWAP, {path[0], path[1]});
          layout.swap_physical(path[0], path[1]);
          pa = path[1];
        }
        result.circuit.add_gate(gate->kind, {pa, pb}, gate->theta);
      } else {
        throw Error(ErrorCode::UnexpectedGate,
                    std::string(gate_name(gate->kind)) + " must be decomposed before routing");
      }
    } else if (const auto* barrier = std::get_if<Barrier>(&inst)) {
      std::vector<uint32_t> mapped;
      mapped.reserve(barrier->qubits.size());
      for (uint32_t q : barrier->qubits) mapped.push_back(layout.v2p(q));
      std::sort(mapped.begin(), mapped.end());
      result.circuit.add(Barrier{std::move(mapped), barrier->tag});
      if (!barrier->tag.empty()) result.barrier_layouts[barrier->tag] = layout;
    } else {
      const auto& m = std::get<Measure>(inst);
      result.circuit.add_measure(layout.v2p(m.qubit), m.clbit);
    }
  }
  result.final_layout = layout;
  return result;
}

Circuit translate_basis(const Circuit& circuit) {
  Circuit out(circuit.n_qubits(), circuit.n_clbits());
  out.metadata() = circuit.metadata();
  for (const auto& inst : circuit.instructions()) {
    const auto* gate = std::get_if<Gate>(&inst);
    if (!gate) {
      out.add(inst);
      continue;
    }
    const auto q = gate->qubits;
    switch (gate->kind) {
      case GateKind::I:
      case GateKind::X:
      case GateKind::SX:
      case GateKind::RZ:
      case GateKind::CX:
        out.add(inst);
        break;
      case GateKind::H:
        out.add_gate(GateKind::RZ, {q[0]}, kPi / 2);
        out.add_gate(GateKind::SX, {q[0]});
        out.add_gate(GateKind::RZ, {q[0]}, kPi / 2);
        break;
      case GateKind::S:
        out.add_gate(GateKind::RZ, {q[0]}, kPi / 2);
        break;
      case GateKind::Sdg:
        out.add_gate(GateKind::RZ, {q[0]}, -kPi / 2);
        break;
      case GateKind::T:
        out.add_gate(GateKind::RZ, {q[0]}, kPi / 4);
        break;
      case GateKind::Tdg:
        out.add_gate(GateKind::RZ, {q[0]}, -kPi / 4);
        break;
      case GateKind::SXdg:
        out.add_gate(GateKind::RZ, {q[0]}, kPi);
        out.add_gate(GateKind::SX, {q[0]});
        out.add_gate(GateKind::RZ, {q[0]}, kPi);
        break;
      case GateKind::SWAP:
        out.add_gate(GateKind::CX, {q[0], q[1]});
        out.add_gate(GateKind::CX, {q[1], q[0]});
        out.add_gate(GateKind::CX, {q[0], q[1]});
        break;
      default:
        throw Error(ErrorCode::UnexpectedGate,
                    std::string(gate_name(gate->kind)) + " reached basis translation");
    }
  }
  return out;
}

CompiledCircuit compile(const Circuit& circuit, const CouplingMap& map,
                        const CompileOptions& options) {
  circuit.require_valid();
  CompiledCircuit result;
  const auto log = [&](const char* pass, const Circuit& before, const Circuit& after) {
    result.pass_log.push_back({pass, before.gate_count(), after.gate_count()});
  };

  const Circuit opt1 = optimize_virtual(circuit);
  log("optimize_virtual", circuit, opt1);
  const Circuit lowered = decompose(opt1);
  log("decompose", opt1, lowered);
  log("place", lowered, lowered);

  Layout initial;
  if (options.initial_layout) {
    if (options.initial_layout->size() != map.n_physical()) {
      throw Error(ErrorCode::InvalidArgument, "initial layout size mismatch");
    }
    if (circuit.n_qubits() > map.n_physical()) {
      throw Error(ErrorCode::TooManyVirtualQubits, "circuit exceeds device size");
    }
    initial = *options.initial_layout;
  } else {
    initial = place(lowered, map, options.placement);
  }
  result.initial_layout = initial;

  RouteResult routed = route(lowered, map, initial);
  log("route", lowered, routed.circuit);
  result.final_layout = routed.final_layout;
  result.barrier_layouts = std::move(routed.barrier_layouts);

  const Circuit translated = translate_basis(routed.circuit);
  log("translate_basis", routed.circuit, translated);
  result.circuit = optimize_virtual(translated);
  log("optimize_virtual", translated, result.circuit);
  return result;
}

std::string map_input_to_physical(std::string_view virtual_input, const Layout& initial) {
  std::string out(initial.size(), '0');
  if (virtual_input.size() > initial.size()) {
    throw Error(ErrorCode::InvalidArgument, "input longer than device width");
  }
  for (uint32_t v = 0; v < virtual_input.size(); ++v) {
    out[initial.v2p(v)] = virtual_input[v];
  }
  return out;
}

}  // namespace qlock
