#include "qlock/deobfuscator.hpp"

#include <algorithm>
#include <deque>

#include <json.hpp>

#include "qlock/error.hpp"
#include "qlock/rng.hpp"

namespace qlock {

std::string stitch_mode_name(StitchMode mode) {
  return mode == StitchMode::FeedLayout ? "feed" : "swap";
}

StitchMode stitch_mode_from_name(const std::string& name) {
  if (name == "feed") return StitchMode::FeedLayout;
  if (name == "swap") return StitchMode::SwapLayer;
  throw Error(ErrorCode::InvalidArgument, "unknown stitch mode: " + name);
}

Circuit build_inverse(const ObfuscationRecord& record) {
  return record.block.inverse();
}

Circuit swap_layer(const Layout& from, const Layout& to, const CouplingMap& map) {
  if (from.size() != map.n_physical() || to.size() != map.n_physical()) {
    throw Error(ErrorCode::InvalidArgument, "layout size does not match device");
  }
  Circuit out(map.n_physical(), 0);
  if (from == to) return out;

  const uint32_t n = map.n_physical();
  // BFS spanning tree rooted at 0; a disconnected device cannot host a
  // permutation layer.
  std::vector<int64_t> parent(n, -1);
  std::vector<uint32_t> order;
  std::vector<bool> seen(n, false);
  std::deque<uint32_t> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    const uint32_t cur = queue.front();
    queue.pop_front();
    order.push_back(cur);
    for (uint32_t next : map.neighbors(cur)) {
      if (!seen[next]) {
        seen[next] = true;
        parent[next] = cur;
        queue.push_back(next);
      }
    }
  }
  if (order.size() != n) {
    throw Error(ErrorCode::DisconnectedMap, "device graph is not connected");
  }
  std::vector<uint32_t> depth(n, 0);
  for (uint32_t node : order) {
    if (parent[node] >= 0) depth[node] = depth[parent[node]] + 1;
  }
  const auto tree_path = [&](uint32_t a, uint32_t b) {
    std::vector<uint32_t> up{a}, down{b};
    uint32_t x = a, y = b;
    while (x != y) {
      if (depth[x] >= depth[y]) {
        x = static_cast<uint32_t>(parent[x]);
        up.push_back(x);
      } else {
        y = static_cast<uint32_t>(parent[y]);
        down.push_back(y);
      }
    }
    // up already ends at the meeting node; append the b-side strictly below it.
    up.insert(up.end(), down.rbegin() + 1, down.rend());
    return up;
  };

  std::vector<uint32_t> current = from.p2v_vector();
  // Deepest nodes first: once a node receives its token, no later path
  // crosses it, so each placement is permanent.
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const uint32_t node = *it;
    const uint32_t token = to.p2v(node);
    const auto at = std::find(current.begin(), current.end(), token);
    const auto start = static_cast<uint32_t>(at - current.begin());
    const auto path = tree_path(start, node);
    for (size_t i = 0; i + 1 < path.size(); ++i) {
      out.add_gate(GateKind::SWAP, {path[i], path[i + 1]});
      std::swap(current[path[i]], current[path[i + 1]]);
    }
  }
  return out;
}

namespace {

Layout layout_from_p2v(const std::vector<uint32_t>& p2v) {
  std::vector<uint32_t> v2p(p2v.size());
  for (uint32_t p = 0; p < p2v.size(); ++p) {
    if (p2v[p] >= p2v.size()) {
      throw Error(ErrorCode::InvalidArgument, "layout is not a bijection");
    }
    v2p[p2v[p]] = p;
  }
  return Layout::from_v2p(std::move(v2p));
}

void append_instructions(Circuit& dst, const Circuit& src) {
  for (const auto& inst : src.instructions()) dst.add(inst);
}

void check_binding(const CompiledCircuit& compiled_obf, const ObfuscationRecord& record) {
  const auto& meta = compiled_obf.circuit.metadata();
  const auto it = meta.find(kObfHashKey);
  if (it == meta.end()) {
    throw Error(ErrorCode::RecordMismatch, "compiled circuit carries no binding hash");
  }
  if (it->second != hash_hex(record_binding_hash(record))) {
    throw Error(ErrorCode::RecordMismatch,
                "record does not match the compiled circuit's binding hash");
  }
}

}  // namespace

CompiledCircuit attach_layouts(const Circuit& compiled, const ObfuscationRecord& record) {
  if (!record.layouts) {
    throw Error(ErrorCode::RecordMismatch,
                "record holds no layouts; run the compile step with the record");
  }
  CompiledCircuit result;
  result.circuit = compiled;
  result.initial_layout = layout_from_p2v(record.layouts->initial_p2v);
  result.final_layout = layout_from_p2v(record.layouts->final_p2v);
  for (const auto& [tag, p2v] : record.layouts->barrier_p2v) {
    result.barrier_layouts[tag] = layout_from_p2v(p2v);
  }
  return result;
}

void store_layouts(ObfuscationRecord& record, const CompiledCircuit& compiled) {
  ObfuscationRecord::CompiledLayouts layouts;
  layouts.initial_p2v = compiled.initial_layout.p2v_vector();
  layouts.final_p2v = compiled.final_layout.p2v_vector();
  for (const auto& [tag, layout] : compiled.barrier_layouts) {
    layouts.barrier_p2v.emplace_back(tag, layout.p2v_vector());
  }
  record.layouts = std::move(layouts);
}

std::string DeobfuscationResult::report_json() const {
  nlohmann::json j;
  j["mode"] = stitch_mode_name(mode);
  j["location"] = location;
  j["junction_swaps"] = junction_swaps;
  j["gates_compiled"] = gates_compiled;
  j["gates_inverse"] = gates_inverse;
  j["gates_stitched"] = gates_stitched;
  j["initial_p2v"] = initial_layout.p2v_vector();
  j["final_p2v"] = final_layout.p2v_vector();
  return j.dump(2) + "\n";
}

DeobfuscationResult deobfuscate(const CompiledCircuit& compiled_obf,
                                const ObfuscationRecord& record,
                                const CouplingMap& map, StitchMode mode) {
  check_binding(compiled_obf, record);
  const uint32_t n = map.n_physical();
  if (compiled_obf.circuit.n_qubits() != n) {
    throw Error(ErrorCode::InvalidArgument,
                "compiled circuit width does not match the device");
  }

  const Circuit inverse = build_inverse(record);
  DeobfuscationResult result;
  result.mode = mode;
  result.location = location_name(record.location);
  result.gates_compiled = compiled_obf.circuit.gate_count();

  Circuit stitched(n, compiled_obf.circuit.n_clbits());
  stitched.metadata() = compiled_obf.circuit.metadata();
  stitched.metadata().erase(kObfHashKey);

  const auto compile_inverse = [&](const Layout& junction) {
    CompileOptions options;
    options.initial_layout =
        mode == StitchMode::FeedLayout ? junction : Layout::trivial(n);
    return compile(inverse, map, options);
  };
  const auto bridge_between = [&](const Layout& from, const Layout& to) {
    const Circuit layer = swap_layer(from, to, map);
    result.junction_swaps += layer.gate_count();
    return translate_basis(layer);
  };

  switch (record.location.kind) {
    case InsertionLocation::Kind::Back: {
      const CompiledCircuit inv_c = compile_inverse(compiled_obf.final_layout);
      result.gates_inverse = inv_c.circuit.gate_count();
      std::vector<Measure> measures;
      for (const auto& inst : compiled_obf.circuit.instructions()) {
        if (const auto* m = std::get_if<Measure>(&inst)) {
          measures.push_back(*m);
        } else {
          stitched.add(inst);
        }
      }
      if (mode == StitchMode::SwapLayer) {
        append_instructions(stitched,
                            bridge_between(compiled_obf.final_layout,
                                           inv_c.initial_layout));
      }
      append_instructions(stitched, inv_c.circuit);
      for (const auto& m : measures) {
        const uint32_t v = compiled_obf.final_layout.p2v(m.qubit);
        stitched.add_measure(inv_c.final_layout.v2p(v), m.clbit);
      }
      result.initial_layout = compiled_obf.initial_layout;
      result.final_layout = inv_c.final_layout;
      break;
    }
    case InsertionLocation::Kind::Front: {
      const CompiledCircuit inv_c = compile_inverse(compiled_obf.initial_layout);
      result.gates_inverse = inv_c.circuit.gate_count();
      append_instructions(stitched, inv_c.circuit);
      append_instructions(
          stitched, bridge_between(inv_c.final_layout, compiled_obf.initial_layout));
      append_instructions(stitched, compiled_obf.circuit);
      result.initial_layout = inv_c.initial_layout;
      result.final_layout = compiled_obf.final_layout;
      break;
    }
    case InsertionLocation::Kind::Middle: {
      const auto layout_it = compiled_obf.barrier_layouts.find(record.barrier_tag);
      if (record.barrier_tag.empty() || layout_it == compiled_obf.barrier_layouts.end()) {
        throw Error(ErrorCode::MissingBarrierTag,
                    "tagged barrier layout missing from the compiled circuit");
      }
      const Layout& at_barrier = layout_it->second;
      const CompiledCircuit inv_c = compile_inverse(at_barrier);
      result.gates_inverse = inv_c.circuit.gate_count();

      Circuit splice(n, 0);
      if (mode == StitchMode::SwapLayer) {
        append_instructions(splice, bridge_between(at_barrier, inv_c.initial_layout));
      }
      append_instructions(splice, inv_c.circuit);
      append_instructions(splice, bridge_between(inv_c.final_layout, at_barrier));

      bool spliced = false;
      for (const auto& inst : compiled_obf.circuit.instructions()) {
        const auto* barrier = std::get_if<Barrier>(&inst);
        const bool is_anchor =
            barrier && barrier->tag == record.barrier_tag && !spliced;
        if (is_anchor && record.location.side == BarrierSide::Left) {
          append_instructions(stitched, splice);
          stitched.add(inst);
          spliced = true;
        } else if (is_anchor) {
          stitched.add(inst);
          append_instructions(stitched, splice);
          spliced = true;
        } else {
          stitched.add(inst);
        }
      }
      if (!spliced) {
        throw Error(ErrorCode::MissingBarrierTag,
                    "tagged barrier not present in the compiled circuit");
      }
      result.initial_layout = compiled_obf.initial_layout;
      result.final_layout = compiled_obf.final_layout;
      break;
    }
  }

  stitched.require_valid();
  result.gates_stitched = stitched.gate_count();
  result.circuit = std::move(stitched);
  return result;
}

}  // namespace qlock
