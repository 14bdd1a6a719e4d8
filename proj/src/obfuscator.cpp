#include "qlock/obfuscator.hpp"

#include <algorithm>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qlock/error.hpp"
#include "qlock/qasm.hpp"
#include "qlock/rng.hpp"

namespace qlock {

namespace {

std::vector<GateKind> sorted_unique_kinds(std::vector<GateKind> kinds) {
  std::sort(kinds.begin(), kinds.end());
  kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());
  return kinds;
}

std::vector<uint32_t> sorted_unique(std::vector<uint32_t> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

std::vector<GateKind> kinds_in(const Circuit& circuit) {
  std::vector<GateKind> kinds;
  for (const auto& inst : circuit.instructions()) {
    if (const auto* gate = std::get_if<Gate>(&inst)) kinds.push_back(gate->kind);
  }
  return sorted_unique_kinds(std::move(kinds));
}

std::vector<uint32_t> draw_tuple(Rng& rng, const std::vector<uint32_t>& pool,
                                 uint32_t arity) {
  std::vector<uint32_t> remaining = pool;
  std::vector<uint32_t> tuple;
  tuple.reserve(arity);
  for (uint32_t i = 0; i < arity; ++i) {
    const size_t pick = rng.next_below(remaining.size());
    tuple.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + static_cast<ptrdiff_t>(pick));
  }
  return tuple;
}

void append_drawn_gate(Circuit& block, Rng& rng, const std::vector<GateKind>& kinds,
                       const std::vector<uint32_t>& pool) {
  const GateKind kind = kinds[rng.next_below(kinds.size())];
  auto qubits = draw_tuple(rng, pool, static_cast<uint32_t>(gate_arity(kind)));
  double theta = 0.0;
  if (gate_has_param(kind)) theta = rng.next_double() * 2.0 * std::numbers::pi;
  block.add_gate(kind, std::move(qubits), theta);
}

size_t block_start_index(const Circuit& original, const InsertionLocation& location,
                         size_t left_size) {
  switch (location.kind) {
    case InsertionLocation::Kind::Front:
      return 0;
    case InsertionLocation::Kind::Back: {
      size_t pos = 0;
      const auto& insts = original.instructions();
      for (size_t i = 0; i < insts.size(); ++i) {
        if (std::holds_alternative<Gate>(insts[i])) pos = i + 1;
      }
      return pos;
    }
    case InsertionLocation::Kind::Middle:
      return location.side == BarrierSide::Left ? left_size : left_size + 1;
  }
  return 0;
}

}  // namespace

std::string location_name(const InsertionLocation& location) {
  switch (location.kind) {
    case InsertionLocation::Kind::Front: return "front";
    case InsertionLocation::Kind::Middle: return "middle";
    case InsertionLocation::Kind::Back: return "back";
  }
  return "back";
}

InsertionLocation location_from_name(const std::string& name, BarrierSide side) {
  if (name == "front") return InsertionLocation::front();
  if (name == "middle") return InsertionLocation::middle(side);
  if (name == "back") return InsertionLocation::back();
  throw Error(ErrorCode::InvalidArgument, "unknown insertion location: " + name);
}

uint64_t record_binding_hash(const ObfuscationRecord& record) {
  // Seed intentionally excluded: the hash binds structure, so a record built
  // by replaying insert() with a default seed still matches.
  std::ostringstream material;
  material << emit_qasm(record.block) << '|' << location_name(record.location) << '|'
           << (record.location.side == BarrierSide::Left ? "left" : "right") << '|'
           << record.barrier_tag << '|' << record.insertion_index << '|'
           << record.original_gate_count;
  return fnv1a64(material.str());
}

Circuit generate_block(const RandomBlockParams& params) {
  if (params.n_gates < 1) {
    throw Error(ErrorCode::InvalidArgument, "block needs at least one gate");
  }
  if (params.n_qubits == 0) {
    throw Error(ErrorCode::InvalidArgument, "block width must be positive");
  }
  const auto kinds = sorted_unique_kinds(params.allowed_kinds);
  if (kinds.empty()) throw Error(ErrorCode::EmptyPool, "no allowed gate kinds");
  const auto pool = sorted_unique(params.qubit_pool);
  if (pool.empty()) throw Error(ErrorCode::EmptyPool, "empty qubit pool");
  for (uint32_t q : pool) {
    if (q >= params.n_qubits) {
      throw Error(ErrorCode::InvalidQubit,
                  "pool qubit " + std::to_string(q) + " outside width " +
                      std::to_string(params.n_qubits));
    }
  }
  for (GateKind kind : kinds) {
    if (static_cast<size_t>(gate_arity(kind)) > pool.size()) {
      throw Error(ErrorCode::InfeasibleArity,
                  std::string(gate_name(kind)) + " needs " +
                      std::to_string(gate_arity(kind)) + " qubits, pool has " +
                      std::to_string(pool.size()));
    }
  }

  Rng rng = Rng(params.seed).substream("block");
  Circuit block(params.n_qubits, 0);

  if (params.refined) {
    auto measured = sorted_unique(params.measured);
    measured.erase(std::remove_if(measured.begin(), measured.end(),
                                  [&](uint32_t q) {
                                    return std::find(pool.begin(), pool.end(), q) ==
                                           pool.end();
                                  }),
                   measured.end());
    if (measured.empty()) {
      throw Error(ErrorCode::InvalidArgument,
                  "refined block needs a measured qubit inside the pool");
    }
    const uint32_t target = measured[rng.next_below(measured.size())];
    block.add_gate(GateKind::X, {target});

    std::vector<uint32_t> rest = pool;
    rest.erase(std::remove(rest.begin(), rest.end(), target), rest.end());
    std::vector<GateKind> feasible;
    for (GateKind kind : kinds) {
      if (static_cast<size_t>(gate_arity(kind)) <= rest.size()) feasible.push_back(kind);
    }
    if (params.n_gates > 1 && feasible.empty()) {
      throw Error(ErrorCode::InfeasibleArity,
                  "no allowed kind fits once the flipped qubit is excluded");
    }
    for (uint32_t i = 1; i < params.n_gates; ++i) {
      append_drawn_gate(block, rng, feasible, rest);
    }
  } else {
    for (uint32_t i = 0; i < params.n_gates; ++i) {
      append_drawn_gate(block, rng, kinds, pool);
    }
  }
  return block;
}

InsertionResult insert(const Circuit& original, const Circuit& block,
                       const InsertionLocation& location, uint64_t seed) {
  original.require_valid();
  block.require_valid();
  if (block.n_qubits() > original.n_qubits()) {
    throw Error(ErrorCode::QubitCountMismatch,
                "block is wider than the circuit it targets");
  }
  if (block.measure_count() > 0 || block.barrier_count() > 0) {
    throw Error(ErrorCode::InvalidArgument, "block must contain gates only");
  }

  Circuit result(original.n_qubits(), original.n_clbits());
  result.metadata() = original.metadata();
  size_t left_size = 0;

  if (location.kind == InsertionLocation::Kind::Middle) {
    for (const auto& inst : original.instructions()) {
      if (const auto* barrier = std::get_if<Barrier>(&inst);
          barrier && barrier->tag == kMiddleBarrierTag) {
        throw Error(ErrorCode::InvalidArgument,
                    "circuit already carries the marker barrier tag");
      }
    }
    auto [left, right] = original.split_at_midpoint();
    left_size = left.size();
    for (const auto& inst : left.instructions()) result.add(inst);
    if (location.side == BarrierSide::Left) {
      for (const auto& inst : block.instructions()) result.add(inst);
      result.add_full_barrier(kMiddleBarrierTag);
    } else {
      result.add_full_barrier(kMiddleBarrierTag);
      for (const auto& inst : block.instructions()) result.add(inst);
    }
    for (const auto& inst : right.instructions()) result.add(inst);
  } else {
    const size_t pos = block_start_index(original, location, 0);
    const auto& insts = original.instructions();
    for (size_t i = 0; i < pos; ++i) result.add(insts[i]);
    for (const auto& inst : block.instructions()) result.add(inst);
    for (size_t i = pos; i < insts.size(); ++i) result.add(insts[i]);
  }

  ObfuscationRecord record;
  record.block = block;
  record.location = location;
  record.insertion_index = block_start_index(original, location, left_size);
  if (location.kind == InsertionLocation::Kind::Middle) {
    record.barrier_tag = kMiddleBarrierTag;
  }
  record.seed = seed;
  record.original_gate_count = original.gate_count();

  result.metadata()[kObfHashKey] = hash_hex(record_binding_hash(record));
  return {std::move(result), std::move(record)};
}

ObfuscationResult obfuscate(const Circuit& original, RandomBlockParams params,
                            const InsertionLocation& location) {
  original.require_valid();
  if (params.n_qubits == 0) params.n_qubits = original.n_qubits();
  const auto original_kinds = kinds_in(original);
  if (params.allowed_kinds.empty()) params.allowed_kinds = original_kinds;
  if (params.qubit_pool.empty()) {
    params.qubit_pool.resize(original.n_qubits());
    for (uint32_t q = 0; q < original.n_qubits(); ++q) params.qubit_pool[q] = q;
  }
  if (params.refined && params.measured.empty()) {
    params.measured = original.measured_qubits();
  }

  Circuit block = generate_block(params);
  auto [circuit, record] = insert(original, block, location, params.seed);

  std::vector<std::string> warnings;
  for (GateKind kind : kinds_in(block)) {
    if (!std::binary_search(original_kinds.begin(), original_kinds.end(), kind)) {
      warnings.push_back(std::string("block gate kind '") + gate_name(kind) +
                         "' does not appear in the original circuit");
    }
  }
  return {std::move(circuit), std::move(record), std::move(warnings)};
}

namespace {

nlohmann::json layouts_to_json(const ObfuscationRecord::CompiledLayouts& layouts) {
  nlohmann::json j;
  j["initial_p2v"] = layouts.initial_p2v;
  j["final_p2v"] = layouts.final_p2v;
  j["barrier_p2v"] = nlohmann::json::object();
  for (const auto& [tag, p2v] : layouts.barrier_p2v) j["barrier_p2v"][tag] = p2v;
  return j;
}

ObfuscationRecord::CompiledLayouts layouts_from_json(const nlohmann::json& j) {
  ObfuscationRecord::CompiledLayouts layouts;
  layouts.initial_p2v = j.at("initial_p2v").get<std::vector<uint32_t>>();
  layouts.final_p2v = j.at("final_p2v").get<std::vector<uint32_t>>();
  if (j.contains("barrier_p2v")) {
    for (const auto& [tag, p2v] : j.at("barrier_p2v").items()) {
      layouts.barrier_p2v.emplace_back(tag, p2v.get<std::vector<uint32_t>>());
    }
  }
  return layouts;
}

}  // namespace

std::string record_to_json(const ObfuscationRecord& record) {
  nlohmann::json j;
  j["v"] = 1;
  j["toolkit"] = "qlock";
  j["rng_version"] = kRngVersion;
  j["block_qasm"] = emit_qasm(record.block);
  j["location"] = location_name(record.location);
  j["barrier_side"] = record.location.side == BarrierSide::Left ? "left" : "right";
  j["barrier_tag"] = record.barrier_tag;
  j["insertion_index"] = record.insertion_index;
  j["seed"] = record.seed;
  j["original_gate_count"] = record.original_gate_count;
  j["layouts"] = record.layouts ? layouts_to_json(*record.layouts)
                                : nlohmann::json(nullptr);
  return j.dump(2) + "\n";
}

ObfuscationRecord record_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("record: ") + e.what());
  }
  try {
    if (!j.contains("v") || !j.at("v").is_number_integer()) {
      throw Error(ErrorCode::ParseError, "record: missing schema version");
    }
    if (j.at("v").get<int>() != 1) {
      throw Error(ErrorCode::SchemaVersionMismatch,
                  "record schema v" + std::to_string(j.at("v").get<int>()) +
                      " not supported");
    }
    ObfuscationRecord record;
    record.block = parse_qasm(j.at("block_qasm").get<std::string>());
    const auto side = j.at("barrier_side").get<std::string>() == "right"
                          ? BarrierSide::Right
                          : BarrierSide::Left;
    record.location = location_from_name(j.at("location").get<std::string>(), side);
    record.barrier_tag = j.at("barrier_tag").get<std::string>();
    record.insertion_index = j.at("insertion_index").get<size_t>();
    record.seed = j.at("seed").get<uint64_t>();
    record.original_gate_count = j.at("original_gate_count").get<size_t>();
    if (j.contains("layouts") && !j.at("layouts").is_null()) {
      record.layouts = layouts_from_json(j.at("layouts"));
    }
    return record;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("record: ") + e.what());
  }
}

void write_record_file(const std::string& path, const ObfuscationRecord& record) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  out << record_to_json(record);
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path);
}

ObfuscationRecord read_record_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return record_from_json(buffer.str());
}

}  // namespace qlock
