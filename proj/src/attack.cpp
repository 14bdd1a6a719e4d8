#include "qlock/attack.hpp"

#include <algorithm>
#include <bit>
#include <variant>

#include <json.hpp>

#include "qlock/error.hpp"
#include "qlock/metrics.hpp"
#include "qlock/qasm.hpp"
#include "qlock/rng.hpp"

namespace qlock {

namespace {

// Indices into the instruction stream that hold plain gates.
std::vector<size_t> gate_positions(const Circuit& c) {
  std::vector<size_t> pos;
  for (size_t i = 0; i < c.size(); ++i) {
    if (std::holds_alternative<Gate>(c.instructions()[i])) pos.push_back(i);
  }
  return pos;
}

Circuit without_instructions(const Circuit& c,
                             const std::vector<size_t>& removed) {
  Circuit out(c.n_qubits(), c.n_clbits());
  out.metadata() = c.metadata();
  size_t r = 0;
  for (size_t i = 0; i < c.size(); ++i) {
    while (r < removed.size() && removed[r] < i) ++r;
    if (r < removed.size() && removed[r] == i) continue;
    out.add(c.instructions()[i]);
  }
  return out;
}

PruneCandidate make_candidate(const Circuit& obf, PruneSide side, uint32_t k,
                              std::vector<size_t> removed) {
  std::sort(removed.begin(), removed.end());
  PruneCandidate cand;
  cand.removed_side = side;
  cand.removed_count = k;
  cand.pruned = without_instructions(obf, removed);
  return cand;
}

size_t first_tagged_barrier(const Circuit& c) {
  for (size_t i = 0; i < c.size(); ++i) {
    const auto* b = std::get_if<Barrier>(&c.instructions()[i]);
    if (b != nullptr && !b->tag.empty()) return i;
  }
  throw Error(ErrorCode::NoBarrier,
              "middle-barrier pruning needs a tagged barrier in the circuit");
}

}  // namespace

std::string attack_scenario_name(AttackScenario scenario) {
  switch (scenario) {
    case AttackScenario::MiddleBarrier: return "middle-barrier";
    case AttackScenario::UnknownEdge: return "unknown-edge";
    case AttackScenario::UnknownCount: return "unknown-count";
  }
  throw Error(ErrorCode::BadScenario, "unhandled attack scenario");
}

AttackScenario attack_scenario_from_name(const std::string& name) {
  if (name == "middle-barrier") return AttackScenario::MiddleBarrier;
  if (name == "unknown-edge") return AttackScenario::UnknownEdge;
  if (name == "unknown-count") return AttackScenario::UnknownCount;
  throw Error(ErrorCode::BadScenario, "unknown attack scenario '" + name + "'");
}

std::string prune_side_name(PruneSide side) {
  switch (side) {
    case PruneSide::Left: return "left";
    case PruneSide::Right: return "right";
    case PruneSide::Front: return "front";
    case PruneSide::Back: return "back";
  }
  return "unknown";
}

uint64_t candidate_count(uint32_t n, AttackScenario scenario) {
  switch (scenario) {
    case AttackScenario::MiddleBarrier:
      if (n < 3) {
        throw Error(ErrorCode::InvalidArgument,
                    "middle-barrier count needs at least 3 gates, got " +
                        std::to_string(n));
      }
      return static_cast<uint64_t>(n) - 2;
    case AttackScenario::UnknownEdge:
      if (n < 2) {
        throw Error(ErrorCode::InvalidArgument,
                    "unknown-edge count needs at least 2 gates, got " +
                        std::to_string(n));
      }
      return 2 * (static_cast<uint64_t>(n) - 1);
    case AttackScenario::UnknownCount:
      if (n < 2) {
        throw Error(ErrorCode::InvalidArgument,
                    "unknown-count needs at least 2 gates, got " +
                        std::to_string(n));
      }
      if (n > 63) {
        throw Error(ErrorCode::InvalidArgument,
                    "unknown-count size overflows past 63 gates");
      }
      return (uint64_t{1} << n) - 2;
  }
  throw Error(ErrorCode::BadScenario, "unhandled attack scenario");
}

std::vector<PruneCandidate> enumerate_candidates(const Circuit& obf,
                                                 AttackScenario scenario) {
  const std::vector<size_t> gates = gate_positions(obf);
  const size_t n = gates.size();
  std::vector<PruneCandidate> out;

  switch (scenario) {
    case AttackScenario::MiddleBarrier: {
      const size_t bar = first_tagged_barrier(obf);
      std::vector<size_t> left, right;
      for (size_t p : gates) (p < bar ? left : right).push_back(p);
      // Strip the k gates nearest the barrier, leaving at least one on the
      // stripped side.
      for (uint32_t k = 1; left.size() > 0 && k + 1 <= left.size(); ++k) {
        std::vector<size_t> removed(left.end() - k, left.end());
        out.push_back(make_candidate(obf, PruneSide::Left, k, removed));
      }
      for (uint32_t k = 1; right.size() > 0 && k + 1 <= right.size(); ++k) {
        std::vector<size_t> removed(right.begin(), right.begin() + k);
        out.push_back(make_candidate(obf, PruneSide::Right, k, removed));
      }
      break;
    }
    case AttackScenario::UnknownEdge: {
      if (n < 2) {
        throw Error(ErrorCode::TooFewGates,
                    "unknown-edge pruning needs at least 2 gates");
      }
      for (uint32_t k = 1; k <= n - 1; ++k) {
        std::vector<size_t> removed(gates.begin(), gates.begin() + k);
        out.push_back(make_candidate(obf, PruneSide::Front, k, removed));
      }
      for (uint32_t k = 1; k <= n - 1; ++k) {
        std::vector<size_t> removed(gates.end() - k, gates.end());
        out.push_back(make_candidate(obf, PruneSide::Back, k, removed));
      }
      break;
    }
    case AttackScenario::UnknownCount: {
      if (n < 2) {
        throw Error(ErrorCode::TooFewGates,
                    "unknown-count pruning needs at least 2 gates");
      }
      if (n > 20) {
        throw Error(ErrorCode::InvalidArgument,
                    "unknown-count enumeration is infeasible past 20 gates, "
                    "got " +
                        std::to_string(n));
      }
      const uint64_t full = (uint64_t{1} << n) - 1;
      for (uint64_t mask = 1; mask < full; ++mask) {
        std::vector<size_t> removed;
        for (size_t i = 0; i < n; ++i) {
          if ((mask >> i) & 1) removed.push_back(gates[i]);
        }
        out.push_back(make_candidate(
            obf, PruneSide::Front,
            static_cast<uint32_t>(std::popcount(mask)), removed));
      }
      break;
    }
  }
  return out;
}

bool same_gate_sequence(const Circuit& a, const Circuit& b) {
  const auto ga = gate_positions(a);
  const auto gb = gate_positions(b);
  if (ga.size() != gb.size()) return false;
  for (size_t i = 0; i < ga.size(); ++i) {
    const auto& x = std::get<Gate>(a.instructions()[ga[i]]);
    const auto& y = std::get<Gate>(b.instructions()[gb[i]]);
    if (x.kind != y.kind || x.qubits != y.qubits || x.theta != y.theta) {
      return false;
    }
  }
  return true;
}

AttackReport run_attack(const Circuit& obf, const Circuit& original,
                        const std::string& input, uint64_t shots,
                        const NoiseModel& noise, double threshold,
                        AttackScenario scenario, uint64_t seed) {
  obf.require_valid();
  original.require_valid();
  if (shots == 0) throw Error(ErrorCode::ZeroShots, "attack needs shots > 0");

  AttackReport report;
  report.scenario = scenario;
  report.threshold = threshold;
  report.n_total_gates = gate_positions(obf).size();
  report.choices_before =
      candidate_count(static_cast<uint32_t>(report.n_total_gates), scenario);
  report.candidates = enumerate_candidates(obf, scenario);

  Rng rng(seed);
  const Distribution obf_dist =
      sample(obf, input, shots, noise, rng.substream("obf").seed());
  const Distribution truth =
      sample(original, input, shots, NoiseModel::none(),
             rng.substream("truth").seed());

  uint64_t kept = 0;
  for (size_t i = 0; i < report.candidates.size(); ++i) {
    PruneCandidate& cand = report.candidates[i];
    const uint64_t cand_seed =
        rng.substream("candidate-" + std::to_string(i)).seed();
    const Distribution cand_dist =
        sample(cand.pruned, input, shots, noise, cand_seed);
    cand.tvd_vs_obfuscated = tvd(cand_dist, obf_dist);
    cand.discarded = cand.tvd_vs_obfuscated < threshold;
    const Distribution cand_clean =
        sample(cand.pruned, input, shots, NoiseModel::none(),
               rng.substream("truth").seed());
    cand.functionally_correct = cand_clean.counts == truth.counts;
    if (!cand.discarded) ++kept;
  }
  report.choices_after = kept;
  return report;
}

std::string AttackReport::to_json() const {
  nlohmann::json j;
  j["scenario"] = attack_scenario_name(scenario);
  j["n_total_gates"] = n_total_gates;
  j["choices_before"] = choices_before;
  j["choices_after"] = choices_after;
  j["threshold"] = threshold;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : candidates) {
    rows.push_back({{"k", c.removed_count},
                    {"side", prune_side_name(c.removed_side)},
                    {"tvd", c.tvd_vs_obfuscated},
                    {"correct", c.functionally_correct},
                    {"discarded", c.discarded}});
  }
  j["candidates"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string AttackReport::to_csv() const {
  std::string csv = "k,side,tvd,correct,discarded\n";
  for (const auto& c : candidates) {
    csv += std::to_string(c.removed_count);
    csv += ',';
    csv += prune_side_name(c.removed_side);
    csv += ',';
    csv += format_double(c.tvd_vs_obfuscated);
    csv += ',';
    csv += c.functionally_correct ? "correct" : "incorrect";
    csv += ',';
    csv += c.discarded ? "yes" : "no";
    csv += '\n';
  }
  return csv;
}

}  // namespace qlock
