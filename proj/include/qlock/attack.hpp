#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qlock/circuit.hpp"
#include "qlock/simulator.hpp"

namespace qlock {

// What the adversary knows about the insertion:
// MiddleBarrier - a marker barrier is visible, gates are stripped from either
// side of it; UnknownEdge - the block sits at one edge, unknown which, with
// unknown size; UnknownCount - nothing is known, any gate subset may be the
// block.
enum class AttackScenario { MiddleBarrier, UnknownEdge, UnknownCount };

std::string attack_scenario_name(AttackScenario scenario);
AttackScenario attack_scenario_from_name(const std::string& name);

enum class PruneSide { Left, Right, Front, Back };
std::string prune_side_name(PruneSide side);

struct PruneCandidate {
  PruneSide removed_side = PruneSide::Front;
  uint32_t removed_count = 0;
  Circuit pruned;
  double tvd_vs_obfuscated = 0.0;
  bool discarded = false;
  // Ground truth computed by the harness; the attack's discard logic never
  // reads it.
  bool functionally_correct = false;
};

struct AttackReport {
  std::vector<PruneCandidate> candidates;
  size_t n_total_gates = 0;
  uint64_t choices_before = 0;
  uint64_t choices_after = 0;
  double threshold = 0.0;
  AttackScenario scenario = AttackScenario::MiddleBarrier;

  std::string to_json() const;
  // Columns: k,side,tvd,correct,discarded
  std::string to_csv() const;
};

// Size of the search space: MiddleBarrier n-2, UnknownEdge 2(n-1),
// UnknownCount 2^n - 2.
uint64_t candidate_count(uint32_t n, AttackScenario scenario);

// Materializes the candidates. MiddleBarrier strips k gates adjacent to the
// tagged barrier per side, always leaving at least one gate on that side;
// UnknownEdge strips k gates from the front and from the back; UnknownCount
// strips every nonempty proper gate subset (width-limited, it is exponential).
std::vector<PruneCandidate> enumerate_candidates(const Circuit& obf,
                                                 AttackScenario scenario);

// Gate-sequence equality ignoring barriers, used to check that the true
// original stays inside the candidate set.
bool same_gate_sequence(const Circuit& a, const Circuit& b);

// Samples the obfuscated circuit and every candidate under the given noise,
// discards candidates whose TVD against the obfuscated output falls below the
// threshold, and labels each candidate's noiseless correctness against the
// true original.
AttackReport run_attack(const Circuit& obf, const Circuit& original,
                        const std::string& input, uint64_t shots,
                        const NoiseModel& noise, double threshold,
                        AttackScenario scenario, uint64_t seed);

}  // namespace qlock
