#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qlock/deobfuscator.hpp"
#include "qlock/obfuscator.hpp"
#include "qlock/simulator.hpp"

namespace qlock {

// A sweep over benchmarks x insertion locations x block styles x seeds.
// Everything is derived from master_seed, so a spec maps to exactly one CSV.
struct ExperimentSpec {
  std::vector<std::string> benchmarks;       // default: full registry
  std::vector<InsertionLocation> locations;  // default: front, middle, back
  std::vector<bool> refined_values = {false, true};
  // Gate vocabulary the blocks draw from; empty means each benchmark's own
  // vocabulary. Restricting to 1- and 2-qubit kinds keeps the restored
  // circuit's depth overhead (and so its fidelity cost) small.
  std::vector<GateKind> block_kinds;
  uint32_t n_seeds = 100;
  uint64_t master_seed = 2024;
  uint32_t n_block_gates = 3;
  NoiseModel noise = NoiseModel::defaults();
  uint64_t shots = 10000;
  // Fidelity needs the compile + restore round trip per row, which is the
  // expensive part; it can be switched off for metrics-only sweeps.
  bool with_fidelity = false;
  uint64_t fidelity_shots = 2000;
  StitchMode stitch_mode = StitchMode::FeedLayout;
  uint32_t jobs = 1;
};

struct ExperimentRow {
  std::string benchmark;
  std::string location;
  bool refined = false;
  uint32_t seed_index = 0;
  uint32_t n_block_gates = 0;
  double tvd = 0.0;        // noisy obfuscated output vs noisy original output
  double dfc = 0.0;        // noiseless obfuscated output vs correct outcome
  double fidelity_orig = 0.0;    // only when with_fidelity
  double fidelity_deobf = 0.0;   // only when with_fidelity
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  std::string csv;
  std::string summary_json;
};

// Per-cell aggregates used by the summary and by acceptance checks.
struct CellStats {
  std::string benchmark;
  std::string location;
  bool refined = false;
  size_t n = 0;
  double tvd_mean = 0.0;
  double tvd_median = 0.0;
  double tvd_q1 = 0.0;
  double tvd_q3 = 0.0;
  double tvd_var = 0.0;
  double dfc_mean = 0.0;
  double fidelity_orig_mean = 0.0;
  double fidelity_deobf_mean = 0.0;
};

std::vector<CellStats> summarize(const std::vector<ExperimentRow>& rows);

ExperimentResult run_experiment(const ExperimentSpec& spec);

}  // namespace qlock
