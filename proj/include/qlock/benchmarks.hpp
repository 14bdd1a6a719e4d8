#pragma once

#include <string>
#include <vector>

#include "qlock/circuit.hpp"

namespace qlock {

// A reversible circuit with a pinned input and its noiseless outcome. The
// outcome stored in the registry is re-derived by simulation at load time, so
// a drifted circuit definition fails loudly instead of silently changing the
// reference data.
struct Benchmark {
  std::string name;
  Circuit circuit;
  std::string input;           // basis-state input, one char per qubit
  std::string correct_output;  // noiseless outcome over the measured clbits
  std::string note;
};

// Registry order: ascending size.
const std::vector<std::string>& benchmark_names();

bool has_benchmark(const std::string& name);

Benchmark load_benchmark(const std::string& name);

std::vector<Benchmark> load_all_benchmarks();

}  // namespace qlock
