#include "qlock/benchmarks.hpp"

#include <functional>
#include <stdexcept>

#include "qlock/error.hpp"
#include "qlock/simulator.hpp"

namespace qlock {

namespace {

// Small helper so the gate lists below read like netlists.
struct Builder {
  Circuit c;
  Builder(uint32_t nq, uint32_t nc) : c(nq, nc) {}
  void x(uint32_t q) { c.add_gate(GateKind::X, {q}); }
  void cx(uint32_t a, uint32_t b) { c.add_gate(GateKind::CX, {a, b}); }
  void ccx(uint32_t a, uint32_t b, uint32_t t) {
    c.add_gate(GateKind::CCX, {a, b, t});
  }
  void c3x(uint32_t a, uint32_t b, uint32_t cq, uint32_t t) {
    c.add_gate(GateKind::C3X, {a, b, cq, t});
  }
  void swap(uint32_t a, uint32_t b) { c.add_gate(GateKind::SWAP, {a, b}); }
  void measure(uint32_t q, uint32_t cl) { c.add_measure(q, cl); }
  void measure_first(uint32_t k) {
    for (uint32_t i = 0; i < k; ++i) c.add_measure(i, i);
  }
  Circuit done(size_t expect_gates) {
    if (c.gate_count() != expect_gates) {
      throw std::logic_error("benchmark builder drift: expected " +
                             std::to_string(expect_gates) + " gates, built " +
                             std::to_string(c.gate_count()));
    }
    c.require_valid();
    return c;
  }
};

Circuit build_mini_alu() {
  Builder b(4, 3);
  b.x(0);
  b.x(3);
  b.cx(3, 1);
  b.ccx(0, 3, 2);
  b.cx(3, 2);
  b.x(1);
  b.measure_first(3);
  return b.done(6);
}

Circuit build_counter() {
  Builder b(4, 4);
  for (int round = 0; round < 2; ++round) {
    b.c3x(0, 1, 2, 3);
    b.ccx(0, 1, 2);
    b.cx(0, 1);
    b.x(0);
  }
  b.measure_first(4);
  return b.done(8);
}

Circuit build_4gt11() {
  Builder b(5, 3);
  b.x(0);
  b.x(3);
  b.cx(3, 1);
  b.swap(1, 3);  // q3 idle from here on
  b.ccx(0, 4, 2);
  b.x(4);
  b.swap(2, 4);  // q4 idle from here on
  b.x(2);
  b.cx(0, 1);
  b.x(1);
  b.ccx(0, 1, 2);
  b.x(0);
  b.measure_first(3);
  return b.done(12);
}

Circuit build_4gt13() {
  Builder b(5, 3);
  b.x(1);
  b.cx(1, 3);
  b.swap(1, 3);  // q3 idle from here on
  b.x(0);
  b.cx(0, 2);
  b.ccx(0, 2, 4);
  b.x(4);
  b.cx(4, 0);
  b.swap(2, 4);  // q4 idle from here on
  b.x(2);
  b.cx(0, 2);
  b.x(1);
  b.ccx(0, 1, 2);
  b.x(0);
  b.measure_first(3);
  return b.done(14);
}

// Ripple-free one-bit full adder over basis states: a=q0, b=q1, cin=q2,
// carry accumulates on q3 and sum on q4. Each multi-controlled gate fires on
// one minterm; X gates walk the control mask between minterms and restore the
// inputs at the end.
Circuit build_adder_1bit() {
  Builder b(5, 2);
  b.c3x(0, 1, 2, 4);  // sum minterm 111
  b.x(1);
  b.x(2);
  b.c3x(0, 1, 2, 4);  // sum minterm 100
  b.x(0);
  b.x(1);
  b.c3x(0, 1, 2, 4);  // sum minterm 010
  b.x(1);
  b.x(2);
  b.c3x(0, 1, 2, 4);  // sum minterm 001
  b.x(1);
  b.c3x(0, 1, 2, 3);  // carry minterm 011
  b.x(0);
  b.c3x(0, 1, 2, 3);  // carry minterm 111
  b.x(1);
  b.c3x(0, 1, 2, 3);  // carry minterm 101
  b.x(1);
  b.x(2);
  b.c3x(0, 1, 2, 3);  // carry minterm 110
  b.x(2);             // restore inputs
  b.measure(4, 0);    // sum
  b.measure(3, 1);    // carry
  return b.done(20);
}

Circuit build_alu() {
  Builder b(7, 3);
  b.x(3);
  b.x(1);
  b.cx(3, 1);
  b.swap(1, 5);  // q5 idle from here on
  b.x(4);
  b.ccx(3, 4, 0);
  b.cx(4, 2);
  b.cx(3, 4);
  b.x(0);
  b.ccx(0, 3, 4);
  b.swap(2, 6);  // q6 idle from here on
  b.x(2);
  b.cx(4, 2);
  b.cx(0, 1);
  b.x(1);
  b.x(0);
  b.cx(3, 0);
  b.x(1);
  b.measure_first(3);
  return b.done(18);
}

Circuit build_rd73() {
  Builder b(10, 3);
  b.x(3);
  b.x(4);
  b.cx(4, 5);
  b.x(6);
  b.swap(1, 8);  // q8 idle from here on
  // Scratch mixing on q4..q7.
  b.x(4);
  b.cx(4, 6);
  b.x(6);
  b.x(5);
  b.cx(5, 7);
  b.x(7);
  b.x(6);
  b.cx(6, 4);
  b.x(4);
  b.x(7);
  b.cx(7, 5);
  b.swap(2, 9);  // q9 idle from here on
  // Write the outputs from q3.
  b.x(0);
  b.cx(3, 0);
  b.x(1);
  b.cx(3, 1);
  b.cx(3, 2);
  // Trailing scratch churn.
  b.x(4);
  b.cx(4, 5);
  b.x(5);
  b.cx(5, 6);
  b.x(4);
  b.x(3);
  b.measure_first(3);
  return b.done(28);
}

Circuit build_sym6() {
  Builder b(7, 3);
  b.x(3);
  b.x(4);
  b.cx(3, 4);
  b.x(4);
  b.x(4);
  b.swap(1, 5);  // q5 idle from here on
  // Scratch walk on q3/q4.
  b.x(4);
  b.x(3);
  b.x(4);
  b.x(3);
  b.x(4);
  b.cx(3, 4);
  b.x(4);
  b.x(3);
  b.x(4);
  b.x(3);
  b.x(4);
  b.cx(3, 4);
  b.x(3);
  b.x(4);
  b.x(3);
  b.swap(2, 6);  // q6 idle from here on
  // Write the outputs from q3.
  b.x(0);
  b.cx(3, 0);
  b.cx(3, 1);
  b.x(2);
  b.cx(3, 2);
  b.x(0);
  // Trailing scratch churn.
  b.x(4);
  b.cx(3, 4);
  b.x(4);
  b.x(3);
  b.cx(3, 4);
  b.x(4);
  b.x(3);
  b.x(3);
  b.measure_first(3);
  return b.done(36);
}

Circuit build_hidden() {
  Builder b(12, 3);
  b.x(3);
  b.x(4);
  b.cx(4, 5);
  b.x(6);
  b.cx(6, 7);
  b.swap(1, 10);  // q10 idle from here on
  // Scratch rounds over q4..q9.
  for (uint32_t r = 0; r < 13; ++r) {
    const uint32_t a = 4 + (r % 6);
    const uint32_t t = 4 + ((r + 2) % 6);
    b.x(a);
    b.cx(a, t);
    b.x(t);
  }
  b.swap(2, 11);  // q11 idle from here on
  // Write the outputs from q3.
  b.cx(3, 0);
  b.x(1);
  b.x(2);
  b.cx(3, 2);
  b.x(2);
  b.x(1);
  // Trailing scratch churn over q3..q9.
  for (uint32_t r = 0; r < 5; ++r) {
    const uint32_t a = 3 + (r % 7);
    const uint32_t t = 3 + ((r + 3) % 7);
    const uint32_t u = 3 + ((r + 5) % 7);
    b.x(a);
    b.cx(a, t);
    b.x(t);
    b.cx(t, u);
    b.x(u);
  }
  b.x(4);
  b.x(5);
  b.x(3);
  b.measure_first(3);
  return b.done(80);
}

Circuit build_cycle10() {
  Builder b(12, 3);
  b.x(3);
  b.x(4);
  b.cx(4, 5);
  b.x(6);
  b.cx(6, 7);
  b.swap(1, 10);  // q10 idle from here on
  // Scratch rounds over q4..q9.
  for (uint32_t r = 0; r < 11; ++r) {
    const uint32_t a = 4 + (r % 6);
    const uint32_t t = 4 + ((r + 2) % 6);
    const uint32_t u = 4 + ((r + 4) % 6);
    b.x(a);
    b.cx(a, t);
    b.x(t);
    b.cx(t, u);
    b.x(u);
  }
  b.swap(2, 11);  // q11 idle from here on
  // Write the outputs from q3.
  b.cx(3, 0);
  b.x(1);
  b.cx(3, 1);
  b.x(1);
  b.x(2);
  b.cx(3, 2);
  // Trailing scratch churn over q3..q9.
  for (uint32_t r = 0; r < 8; ++r) {
    const uint32_t a = 3 + (r % 7);
    const uint32_t t = 3 + ((r + 3) % 7);
    const uint32_t u = 3 + ((r + 5) % 7);
    b.x(a);
    b.cx(a, t);
    b.x(t);
    b.cx(t, u);
    b.x(u);
  }
  b.x(4);
  b.x(5);
  b.x(3);
  b.measure_first(3);
  return b.done(111);
}

struct RegistryEntry {
  const char* name;
  Circuit (*build)();
  const char* expected;
  const char* note;
};

const RegistryEntry kRegistry[] = {
    {"mini_alu", build_mini_alu, "100",
     "small arithmetic-logic slice, 4 qubits"},
    {"counter", build_counter, "0100",
     "two-step binary up-counter, all qubits measured"},
    {"4gt11", build_4gt11, "011", "greater-than comparator slice, 5 qubits"},
    {"4gt13", build_4gt13, "000", "greater-than comparator slice, 5 qubits"},
    {"adder_1bit", build_adder_1bit, "00",
     "one-bit full adder, sum and carry measured"},
    {"alu", build_alu, "001", "arithmetic-logic unit slice, 7 qubits"},
    {"rd73", build_rd73, "001", "rank-decision style circuit, 10 qubits"},
    {"sym6", build_sym6, "110", "symmetric-function style circuit, 7 qubits"},
    {"hidden", build_hidden, "101",
     "hidden-subgroup style mixing circuit, 12 qubits"},
    {"cycle10", build_cycle10, "110",
     "cyclic permutation style circuit, 12 qubits"},
};

const RegistryEntry& find_entry(const std::string& name) {
  for (const auto& e : kRegistry) {
    if (name == e.name) return e;
  }
  throw Error(ErrorCode::UnknownBenchmark, "no benchmark named '" + name + "'");
}

}  // namespace

const std::vector<std::string>& benchmark_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& e : kRegistry) v.emplace_back(e.name);
    return v;
  }();
  return names;
}

bool has_benchmark(const std::string& name) {
  for (const auto& e : kRegistry) {
    if (name == e.name) return true;
  }
  return false;
}

Benchmark load_benchmark(const std::string& name) {
  const RegistryEntry& e = find_entry(name);
  Benchmark bench;
  bench.name = e.name;
  bench.circuit = e.build();
  bench.input = std::string(bench.circuit.n_qubits(), '0');
  bench.note = e.note;

  if (!is_classical_reversible(bench.circuit)) {
    throw std::logic_error("benchmark '" + bench.name +
                           "' is not classical reversible");
  }
  const Distribution d =
      sample(bench.circuit, bench.input, 1, NoiseModel::none(), 0);
  if (d.counts.size() != 1) {
    throw std::logic_error("benchmark '" + bench.name +
                           "' has a nondeterministic noiseless outcome");
  }
  bench.correct_output = d.counts.begin()->first;
  if (bench.correct_output != e.expected) {
    throw std::logic_error("benchmark '" + bench.name +
                           "' outcome drifted: expected '" +
                           std::string(e.expected) + "', simulated '" +
                           bench.correct_output + "'");
  }
  return bench;
}

std::vector<Benchmark> load_all_benchmarks() {
  std::vector<Benchmark> out;
  for (const auto& e : kRegistry) out.push_back(load_benchmark(e.name));
  return out;
}

}  // namespace qlock
