#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qlock/circuit.hpp"
#include "qlock/error.hpp"

using namespace qlock;

namespace {

const std::vector<GateKind> kAllKinds = {
    GateKind::I,   GateKind::X,    GateKind::SX,  GateKind::SXdg, GateKind::H,
    GateKind::S,   GateKind::Sdg,  GateKind::T,   GateKind::Tdg,  GateKind::RZ,
    GateKind::CX,  GateKind::SWAP, GateKind::CCX, GateKind::C3X};

bool is_unitary(const Unitary& u, double tol) {
  const size_t n = u.size();
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      std::complex<double> acc{0.0, 0.0};
      for (size_t k = 0; k < n; ++k) acc += std::conj(u[k][i]) * u[k][j];
      const double want = i == j ? 1.0 : 0.0;
      if (std::abs(acc - want) > tol) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("gate arities") {
  for (GateKind k : kAllKinds) {
    int want = 1;
    if (k == GateKind::CX || k == GateKind::SWAP) want = 2;
    if (k == GateKind::CCX) want = 3;
    if (k == GateKind::C3X) want = 4;
    CHECK(gate_arity(k) == want);
  }
}

TEST_CASE("gate names round-trip") {
  for (GateKind k : kAllKinds) {
    const auto back = gate_kind_from_name(gate_name(k));
    REQUIRE(back.has_value());
    CHECK(*back == k);
  }
  CHECK(gate_name(GateKind::I) == std::string("id"));
  CHECK(gate_name(GateKind::C3X) == std::string("c3x"));
  CHECK(!gate_kind_from_name("cy").has_value());
  CHECK(!gate_kind_from_name("").has_value());
}

TEST_CASE("only RZ is parameterized") {
  for (GateKind k : kAllKinds) CHECK(gate_has_param(k) == (k == GateKind::RZ));
}

TEST_CASE("adjoint kinds pair up") {
  CHECK(adjoint_kind(GateKind::X) == GateKind::X);
  CHECK(adjoint_kind(GateKind::H) == GateKind::H);
  CHECK(adjoint_kind(GateKind::S) == GateKind::Sdg);
  CHECK(adjoint_kind(GateKind::Sdg) == GateKind::S);
  CHECK(adjoint_kind(GateKind::T) == GateKind::Tdg);
  CHECK(adjoint_kind(GateKind::Tdg) == GateKind::T);
  CHECK(adjoint_kind(GateKind::SX) == GateKind::SXdg);
  CHECK(adjoint_kind(GateKind::SXdg) == GateKind::SX);
  CHECK(adjoint_kind(GateKind::RZ) == GateKind::RZ);
  CHECK(adjoint_kind(GateKind::CX) == GateKind::CX);
  CHECK(adjoint_kind(GateKind::SWAP) == GateKind::SWAP);
  CHECK(adjoint_kind(GateKind::CCX) == GateKind::CCX);
  CHECK(adjoint_kind(GateKind::C3X) == GateKind::C3X);
  CHECK(adjoint_kind(GateKind::I) == GateKind::I);
  // Adjoint is an involution for every kind.
  for (GateKind k : kAllKinds) CHECK(adjoint_kind(adjoint_kind(k)) == k);
}

TEST_CASE("every gate matrix is unitary") {
  for (GateKind k : kAllKinds) {
    CAPTURE(gate_name(k));
    CHECK(is_unitary(gate_unitary(k, 0.37), 1e-12));
  }
}

TEST_CASE("gate matrices match the hand-entered reference") {
  for (GateKind k : kAllKinds) {
    const double theta = k == GateKind::RZ ? 0.7 : 0.0;
    CAPTURE(gate_name(k));
    CHECK(oracle::mat_equal(gate_unitary(k, theta), oracle::mat_of(k, theta), 1e-14));
  }
}

TEST_CASE("adjoint matrices multiply to identity") {
  for (GateKind k : kAllKinds) {
    const double theta = k == GateKind::RZ ? 1.234 : 0.0;
    const Unitary u = gate_unitary(k, theta);
    const Unitary v =
        gate_unitary(adjoint_kind(k), k == GateKind::RZ ? -theta : 0.0);
    const size_t n = u.size();
    REQUIRE(v.size() == n);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        std::complex<double> acc{0.0, 0.0};
        for (size_t m = 0; m < n; ++m) acc += v[i][m] * u[m][j];
        CHECK(std::abs(acc - (i == j ? 1.0 : 0.0)) < 1e-12);
      }
    }
  }
}

TEST_CASE("validate accepts a well-formed circuit") {
  Circuit c(2, 2);
  c.add_gate(GateKind::X, {0});
  c.add_gate(GateKind::CX, {0, 1});
  c.add_measure(0, 0);
  c.add_measure(1, 1);
  CHECK(c.validate().empty());
  CHECK_NOTHROW(c.require_valid());
}

TEST_CASE("validate reports duplicate qubits") {
  Circuit c(2, 0);
  c.add(Gate{GateKind::CX, {0, 0}});
  const auto v = c.validate();
  REQUIRE(v.size() == 1);
  CHECK(v[0].index == 0);
  CHECK(v[0].message.find("duplicate") != std::string::npos);
}

TEST_CASE("validate reports out-of-range qubits") {
  Circuit c(3, 0);
  c.add(Gate{GateKind::X, {5}});
  const auto v = c.validate();
  REQUIRE(!v.empty());
  CHECK(v[0].message.find("range") != std::string::npos);
}

TEST_CASE("validate reports arity mismatches") {
  Circuit c(3, 0);
  c.add(Gate{GateKind::CX, {0}});
  CHECK(!c.validate().empty());
  CHECK_THROWS_AS(c.require_valid(), Error);
}

TEST_CASE("validate reports gates after measurement") {
  Circuit c(1, 1);
  c.add(Measure{0, 0});
  c.add(Gate{GateKind::X, {0}});
  const auto v = c.validate();
  REQUIRE(!v.empty());
  bool mentioned = false;
  for (const auto& viol : v) {
    mentioned |= viol.message.find("measure") != std::string::npos;
  }
  CHECK(mentioned);
}

TEST_CASE("validate reports duplicate clbit targets") {
  Circuit c(2, 1);
  c.add(Measure{0, 0});
  c.add(Measure{1, 0});
  CHECK(!c.validate().empty());
}

TEST_CASE("validate reports clbit out of range") {
  Circuit c(1, 1);
  c.add(Measure{0, 3});
  CHECK(!c.validate().empty());
}

TEST_CASE("counts distinguish gates, barriers and measures") {
  Circuit c(2, 2);
  c.add_gate(GateKind::H, {0});
  c.add_full_barrier("tag");
  c.add_gate(GateKind::CX, {0, 1});
  c.add_measure(0, 0);
  CHECK(c.size() == 4);
  CHECK(c.gate_count() == 2);
  CHECK(c.barrier_count() == 1);
  CHECK(c.measure_count() == 1);
  CHECK(c.has_measures());
}

TEST_CASE("measured clbits are ascending, measured qubits in program order") {
  Circuit c(3, 3);
  c.add_measure(2, 0);
  c.add_measure(0, 2);
  c.add_measure(1, 1);
  CHECK(c.measured_clbits() == std::vector<uint32_t>{0, 1, 2});
  CHECK(c.measured_qubits() == std::vector<uint32_t>{2, 0, 1});
}

TEST_CASE("touches_qubit covers all instruction flavors") {
  CHECK(touches_qubit(Gate{GateKind::CX, {1, 2}}, 2));
  CHECK(!touches_qubit(Gate{GateKind::CX, {1, 2}}, 0));
  CHECK(touches_qubit(Barrier{{0, 1}, ""}, 0));
  CHECK(!touches_qubit(Barrier{{0, 1}, ""}, 2));
  CHECK(touches_qubit(Measure{3, 0}, 3));
  CHECK(!touches_qubit(Measure{3, 0}, 0));
}

TEST_CASE("inverse reverses order and adjoints kinds") {
  Circuit c(2, 0);
  c.add_gate(GateKind::H, {0});
  c.add_gate(GateKind::CX, {0, 1});
  const Circuit inv = c.inverse();
  REQUIRE(inv.gate_count() == 2);
  CHECK(std::get<Gate>(inv.instructions()[0]).kind == GateKind::CX);
  CHECK(std::get<Gate>(inv.instructions()[1]).kind == GateKind::H);
}

TEST_CASE("inverse maps T to Tdg and negates RZ angles") {
  Circuit c(1, 0);
  c.add_gate(GateKind::T, {0});
  c.add_gate(GateKind::RZ, {0}, 0.25);
  const Circuit inv = c.inverse();
  CHECK(std::get<Gate>(inv.instructions()[0]).kind == GateKind::RZ);
  CHECK(std::get<Gate>(inv.instructions()[0]).theta == -0.25);
  CHECK(std::get<Gate>(inv.instructions()[1]).kind == GateKind::Tdg);
}

TEST_CASE("inverse of self-inverse gates just reverses") {
  Circuit c(5, 0);
  c.add_gate(GateKind::X, {4});
  c.add_gate(GateKind::C3X, {0, 1, 2, 3});
  c.add_gate(GateKind::X, {1});
  const Circuit inv = c.inverse();
  CHECK(std::get<Gate>(inv.instructions()[0]) == Gate{GateKind::X, {1}});
  CHECK(std::get<Gate>(inv.instructions()[1]) == Gate{GateKind::C3X, {0, 1, 2, 3}});
  CHECK(std::get<Gate>(inv.instructions()[2]) == Gate{GateKind::X, {4}});
}

TEST_CASE("inverse is an involution") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Circuit c = oracle::random_general(rng, 4, 12, true);
    CHECK(c.inverse().inverse() == c);
  }
}

TEST_CASE("inverse rejects measured circuits") {
  Circuit c(1, 1);
  c.add_measure(0, 0);
  try {
    (void)c.inverse();
    FAIL("expected MeasurementPresent");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MeasurementPresent);
  }
}

TEST_CASE("circuit followed by its inverse is the identity") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 15; ++trial) {
    const Circuit c = oracle::random_general(rng, 4, 10);
    const oracle::Mat u = oracle::unitary_oracle(c.concat(c.inverse()));
    oracle::Mat eye(u.size(), oracle::Vec(u.size(), {0.0, 0.0}));
    for (size_t i = 0; i < u.size(); ++i) eye[i][i] = 1.0;
    CHECK(oracle::mat_equal_up_to_phase(u, eye, 1e-10));
  }
}

TEST_CASE("concat keeps instruction order and merges metadata") {
  Circuit a(2, 0);
  a.add_gate(GateKind::X, {0});
  a.metadata()["name"] = "a";
  a.metadata()["keep"] = "yes";
  Circuit b(2, 2);
  b.add_gate(GateKind::CX, {0, 1});
  b.add_measure(0, 0);
  b.metadata()["name"] = "b";
  const Circuit c = a.concat(b);
  CHECK(c.size() == 3);
  CHECK(c.n_clbits() == 2);
  CHECK(c.metadata().at("name") == "b");
  CHECK(c.metadata().at("keep") == "yes");
  CHECK(std::get<Gate>(c.instructions()[0]).kind == GateKind::X);
}

TEST_CASE("concat with an empty circuit is the identity element") {
  Circuit empty(3, 0);
  Circuit c(3, 3);
  c.add_gate(GateKind::CCX, {0, 1, 2});
  c.add_measure(2, 2);
  const Circuit out = empty.concat(c);
  CHECK(out.instructions() == c.instructions());
}

TEST_CASE("concat rejects width mismatches and measured prefixes") {
  Circuit a(2, 0), b(3, 0);
  try {
    (void)a.concat(b);
    FAIL("expected QubitCountMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::QubitCountMismatch);
  }
  Circuit m(2, 1);
  m.add_measure(0, 0);
  Circuit tail(2, 0);
  try {
    (void)m.concat(tail);
    FAIL("expected MeasurementPresent");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MeasurementPresent);
  }
}

TEST_CASE("split_at_midpoint uses the floor rule") {
  Circuit two(1, 0);
  two.add_gate(GateKind::X, {0});
  two.add_gate(GateKind::H, {0});
  auto [l2, r2] = two.split_at_midpoint();
  CHECK(l2.gate_count() == 1);
  CHECK(r2.gate_count() == 1);

  Circuit five(2, 0);
  for (int i = 0; i < 5; ++i) five.add_gate(GateKind::X, {static_cast<uint32_t>(i % 2)});
  auto [l5, r5] = five.split_at_midpoint();
  CHECK(l5.gate_count() == 2);
  CHECK(r5.gate_count() == 3);
}

TEST_CASE("split keeps measures on the right and re-concatenates") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    Circuit c = oracle::random_classical(rng, 4, 2 + static_cast<uint32_t>(rng() % 10), true);
    auto [left, right] = c.split_at_midpoint();
    CHECK(left.measure_count() == 0);
    CHECK(left.gate_count() == c.gate_count() / 2);
    const Circuit glued = left.concat(right);
    CHECK(glued.instructions() == c.instructions());
  }
}

TEST_CASE("split rejects circuits with fewer than two gates") {
  Circuit c(1, 0);
  c.add_gate(GateKind::X, {0});
  try {
    (void)c.split_at_midpoint();
    FAIL("expected TooFewGates");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewGates);
  }
}
