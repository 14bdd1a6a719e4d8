#pragma once

#include <string>

#include "qlock/circuit.hpp"

namespace qlock {

// Serializes to a strict OpenQASM 2.0 subset: one qreg, at most one creg,
// gate/barrier/measure statements, LF line endings. RZ angles are written as
// shortest round-trip decimals, so parse(emit(c)) == c including angles.
// Circuit metadata rides in leading "// meta:key=value" comments and barrier
// tags in trailing "// tag:label" comments.
std::string emit_qasm(const Circuit& circuit);

// Parses the same subset. Unknown gate names, malformed statements, repeated
// registers, and out-of-range indices raise ParseError with a line number.
Circuit parse_qasm(const std::string& text);

void write_qasm_file(const Circuit& circuit, const std::string& path);
Circuit read_qasm_file(const std::string& path);

// Shortest decimal representation that parses back to exactly the same
// double. Used for QASM angles, JSON reports, and CSV cells.
std::string format_double(double value);

}  // namespace qlock
