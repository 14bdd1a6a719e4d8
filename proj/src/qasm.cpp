#include "qlock/qasm.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qlock/error.hpp"

namespace qlock {

namespace {

[[noreturn]] void fail(size_t line, const std::string& message) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + message);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

// Angle grammar: decimal literals plus the forms pi, -pi, pi/N, N*pi, N*pi/M.
double parse_angle(std::string_view text, size_t line) {
  text = trim(text);
  if (text.empty()) fail(line, "empty angle");
  double sign = 1.0;
  if (text.front() == '-') {
    sign = -1.0;
    text.remove_prefix(1);
    text = trim(text);
  }
  const auto parse_number = [&](std::string_view s) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      fail(line, "bad number '" + std::string(s) + "'");
    }
    return value;
  };
  double numerator;
  const size_t star = text.find('*');
  const size_t slash = text.find('/');
  std::string_view head = text.substr(0, std::min(star, slash));
  std::string_view rest = text;
  if (trim(head) == "pi") {
    numerator = std::numbers::pi;
    rest.remove_prefix(std::min(star, slash) == std::string_view::npos
                           ? text.size()
                           : std::min(star, slash));
  } else if (star != std::string_view::npos && star < slash) {
    std::string_view factor = trim(text.substr(star + 1, slash - star - 1));
    if (factor != "pi") fail(line, "expected pi after '*'");
    numerator = parse_number(trim(head)) * std::numbers::pi;
    rest = slash == std::string_view::npos ? std::string_view{} : text.substr(slash);
  } else {
    numerator = parse_number(trim(head));
    rest = slash == std::string_view::npos ? std::string_view{} : text.substr(slash);
  }
  if (!rest.empty() && rest.front() == '/') {
    return sign * numerator / parse_number(trim(rest.substr(1)));
  }
  return sign * numerator;
}

// Parses "q[3]" against the declared register name.
uint32_t parse_operand(std::string_view token, const std::string& reg, size_t line) {
  token = trim(token);
  if (token.size() < reg.size() + 3 || token.substr(0, reg.size()) != reg ||
      token[reg.size()] != '[' || token.back() != ']') {
    fail(line, "bad operand '" + std::string(token) + "'");
  }
  const std::string_view digits = token.substr(reg.size() + 1, token.size() - reg.size() - 2);
  uint32_t index = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) {
    fail(line, "bad index in '" + std::string(token) + "'");
  }
  return index;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string emit_qasm(const Circuit& circuit) {
  std::ostringstream out;
  for (const auto& [key, value] : circuit.metadata()) {
    out << "// meta:" << key << "=" << value << "\n";
  }
  out << "OPENQASM 2.0;\n";
  out << "include \"qelib1.inc\";\n";
  out << "qreg q[" << circuit.n_qubits() << "];\n";
  if (circuit.n_clbits() > 0) {
    out << "creg c[" << circuit.n_clbits() << "];\n";
  }
  for (const auto& inst : circuit.instructions()) {
    if (const auto* gate = std::get_if<Gate>(&inst)) {
      out << gate_name(gate->kind);
      if (gate_has_param(gate->kind)) out << "(" << format_double(gate->theta) << ")";
      out << " ";
      for (size_t i = 0; i < gate->qubits.size(); ++i) {
        if (i) out << ",";
        out << "q[" << gate->qubits[i] << "]";
      }
      out << ";\n";
    } else if (const auto* barrier = std::get_if<Barrier>(&inst)) {
      out << "barrier ";
      if (barrier->qubits.size() == circuit.n_qubits()) {
        out << "q";
      } else {
        for (size_t i = 0; i < barrier->qubits.size(); ++i) {
          if (i) out << ",";
          out << "q[" << barrier->qubits[i] << "]";
        }
      }
      out << ";";
      if (!barrier->tag.empty()) out << " // tag:" << barrier->tag;
      out << "\n";
    } else {
      const auto& m = std::get<Measure>(inst);
      out << "measure q[" << m.qubit << "] -> c[" << m.clbit << "];\n";
    }
  }
  return out.str();
}

Circuit parse_qasm(const std::string& text) {
  Circuit circuit;
  std::map<std::string, std::string> metadata;
  std::string qreg_name;
  std::string creg_name;
  uint32_t n_qubits = 0;
  uint32_t n_clbits = 0;
  bool saw_qreg = false;
  std::vector<Instruction> instructions;

  size_t line_no = 0;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    std::string tag;
    if (const size_t comment = line.find("//"); comment != std::string_view::npos) {
      std::string_view trailing = trim(line.substr(comment + 2));
      if (trailing.substr(0, 5) == "meta:") {
        const std::string_view kv = trailing.substr(5);
        const size_t eq = kv.find('=');
        if (eq == std::string_view::npos) fail(line_no, "meta comment without '='");
        metadata[std::string(trim(kv.substr(0, eq)))] = std::string(trim(kv.substr(eq + 1)));
      } else if (trailing.substr(0, 4) == "tag:") {
        tag = std::string(trim(trailing.substr(4)));
      }
      line = trim(line.substr(0, comment));
    }
    if (line.empty()) continue;
    if (line.back() != ';') fail(line_no, "missing ';'");
    line = trim(line.substr(0, line.size() - 1));

    if (line.substr(0, 8) == "OPENQASM") {
      if (trim(line.substr(8)) != "2.0") fail(line_no, "unsupported OPENQASM version");
      continue;
    }
    if (line.substr(0, 7) == "include") continue;

    if (line.substr(0, 5) == "qreg " || line.substr(0, 5) == "creg ") {
      const bool is_q = line[0] == 'q';
      std::string_view decl = trim(line.substr(5));
      const size_t open = decl.find('[');
      if (open == std::string_view::npos || decl.back() != ']') {
        fail(line_no, "bad register declaration");
      }
      const std::string name(trim(decl.substr(0, open)));
      uint32_t size = 0;
      const std::string_view digits = decl.substr(open + 1, decl.size() - open - 2);
      const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), size);
      if (ec != std::errc() || ptr != digits.data() + digits.size()) {
        fail(line_no, "bad register size");
      }
      if (is_q) {
        if (saw_qreg) fail(line_no, "multiple qreg declarations");
        saw_qreg = true;
        qreg_name = name;
        n_qubits = size;
      } else {
        if (!creg_name.empty()) fail(line_no, "multiple creg declarations");
        creg_name = name;
        n_clbits = size;
      }
      continue;
    }

    if (!saw_qreg) fail(line_no, "statement before qreg declaration");

    if (line.substr(0, 8) == "barrier " || line == "barrier") {
      std::string_view args = line.size() > 7 ? trim(line.substr(8)) : std::string_view{};
      std::vector<uint32_t> qubits;
      if (args.empty() || args == qreg_name) {
        for (uint32_t q = 0; q < n_qubits; ++q) qubits.push_back(q);
      } else {
        for (const auto& part : split(args, ',')) {
          qubits.push_back(parse_operand(part, qreg_name, line_no));
        }
      }
      for (uint32_t q : qubits) {
        if (q >= n_qubits) fail(line_no, "barrier qubit out of range");
      }
      std::sort(qubits.begin(), qubits.end());
      instructions.push_back(Barrier{std::move(qubits), std::move(tag)});
      continue;
    }

    if (line.substr(0, 8) == "measure ") {
      const std::string_view args = trim(line.substr(8));
      const size_t arrow = args.find("->");
      if (arrow == std::string_view::npos) fail(line_no, "measure without '->'");
      if (creg_name.empty()) fail(line_no, "measure without creg");
      const uint32_t qubit = parse_operand(trim(args.substr(0, arrow)), qreg_name, line_no);
      const uint32_t clbit = parse_operand(trim(args.substr(arrow + 2)), creg_name, line_no);
      if (qubit >= n_qubits) fail(line_no, "measured qubit out of range");
      if (clbit >= n_clbits) fail(line_no, "measure clbit out of range");
      instructions.push_back(Measure{qubit, clbit});
      continue;
    }

    // Gate statement: name[(angle)] operand[, operand...]
    size_t name_end = 0;
    while (name_end < line.size() && line[name_end] != ' ' && line[name_end] != '(') {
      ++name_end;
    }
    const std::string name(line.substr(0, name_end));
    const auto kind = gate_kind_from_name(name);
    if (!kind) fail(line_no, "unknown gate '" + name + "'");
    std::string_view rest = trim(line.substr(name_end));
    double theta = 0.0;
    if (gate_has_param(*kind)) {
      if (rest.empty() || rest.front() != '(') fail(line_no, name + " requires an angle");
      const size_t close = rest.find(')');
      if (close == std::string_view::npos) fail(line_no, "unterminated angle");
      theta = parse_angle(rest.substr(1, close - 1), line_no);
      rest = trim(rest.substr(close + 1));
    } else if (!rest.empty() && rest.front() == '(') {
      fail(line_no, name + " takes no parameter");
    }
    std::vector<uint32_t> qubits;
    for (const auto& part : split(rest, ',')) {
      qubits.push_back(parse_operand(part, qreg_name, line_no));
    }
    if (static_cast<int>(qubits.size()) != gate_arity(*kind)) {
      fail(line_no, name + " expects " + std::to_string(gate_arity(*kind)) + " operands");
    }
    for (uint32_t q : qubits) {
      if (q >= n_qubits) fail(line_no, "gate qubit out of range");
    }
    instructions.push_back(Gate{*kind, std::move(qubits), theta});
  }
  if (!saw_qreg) throw Error(ErrorCode::ParseError, "no qreg declaration");

  Circuit out(n_qubits, n_clbits);
  for (auto& inst : instructions) out.add(std::move(inst));
  out.metadata() = std::move(metadata);
  return out;
}

void write_qasm_file(const Circuit& circuit, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  out << emit_qasm(circuit);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

Circuit read_qasm_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_qasm(buf.str());
}

}  // namespace qlock
