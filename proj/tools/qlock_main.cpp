#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qlock/attack.hpp"
#include "qlock/benchmarks.hpp"
#include "qlock/circuit.hpp"
#include "qlock/compiler.hpp"
#include "qlock/deobfuscator.hpp"
#include "qlock/error.hpp"
#include "qlock/experiment.hpp"
#include "qlock/metrics.hpp"
#include "qlock/obfuscator.hpp"
#include "qlock/qasm.hpp"
#include "qlock/simulator.hpp"

namespace {

using namespace qlock;

uint64_t default_seed() {
  const char* env = std::getenv("QLOCK_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    return std::stoull(env);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument,
                "QLOCK_SEED is not an unsigned integer");
  }
}

NoiseModel parse_noise(const std::string& text) {
  if (text == "none") return NoiseModel::none();
  if (text == "default") return NoiseModel::defaults();
  std::istringstream in(text);
  NoiseModel noise;
  char c1 = 0, c2 = 0;
  if (!(in >> noise.p1 >> c1 >> noise.p2 >> c2 >> noise.p_ro) || c1 != ',' ||
      c2 != ',' || !(in >> std::ws).eof()) {
    throw Error(ErrorCode::InvalidArgument,
                "noise must be 'none', 'default' or 'p1,p2,p_ro'");
  }
  if (noise.p1 < 0 || noise.p1 > 1 || noise.p2 < 0 || noise.p2 > 1 ||
      noise.p_ro < 0 || noise.p_ro > 1) {
    throw Error(ErrorCode::InvalidArgument,
                "noise probabilities must lie in [0, 1]");
  }
  return noise;
}

CouplingMap parse_map(const std::string& text, uint32_t n_qubits) {
  if (text == "auto" || text.empty()) return CouplingMap::default_for(n_qubits);
  if (text == "valencia") return CouplingMap::valencia();
  if (text.rfind("line:", 0) == 0) {
    const uint32_t n =
        static_cast<uint32_t>(std::stoul(text.substr(5)));
    return CouplingMap::line(n);
  }
  std::ifstream in(text);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open coupling map '" + text + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return CouplingMap::from_json(buf.str());
}

std::string default_input(const Circuit& c) {
  return std::string(c.n_qubits(), '0');
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "short write to '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string counts_json(const Distribution& d) {
  nlohmann::json j;
  j["shots"] = d.shots;
  j["counts"] = nlohmann::json::object();
  for (const auto& [key, n] : d.counts) j["counts"][key] = n;
  return j.dump(2) + "\n";
}

Distribution counts_from_json(const std::string& text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    Distribution d;
    d.shots = j.at("shots").get<uint64_t>();
    for (const auto& [key, value] : j.at("counts").items()) {
      d.counts[key] = value.get<uint64_t>();
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError,
                std::string("bad counts file: ") + e.what());
  }
}

std::vector<GateKind> parse_gate_kinds(const std::vector<std::string>& names) {
  std::vector<GateKind> kinds;
  for (const auto& name : names) {
    const auto kind = gate_kind_from_name(name);
    if (!kind) {
      throw Error(ErrorCode::InvalidArgument, "unknown gate kind '" + name + "'");
    }
    kinds.push_back(*kind);
  }
  return kinds;
}

InsertionLocation parse_location(const std::string& loc,
                                 const std::string& side) {
  BarrierSide s = BarrierSide::Left;
  if (side == "right") {
    s = BarrierSide::Right;
  } else if (side != "left") {
    throw Error(ErrorCode::InvalidArgument,
                "barrier side must be 'left' or 'right'");
  }
  return location_from_name(loc, s);
}

int run(int argc, char** argv) {
  CLI::App app{
      "qlock: reversible-block circuit obfuscation, compilation, restoration "
      "and evaluation"};
  app.require_subcommand(1);

  // --- obfuscate ---------------------------------------------------------
  struct {
    std::string in, out = "obfuscated.qasm", record = "record.json";
    std::string location = "back", side = "left";
    uint32_t n_gates = 3;
    bool refined = false;
    uint64_t seed = default_seed();
  } ob;
  CLI::App* c_ob = app.add_subcommand(
      "obfuscate", "Insert a random reversible block into a circuit");
  c_ob->add_option("input", ob.in, "input circuit (.qasm)")->required();
  c_ob->add_option("--out", ob.out, "obfuscated circuit path");
  c_ob->add_option("--record", ob.record,
                   "restoration record path (keep this file private)");
  c_ob->add_option("--location", ob.location, "front | middle | back");
  c_ob->add_option("--side", ob.side,
                   "middle only: block left or right of the marker barrier");
  c_ob->add_option("--n-gates", ob.n_gates, "gates in the random block");
  c_ob->add_flag("--refined", ob.refined,
                 "start the block with X on a random measured qubit");
  c_ob->add_option("--seed", ob.seed, "RNG seed (default: QLOCK_SEED or 0)");

  // --- compile ------------------------------------------------------------
  struct {
    std::string in, out = "compiled.qasm", report, map = "auto", record;
    bool trivial_layout = false;
  } co;
  CLI::App* c_co = app.add_subcommand(
      "compile", "Run the deterministic mock hardware compiler");
  c_co->add_option("input", co.in, "input circuit (.qasm)")->required();
  c_co->add_option("--out", co.out, "compiled circuit path");
  c_co->add_option("--report", co.report, "compile report JSON path");
  c_co->add_option("--map", co.map,
                   "valencia | line:N | auto | coupling-map JSON file");
  c_co->add_flag("--trivial-layout", co.trivial_layout,
                 "place virtual qubit i on physical qubit i");
  c_co->add_option("--record", co.record,
                   "restoration record to update with compiled layouts");

  // --- deobfuscate --------------------------------------------------------
  struct {
    std::string compiled, record, out = "restored.qasm", report;
    std::string mode = "feed", map = "auto";
  } de;
  CLI::App* c_de = app.add_subcommand(
      "deobfuscate", "Stitch the inverse block onto a compiled circuit");
  c_de->add_option("compiled", de.compiled, "compiled circuit (.qasm)")
      ->required();
  c_de->add_option("record", de.record, "restoration record (.json)")
      ->required();
  c_de->add_option("--out", de.out, "restored circuit path");
  c_de->add_option("--report", de.report, "stitch report JSON path");
  c_de->add_option("--mode", de.mode, "feed | swap");
  c_de->add_option("--map", de.map,
                   "valencia | line:N | auto | coupling-map JSON file");

  // --- simulate -----------------------------------------------------------
  struct {
    std::string in, out, input, noise = "none", record;
    uint64_t shots = 10000;
    uint64_t seed = default_seed();
  } si;
  CLI::App* c_si =
      app.add_subcommand("simulate", "Sample measurement outcomes");
  c_si->add_option("circuit", si.in, "circuit (.qasm)")->required();
  c_si->add_option("--shots", si.shots, "number of shots");
  c_si->add_option("--seed", si.seed, "RNG seed (default: QLOCK_SEED or 0)");
  c_si->add_option("--noise", si.noise, "none | default | p1,p2,p_ro");
  c_si->add_option("--input", si.input,
                   "basis input, one char per qubit (default all zeros)");
  c_si->add_option("--record", si.record,
                   "map the input through a record or stitch report layout");
  c_si->add_option("--out", si.out, "counts JSON path (default stdout)");

  // --- metrics ------------------------------------------------------------
  struct {
    std::string a, b, correct;
  } me;
  CLI::App* c_me = app.add_subcommand(
      "metrics", "Compare two counts files (TVD; DFC/fidelity of the first)");
  c_me->add_option("--a", me.a, "counts JSON file")->required();
  c_me->add_option("--b", me.b, "counts JSON file")->required();
  c_me->add_option("--correct", me.correct,
                   "correct outcome for DFC / fidelity of --a");

  // --- attack -------------------------------------------------------------
  struct {
    std::string obf, original, scenario = "middle-barrier", input;
    std::string noise = "default", out_json, out_csv;
    double threshold = 0.5;
    uint64_t shots = 10000;
    uint64_t seed = default_seed();
  } at;
  CLI::App* c_at = app.add_subcommand(
      "attack", "Prune-and-test attack against an obfuscated circuit");
  c_at->add_option("obfuscated", at.obf, "obfuscated circuit (.qasm)")
      ->required();
  c_at->add_option("--original", at.original,
                   "true original circuit, for labeling candidates")
      ->required();
  c_at->add_option("--scenario", at.scenario,
                   "middle-barrier | unknown-edge | unknown-count");
  c_at->add_option("--threshold", at.threshold, "TVD discard threshold");
  c_at->add_option("--shots", at.shots, "shots per candidate");
  c_at->add_option("--seed", at.seed, "RNG seed (default: QLOCK_SEED or 0)");
  c_at->add_option("--input", at.input, "basis input (default all zeros)");
  c_at->add_option("--noise", at.noise, "none | default | p1,p2,p_ro");
  c_at->add_option("--out-json", at.out_json, "attack report JSON path");
  c_at->add_option("--out-csv", at.out_csv, "candidate table CSV path");

  // --- bench --------------------------------------------------------------
  struct {
    std::string spec_file;
    std::vector<std::string> benchmarks, locations, block_kinds;
    std::vector<uint32_t> refined;
    uint32_t seeds = 0;
    int64_t master_seed = -1;
    uint32_t n_gates = 0;
    std::string noise;
    uint64_t shots = 0, fidelity_shots = 0;
    bool with_fidelity = false;
    std::string stitch;
    uint32_t jobs = 0;
    std::string out_csv = "results.csv", out_summary = "summary.json";
  } be;
  CLI::App* c_be = app.add_subcommand(
      "bench", "Run the benchmark sweep and write CSV + summary");
  c_be->add_option("--spec", be.spec_file,
                   "experiment spec JSON (flags override it)");
  c_be->add_option("--benchmarks", be.benchmarks,
                   "benchmark names (default: all)")
      ->delimiter(',');
  c_be->add_option("--locations", be.locations,
                   "insertion locations (default front,middle,back)")
      ->delimiter(',');
  c_be->add_option("--refined", be.refined, "0, 1 or 0,1 (default 0,1)")
      ->delimiter(',');
  c_be->add_option("--seeds", be.seeds, "seeds per cell (default 100)");
  c_be->add_option("--master-seed", be.master_seed,
                   "master seed (default 2024 or QLOCK_SEED)");
  c_be->add_option("--n-gates", be.n_gates, "block size (default 3)");
  c_be->add_option("--block-kinds", be.block_kinds,
                   "gate names blocks draw from, e.g. x,cx (default: the "
                   "benchmark's own vocabulary)")
      ->delimiter(',');
  c_be->add_option("--noise", be.noise, "none | default | p1,p2,p_ro");
  c_be->add_option("--shots", be.shots, "shots per sample (default 10000)");
  c_be->add_option("--fidelity-shots", be.fidelity_shots,
                   "shots per fidelity sample (default 2000)");
  c_be->add_flag("--with-fidelity", be.with_fidelity,
                 "also run the compile + restore round trip per row");
  c_be->add_option("--stitch", be.stitch, "feed | swap (default feed)");
  c_be->add_option("--jobs", be.jobs, "worker threads (default 1)");
  c_be->add_option("--out-csv", be.out_csv, "results CSV path");
  c_be->add_option("--out-summary", be.out_summary, "summary JSON path");

  // --- list-benchmarks ----------------------------------------------------
  CLI::App* c_ls =
      app.add_subcommand("list-benchmarks", "Show the benchmark registry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (c_ob->parsed()) {
    const Circuit original = read_qasm_file(ob.in);
    RandomBlockParams params;
    params.n_gates = ob.n_gates;
    params.refined = ob.refined;
    params.seed = ob.seed;
    const InsertionLocation loc = parse_location(ob.location, ob.side);
    const ObfuscationResult result = obfuscate(original, params, loc);
    write_qasm_file(result.circuit, ob.out);
    write_record_file(ob.record, result.record);
    std::cout << "obfuscated " << ob.in << ": +" << ob.n_gates << " gates at "
              << location_name(loc) << (ob.refined ? " (refined)" : "")
              << "\n  circuit: " << ob.out << "\n  record:  " << ob.record
              << "  (keep private)\n";
    for (const auto& w : result.warnings) std::cout << "  warning: " << w << "\n";
    return 0;
  }

  if (c_co->parsed()) {
    const Circuit circuit = read_qasm_file(co.in);
    const CouplingMap map = parse_map(co.map, circuit.n_qubits());
    CompileOptions options;
    if (co.trivial_layout) {
      options.placement = PlacementStrategy::Trivial;
    }
    const CompiledCircuit compiled = compile(circuit, map, options);
    write_qasm_file(compiled.circuit, co.out);
    if (!co.report.empty()) write_text_file(co.report, compiled.report_json());
    if (!co.record.empty()) {
      ObfuscationRecord record = read_record_file(co.record);
      store_layouts(record, compiled);
      write_record_file(co.record, record);
    }
    std::cout << "compiled " << co.in << " onto " << map.n_physical()
              << " physical qubits: " << compiled.circuit.gate_count()
              << " gates\n  circuit: " << co.out << "\n";
    if (!co.report.empty()) std::cout << "  report:  " << co.report << "\n";
    if (!co.record.empty()) {
      std::cout << "  layouts stored into " << co.record << "\n";
    }
    return 0;
  }

  if (c_de->parsed()) {
    const Circuit compiled_circuit = read_qasm_file(de.compiled);
    const ObfuscationRecord record = read_record_file(de.record);
    const CouplingMap map = parse_map(de.map, compiled_circuit.n_qubits());
    const CompiledCircuit compiled = attach_layouts(compiled_circuit, record);
    const DeobfuscationResult result =
        deobfuscate(compiled, record, map, stitch_mode_from_name(de.mode));
    write_qasm_file(result.circuit, de.out);
    if (!de.report.empty()) write_text_file(de.report, result.report_json());
    std::cout << "restored " << de.compiled << " (" << result.location << ", "
              << stitch_mode_name(result.mode) << " stitch, "
              << result.junction_swaps << " junction swaps)\n  circuit: "
              << de.out << "\n";
    if (!de.report.empty()) std::cout << "  report:  " << de.report << "\n";
    return 0;
  }

  if (c_si->parsed()) {
    const Circuit circuit = read_qasm_file(si.in);
    std::string input =
        si.input.empty() ? default_input(circuit) : si.input;
    if (!si.record.empty()) {
      // Accepts either a restoration record (compiled initial layout) or a
      // stitch report, whose initial_p2v reflects the restored circuit.
      std::vector<uint32_t> p2v;
      const nlohmann::json j = nlohmann::json::parse(read_text_file(si.record),
                                                     nullptr, false);
      if (!j.is_discarded() && j.contains("initial_p2v")) {
        p2v = j["initial_p2v"].get<std::vector<uint32_t>>();
      } else {
        const ObfuscationRecord record = read_record_file(si.record);
        if (!record.layouts.has_value()) {
          throw Error(ErrorCode::RecordMismatch,
                      "record has no stored layouts to map the input through");
        }
        p2v = record.layouts->initial_p2v;
      }
      std::vector<uint32_t> v2p(p2v.size());
      for (uint32_t p = 0; p < static_cast<uint32_t>(p2v.size()); ++p) {
        v2p[p2v[p]] = p;
      }
      input = map_input_to_physical(input, Layout::from_v2p(v2p));
    }
    const Distribution d =
        sample(circuit, input, si.shots, parse_noise(si.noise), si.seed);
    const std::string text = counts_json(d);
    if (si.out.empty()) {
      std::cout << text;
    } else {
      write_text_file(si.out, text);
      std::cout << "sampled " << si.shots << " shots from " << si.in << " -> "
                << si.out << "\n";
    }
    return 0;
  }

  if (c_me->parsed()) {
    const Distribution da = counts_from_json(read_text_file(me.a));
    const Distribution db = counts_from_json(read_text_file(me.b));
    nlohmann::json j;
    j["tvd"] = tvd(da, db);
    if (!me.correct.empty()) {
      j["dfc"] = dfc(da, me.correct);
      j["fidelity"] = fidelity(da, me.correct);
    }
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (c_at->parsed()) {
    const Circuit obf = read_qasm_file(at.obf);
    const Circuit original = read_qasm_file(at.original);
    const std::string input =
        at.input.empty() ? default_input(obf) : at.input;
    const AttackReport report = run_attack(
        obf, original, input, at.shots, parse_noise(at.noise), at.threshold,
        attack_scenario_from_name(at.scenario), at.seed);
    if (!at.out_json.empty()) write_text_file(at.out_json, report.to_json());
    if (!at.out_csv.empty()) write_text_file(at.out_csv, report.to_csv());
    size_t surviving_correct = 0;
    for (const auto& c : report.candidates) {
      if (!c.discarded && c.functionally_correct) ++surviving_correct;
    }
    std::cout << attack_scenario_name(report.scenario) << " attack: "
              << report.choices_before << " candidates, "
              << report.choices_after << " survive the TVD filter (threshold "
              << format_double(report.threshold) << "), "
              << surviving_correct << " of the survivors are correct\n";
    return 0;
  }

  if (c_be->parsed()) {
    ExperimentSpec spec;
    spec.master_seed = [] {
      const char* env = std::getenv("QLOCK_SEED");
      if (env != nullptr && *env != '\0') return default_seed();
      return uint64_t{2024};
    }();
    if (!be.spec_file.empty()) {
      try {
        const nlohmann::json j =
            nlohmann::json::parse(read_text_file(be.spec_file));
        if (j.contains("benchmarks"))
          spec.benchmarks = j["benchmarks"].get<std::vector<std::string>>();
        if (j.contains("locations")) {
          spec.locations.clear();
          for (const auto& name : j["locations"]) {
            spec.locations.push_back(
                location_from_name(name.get<std::string>()));
          }
        }
        if (j.contains("refined")) {
          spec.refined_values.clear();
          for (const auto& r : j["refined"]) {
            spec.refined_values.push_back(r.get<int>() != 0);
          }
        }
        if (j.contains("n_seeds")) spec.n_seeds = j["n_seeds"].get<uint32_t>();
        if (j.contains("master_seed"))
          spec.master_seed = j["master_seed"].get<uint64_t>();
        if (j.contains("n_block_gates"))
          spec.n_block_gates = j["n_block_gates"].get<uint32_t>();
        if (j.contains("block_kinds")) {
          spec.block_kinds = parse_gate_kinds(
              j["block_kinds"].get<std::vector<std::string>>());
        }
        if (j.contains("shots")) spec.shots = j["shots"].get<uint64_t>();
        if (j.contains("fidelity_shots"))
          spec.fidelity_shots = j["fidelity_shots"].get<uint64_t>();
        if (j.contains("with_fidelity"))
          spec.with_fidelity = j["with_fidelity"].get<bool>();
        if (j.contains("stitch_mode"))
          spec.stitch_mode =
              stitch_mode_from_name(j["stitch_mode"].get<std::string>());
        if (j.contains("noise")) {
          spec.noise.p1 = j["noise"].value("p1", spec.noise.p1);
          spec.noise.p2 = j["noise"].value("p2", spec.noise.p2);
          spec.noise.p_ro = j["noise"].value("p_ro", spec.noise.p_ro);
        }
        if (j.contains("jobs")) spec.jobs = j["jobs"].get<uint32_t>();
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError,
                    std::string("bad experiment spec: ") + e.what());
      }
    }
    if (!be.benchmarks.empty()) spec.benchmarks = be.benchmarks;
    if (!be.locations.empty()) {
      spec.locations.clear();
      for (const auto& name : be.locations) {
        spec.locations.push_back(location_from_name(name));
      }
    }
    if (!be.refined.empty()) {
      spec.refined_values.clear();
      for (uint32_t r : be.refined) spec.refined_values.push_back(r != 0);
    }
    if (be.seeds > 0) spec.n_seeds = be.seeds;
    if (be.master_seed >= 0) {
      spec.master_seed = static_cast<uint64_t>(be.master_seed);
    }
    if (be.n_gates > 0) spec.n_block_gates = be.n_gates;
    if (!be.block_kinds.empty()) {
      spec.block_kinds = parse_gate_kinds(be.block_kinds);
    }
    if (!be.noise.empty()) spec.noise = parse_noise(be.noise);
    if (be.shots > 0) spec.shots = be.shots;
    if (be.fidelity_shots > 0) spec.fidelity_shots = be.fidelity_shots;
    if (be.with_fidelity) spec.with_fidelity = true;
    if (!be.stitch.empty()) {
      spec.stitch_mode = stitch_mode_from_name(be.stitch);
    }
    if (be.jobs > 0) spec.jobs = be.jobs;

    const ExperimentResult result = run_experiment(spec);
    write_text_file(be.out_csv, result.csv);
    write_text_file(be.out_summary, result.summary_json);
    std::cout << "ran " << result.rows.size() << " grid points\n  csv:     "
              << be.out_csv << "\n  summary: " << be.out_summary << "\n";
    return 0;
  }

  if (c_ls->parsed()) {
    for (const auto& name : benchmark_names()) {
      const Benchmark b = load_benchmark(name);
      std::cout << name << ": " << b.circuit.n_qubits() << " qubits, "
                << b.circuit.gate_count() << " gates, outcome "
                << b.correct_output << " (" << b.note << ")\n";
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const qlock::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
