#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#ifndef QLOCK_BIN
#error "QLOCK_BIN must point at the command-line binary"
#endif

namespace {

namespace fs = std::filesystem;

struct CmdResult {
  int status = -1;
  std::string out;
};

CmdResult run_cmd(const std::string& cmd) {
  CmdResult result;
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (pipe == nullptr) return result;
  char buffer[4096];
  size_t n = 0;
  while ((n = fread(buffer, 1, sizeof buffer, pipe)) > 0) {
    result.out.append(buffer, n);
  }
  const int raw = pclose(pipe);
  result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return result;
}

std::string bin() { return std::string(QLOCK_BIN); }

class TempDir {
 public:
  explicit TempDir(const std::string& tag)
      : path_(fs::temp_directory_path() / ("qlock_cli_" + tag)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  fs::path path_;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// A 3-qubit classical circuit with every qubit measured.
constexpr const char* kSmallQasm =
    "OPENQASM 2.0;\n"
    "include \"qelib1.inc\";\n"
    "qreg q[3];\n"
    "creg c[3];\n"
    "x q[0];\n"
    "cx q[0],q[1];\n"
    "x q[2];\n"
    "cx q[1],q[2];\n"
    "measure q[0] -> c[0];\n"
    "measure q[1] -> c[1];\n"
    "measure q[2] -> c[2];\n";

// The two-round binary up-counter, written out as circuit text.
constexpr const char* kCounterQasm =
    "OPENQASM 2.0;\n"
    "include \"qelib1.inc\";\n"
    "qreg q[4];\n"
    "creg c[4];\n"
    "c3x q[0],q[1],q[2],q[3];\n"
    "ccx q[0],q[1],q[2];\n"
    "cx q[0],q[1];\n"
    "x q[0];\n"
    "c3x q[0],q[1],q[2],q[3];\n"
    "ccx q[0],q[1],q[2];\n"
    "cx q[0],q[1];\n"
    "x q[0];\n"
    "measure q[0] -> c[0];\n"
    "measure q[1] -> c[1];\n"
    "measure q[2] -> c[2];\n"
    "measure q[3] -> c[3];\n";

constexpr const char* kHadamardQasm =
    "OPENQASM 2.0;\n"
    "include \"qelib1.inc\";\n"
    "qreg q[3];\n"
    "creg c[3];\n"
    "h q[0];\n"
    "h q[1];\n"
    "h q[2];\n"
    "measure q[0] -> c[0];\n"
    "measure q[1] -> c[1];\n"
    "measure q[2] -> c[2];\n";

uint64_t counts_total(const nlohmann::json& j) {
  uint64_t total = 0;
  for (const auto& [key, value] : j.at("counts").items()) {
    (void)key;
    total += value.get<uint64_t>();
  }
  return total;
}

}  // namespace

TEST_CASE("bad invocations exit with the usage code") {
  CHECK(run_cmd(bin()).status == 2);
  CHECK(run_cmd(bin() + " frobnicate").status == 2);
  CHECK(run_cmd(bin() + " obfuscate").status == 2);
  CHECK(run_cmd(bin() + " --help").status == 0);
}

TEST_CASE("domain errors exit with code 2") {
  TempDir dir("errors");
  CHECK(run_cmd(bin() + " obfuscate " + dir.file("missing.qasm")).status == 2);

  write_file(dir.file("c.qasm"), kSmallQasm);
  CHECK(run_cmd(bin() + " obfuscate " + dir.file("c.qasm") + " --n-gates 0 --out " +
                dir.file("o.qasm") + " --record " + dir.file("r.json"))
            .status == 2);
  CHECK(run_cmd(bin() + " simulate " + dir.file("c.qasm") + " --noise garbage")
            .status == 2);
  CHECK(run_cmd(bin() + " simulate " + dir.file("c.qasm") + " --shots 0").status == 2);
}

TEST_CASE("the full pipeline restores the original behavior") {
  TempDir dir("pipeline");
  write_file(dir.file("original.qasm"), kSmallQasm);

  const auto obf = run_cmd(bin() + " obfuscate " + dir.file("original.qasm") +
                           " --out " + dir.file("obf.qasm") + " --record " +
                           dir.file("rec.json") +
                           " --location middle --side right --refined --seed 9");
  REQUIRE(obf.status == 0);
  CHECK(obf.out.find("middle") != std::string::npos);
  CHECK(fs::exists(dir.file("obf.qasm")));
  CHECK(fs::exists(dir.file("rec.json")));

  // The circuit handed to the compiler must not leak the block: no record
  // content, only the opaque hash marker.
  {
    std::ifstream in(dir.file("obf.qasm"));
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    CHECK(text.find("obf_hash") != std::string::npos);
    CHECK(text.find("insertion_index") == std::string::npos);
    CHECK(text.find("block_qasm") == std::string::npos);
  }

  const auto comp = run_cmd(bin() + " compile " + dir.file("obf.qasm") + " --out " +
                            dir.file("comp.qasm") + " --report " +
                            dir.file("comp_report.json") + " --record " +
                            dir.file("rec.json"));
  REQUIRE(comp.status == 0);
  CHECK(comp.out.find("layouts stored") != std::string::npos);
  const nlohmann::json report =
      nlohmann::json::parse(std::ifstream(dir.file("comp_report.json")));
  CHECK(report.at("pass_log").size() == 6);

  const auto deob = run_cmd(bin() + " deobfuscate " + dir.file("comp.qasm") + " " +
                            dir.file("rec.json") + " --out " + dir.file("restored.qasm") +
                            " --report " + dir.file("stitch.json") + " --mode swap");
  REQUIRE(deob.status == 0);
  CHECK(deob.out.find("swap stitch") != std::string::npos);

  const auto sim_restored =
      run_cmd(bin() + " simulate " + dir.file("restored.qasm") + " --input 010" +
              " --record " + dir.file("stitch.json") + " --shots 600 --out " +
              dir.file("restored_counts.json"));
  REQUIRE(sim_restored.status == 0);
  const auto sim_orig =
      run_cmd(bin() + " simulate " + dir.file("original.qasm") +
              " --input 010 --shots 600 --out " + dir.file("orig_counts.json"));
  REQUIRE(sim_orig.status == 0);

  const auto metrics = run_cmd(bin() + " metrics --a " + dir.file("restored_counts.json") +
                               " --b " + dir.file("orig_counts.json"));
  REQUIRE(metrics.status == 0);
  const nlohmann::json m = nlohmann::json::parse(metrics.out);
  CHECK(m.at("tvd").get<double>() == 0.0);
}

TEST_CASE("simulate prints counts JSON on stdout by default") {
  TempDir dir("simulate");
  write_file(dir.file("c.qasm"), kSmallQasm);
  const auto result = run_cmd(bin() + " simulate " + dir.file("c.qasm") + " --shots 500");
  REQUIRE(result.status == 0);
  const nlohmann::json j = nlohmann::json::parse(result.out);
  CHECK(j.at("shots").get<uint64_t>() == 500);
  CHECK(counts_total(j) == 500);
  // Classical circuit, no noise: a single outcome bucket.
  CHECK(j.at("counts").size() == 1);
  CHECK(j.at("counts").contains("110"));
}

TEST_CASE("metrics reproduces the textbook scoring example") {
  TempDir dir("metrics");
  write_file(dir.file("honest.json"),
             "{\"counts\": {\"0\": 95, \"1\": 5}, \"shots\": 100}");
  write_file(dir.file("obf.json"),
             "{\"counts\": {\"0\": 55, \"1\": 45}, \"shots\": 100}");
  const auto result = run_cmd(bin() + " metrics --a " + dir.file("obf.json") + " --b " +
                              dir.file("honest.json") + " --correct 0");
  REQUIRE(result.status == 0);
  const nlohmann::json j = nlohmann::json::parse(result.out);
  CHECK(j.at("tvd").get<double>() == 0.8);
  CHECK(j.at("dfc").get<double>() == 0.1);
  CHECK(j.at("fidelity").get<double>() == 0.55);

  const auto no_correct = run_cmd(bin() + " metrics --a " + dir.file("obf.json") +
                                  " --b " + dir.file("honest.json"));
  REQUIRE(no_correct.status == 0);
  const nlohmann::json j2 = nlohmann::json::parse(no_correct.out);
  CHECK(!j2.contains("dfc"));
  CHECK(!j2.contains("fidelity"));
}

TEST_CASE("the attack subcommand reports the nine junction guesses") {
  TempDir dir("attack");
  write_file(dir.file("counter.qasm"), kCounterQasm);
  const auto obf = run_cmd(bin() + " obfuscate " + dir.file("counter.qasm") +
                           " --out " + dir.file("cobf.qasm") + " --record " +
                           dir.file("crec.json") + " --location middle --seed 4");
  REQUIRE(obf.status == 0);

  const auto attack = run_cmd(bin() + " attack " + dir.file("cobf.qasm") +
                              " --original " + dir.file("counter.qasm") +
                              " --shots 800 --seed 3 --out-json " +
                              dir.file("areport.json") + " --out-csv " +
                              dir.file("areport.csv"));
  REQUIRE(attack.status == 0);
  CHECK(attack.out.rfind("middle-barrier attack: 9 candidates, ", 0) == 0);
  CHECK(attack.out.find("survive the TVD filter (threshold 0.5)") !=
        std::string::npos);

  const nlohmann::json j =
      nlohmann::json::parse(std::ifstream(dir.file("areport.json")));
  CHECK(j.at("choices_before").get<uint64_t>() == 9);
  CHECK(j.at("candidates").size() == 9);

  std::ifstream csv(dir.file("areport.csv"));
  std::string header;
  std::getline(csv, header);
  CHECK(header == "k,side,tvd,correct,discarded");
}

TEST_CASE("the bench subcommand writes the sweep CSV and summary") {
  TempDir dir("bench");
  const auto result = run_cmd(
      bin() + " bench --benchmarks mini_alu --locations back --refined 0,1" +
      " --seeds 2 --shots 200 --out-csv " + dir.file("results.csv") +
      " --out-summary " + dir.file("summary.json"));
  REQUIRE(result.status == 0);
  CHECK(result.out.rfind("ran 4 grid points", 0) == 0);

  std::ifstream csv(dir.file("results.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line ==
        "benchmark,location,refined,seed,n_block_gates,tvd,dfc,fidelity_orig,"
        "fidelity_deobf");
  size_t rows = 0;
  while (std::getline(csv, line)) {
    CHECK(line.rfind("mini_alu,back,", 0) == 0);
    ++rows;
  }
  CHECK(rows == 4);

  const nlohmann::json summary =
      nlohmann::json::parse(std::ifstream(dir.file("summary.json")));
  CHECK(summary.at("cells").size() == 2);
}

TEST_CASE("bench records a restricted block vocabulary in the summary") {
  TempDir dir("benchkinds");
  const auto result = run_cmd(
      bin() + " bench --benchmarks mini_alu --locations back --refined 1" +
      " --seeds 1 --shots 200 --block-kinds x,cx --out-csv " +
      dir.file("results.csv") + " --out-summary " + dir.file("summary.json"));
  REQUIRE(result.status == 0);
  const nlohmann::json summary =
      nlohmann::json::parse(std::ifstream(dir.file("summary.json")));
  CHECK(summary.at("spec").at("block_kinds") ==
        std::vector<std::string>{"x", "cx"});
}

TEST_CASE("bench rejects an unknown block gate name") {
  TempDir dir("benchbadkind");
  const auto result = run_cmd(
      bin() + " bench --benchmarks mini_alu --seeds 1 --shots 100" +
      " --block-kinds foo --out-csv " + dir.file("r.csv") +
      " --out-summary " + dir.file("s.json"));
  CHECK(result.status == 2);
}

TEST_CASE("list-benchmarks prints one line per registry entry") {
  const auto result = run_cmd(bin() + " list-benchmarks");
  REQUIRE(result.status == 0);
  size_t lines = 0;
  for (char ch : result.out) {
    if (ch == '\n') ++lines;
  }
  CHECK(lines == 10);
  CHECK(result.out.find("adder_1bit: 5 qubits, 20 gates, outcome 00") !=
        std::string::npos);
  CHECK(result.out.find("cycle10: 12 qubits, 111 gates") != std::string::npos);
}

TEST_CASE("the environment seed matches an explicit --seed") {
  TempDir dir("envseed");
  write_file(dir.file("h.qasm"), kHadamardQasm);
  const std::string base = " simulate " + dir.file("h.qasm") + " --shots 400";
  const auto env_run = run_cmd("QLOCK_SEED=5 " + bin() + base);
  const auto flag_run = run_cmd(bin() + base + " --seed 5");
  const auto other_run = run_cmd(bin() + base + " --seed 6");
  REQUIRE(env_run.status == 0);
  REQUIRE(flag_run.status == 0);
  REQUIRE(other_run.status == 0);
  CHECK(env_run.out == flag_run.out);
  CHECK(env_run.out != other_run.out);
}
