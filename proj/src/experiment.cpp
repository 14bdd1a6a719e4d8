#include "qlock/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "qlock/benchmarks.hpp"
#include "qlock/compiler.hpp"
#include "qlock/error.hpp"
#include "qlock/metrics.hpp"
#include "qlock/qasm.hpp"
#include "qlock/rng.hpp"

namespace qlock {

namespace {

struct BenchContext {
  Benchmark bench;
  Distribution reference;  // noisy sample of the original circuit
  double fidelity_orig = 0.0;
  CouplingMap map{1, {}};
};

double median_of(const std::vector<double>& sorted, size_t lo, size_t hi) {
  // Median of sorted[lo, hi).
  const size_t n = hi - lo;
  const size_t mid = lo + n / 2;
  if (n % 2 == 1) return sorted[mid];
  return 0.5 * (sorted[mid - 1] + sorted[mid]);
}

uint64_t row_seed(uint64_t master, const std::string& scope,
                  const std::string& bench, const std::string& extra) {
  Rng r = Rng(master).substream(scope).substream(bench);
  if (!extra.empty()) r = r.substream(extra);
  return r.seed();
}

}  // namespace

std::vector<CellStats> summarize(const std::vector<ExperimentRow>& rows) {
  std::vector<CellStats> cells;
  std::map<std::string, size_t> index;
  for (const auto& row : rows) {
    const std::string key =
        row.benchmark + '|' + row.location + '|' + (row.refined ? '1' : '0');
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, cells.size());
      CellStats c;
      c.benchmark = row.benchmark;
      c.location = row.location;
      c.refined = row.refined;
      cells.push_back(std::move(c));
      it = index.find(key);
    }
    (void)it;
  }

  for (auto& cell : cells) {
    std::vector<double> tvds;
    double dfc_sum = 0.0, fo_sum = 0.0, fd_sum = 0.0;
    for (const auto& row : rows) {
      if (row.benchmark != cell.benchmark || row.location != cell.location ||
          row.refined != cell.refined) {
        continue;
      }
      tvds.push_back(row.tvd);
      dfc_sum += row.dfc;
      fo_sum += row.fidelity_orig;
      fd_sum += row.fidelity_deobf;
    }
    const size_t n = tvds.size();
    cell.n = n;
    if (n == 0) continue;
    double sum = 0.0;
    for (double t : tvds) sum += t;
    cell.tvd_mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (double t : tvds) var += (t - cell.tvd_mean) * (t - cell.tvd_mean);
    cell.tvd_var = var / static_cast<double>(n);
    std::sort(tvds.begin(), tvds.end());
    cell.tvd_median = median_of(tvds, 0, n);
    cell.tvd_q1 = median_of(tvds, 0, n / 2);
    cell.tvd_q3 = median_of(tvds, n - n / 2, n);
    cell.dfc_mean = dfc_sum / static_cast<double>(n);
    cell.fidelity_orig_mean = fo_sum / static_cast<double>(n);
    cell.fidelity_deobf_mean = fd_sum / static_cast<double>(n);
  }
  return cells;
}

ExperimentResult run_experiment(const ExperimentSpec& spec_in) {
  ExperimentSpec spec = spec_in;
  if (spec.benchmarks.empty()) spec.benchmarks = benchmark_names();
  if (spec.locations.empty()) {
    spec.locations = {InsertionLocation::front(), InsertionLocation::middle(),
                      InsertionLocation::back()};
  }
  if (spec.refined_values.empty()) spec.refined_values = {false, true};
  if (spec.n_seeds == 0) {
    throw Error(ErrorCode::InvalidArgument, "experiment needs n_seeds > 0");
  }
  if (spec.shots == 0) {
    throw Error(ErrorCode::ZeroShots, "experiment needs shots > 0");
  }
  if (spec.jobs == 0) spec.jobs = 1;

  // Per-benchmark context: the original's noisy reference output, and the
  // compiled original's fidelity when the round trip is enabled.
  std::vector<BenchContext> contexts;
  contexts.reserve(spec.benchmarks.size());
  for (const auto& name : spec.benchmarks) {
    BenchContext ctx;
    ctx.bench = load_benchmark(name);
    ctx.reference =
        sample(ctx.bench.circuit, ctx.bench.input, spec.shots, spec.noise,
               row_seed(spec.master_seed, "orig-sample", name, ""));
    if (spec.with_fidelity) {
      ctx.map = CouplingMap::default_for(ctx.bench.circuit.n_qubits());
      const CompiledCircuit comp = compile(ctx.bench.circuit, ctx.map);
      const std::string phys_input =
          map_input_to_physical(ctx.bench.input, comp.initial_layout);
      const Distribution d =
          sample(comp.circuit, phys_input, spec.fidelity_shots, spec.noise,
                 row_seed(spec.master_seed, "orig-fid", name, ""));
      ctx.fidelity_orig = fidelity(d, ctx.bench.correct_output);
    }
    contexts.push_back(std::move(ctx));
  }

  struct RowPlan {
    size_t bench_idx;
    InsertionLocation location;
    bool refined;
    uint32_t seed_index;
  };
  std::vector<RowPlan> plan;
  for (size_t bi = 0; bi < contexts.size(); ++bi) {
    for (const auto& loc : spec.locations) {
      for (bool refined : spec.refined_values) {
        for (uint32_t i = 0; i < spec.n_seeds; ++i) {
          plan.push_back({bi, loc, refined, i});
        }
      }
    }
  }

  std::vector<ExperimentRow> rows(plan.size());
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mu;

  auto worker = [&]() {
    for (;;) {
      const size_t idx = next.fetch_add(1);
      if (idx >= plan.size() || failed.load()) return;
      const RowPlan& p = plan[idx];
      const BenchContext& ctx = contexts[p.bench_idx];
      try {
        ExperimentRow row;
        row.benchmark = ctx.bench.name;
        row.location = location_name(p.location);
        row.refined = p.refined;
        row.seed_index = p.seed_index;
        row.n_block_gates = spec.n_block_gates;

        // The block seed does not depend on the location, so one drawn block
        // is reused at every insertion point.
        RandomBlockParams params;
        params.n_gates = spec.n_block_gates;
        params.allowed_kinds = spec.block_kinds;
        params.refined = p.refined;
        params.seed = row_seed(spec.master_seed, "block", ctx.bench.name,
                               std::string(p.refined ? "refined" : "plain") +
                                   "-s" + std::to_string(p.seed_index));
        const ObfuscationResult obf =
            obfuscate(ctx.bench.circuit, params, p.location);

        const std::string tag = row.location + '-' +
                                (p.refined ? "r" : "p") + "-s" +
                                std::to_string(p.seed_index);
        const Distribution noisy =
            sample(obf.circuit, ctx.bench.input, spec.shots, spec.noise,
                   row_seed(spec.master_seed, "obf-sample", ctx.bench.name,
                            tag));
        row.tvd = tvd(noisy, ctx.reference);

        const Distribution clean = sample(obf.circuit, ctx.bench.input,
                                          spec.shots, NoiseModel::none(), 0);
        row.dfc = dfc(clean, ctx.bench.correct_output);

        if (spec.with_fidelity) {
          row.fidelity_orig = ctx.fidelity_orig;
          const CompiledCircuit comp = compile(obf.circuit, ctx.map);
          ObfuscationRecord record = obf.record;
          store_layouts(record, comp);
          const DeobfuscationResult deobf =
              deobfuscate(comp, record, ctx.map, spec.stitch_mode);
          const std::string phys_input =
              map_input_to_physical(ctx.bench.input, deobf.initial_layout);
          const Distribution d =
              sample(deobf.circuit, phys_input, spec.fidelity_shots,
                     spec.noise,
                     row_seed(spec.master_seed, "deobf-fid", ctx.bench.name,
                              tag));
          row.fidelity_deobf = fidelity(d, ctx.bench.correct_output);
        }
        rows[idx] = std::move(row);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failed.exchange(true)) failure = e.what();
        return;
      }
    }
  };

  if (spec.jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (uint32_t t = 0; t < spec.jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failed.load()) {
    throw Error(ErrorCode::InvalidArgument, "experiment row failed: " + failure);
  }

  ExperimentResult result;
  result.rows = std::move(rows);

  std::string csv =
      "benchmark,location,refined,seed,n_block_gates,tvd,dfc,fidelity_orig,"
      "fidelity_deobf\n";
  for (const auto& row : result.rows) {
    csv += row.benchmark;
    csv += ',';
    csv += row.location;
    csv += ',';
    csv += row.refined ? '1' : '0';
    csv += ',';
    csv += std::to_string(row.seed_index);
    csv += ',';
    csv += std::to_string(row.n_block_gates);
    csv += ',';
    csv += format_double(row.tvd);
    csv += ',';
    csv += format_double(row.dfc);
    csv += ',';
    if (spec.with_fidelity) {
      csv += format_double(row.fidelity_orig);
      csv += ',';
      csv += format_double(row.fidelity_deobf);
    } else {
      csv += ',';
    }
    csv += '\n';
  }
  result.csv = std::move(csv);

  std::vector<std::string> kind_names;
  for (GateKind k : spec.block_kinds) kind_names.emplace_back(gate_name(k));

  nlohmann::json j;
  j["spec"] = {{"benchmarks", spec.benchmarks},
               {"n_seeds", spec.n_seeds},
               {"master_seed", spec.master_seed},
               {"n_block_gates", spec.n_block_gates},
               {"block_kinds", kind_names},
               {"shots", spec.shots},
               {"fidelity_shots", spec.fidelity_shots},
               {"with_fidelity", spec.with_fidelity},
               {"stitch_mode", stitch_mode_name(spec.stitch_mode)},
               {"noise",
                {{"p1", spec.noise.p1},
                 {"p2", spec.noise.p2},
                 {"p_ro", spec.noise.p_ro}}}};
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : summarize(result.rows)) {
    cells.push_back({{"benchmark", c.benchmark},
                     {"location", c.location},
                     {"refined", c.refined},
                     {"n", c.n},
                     {"tvd_mean", c.tvd_mean},
                     {"tvd_median", c.tvd_median},
                     {"tvd_q1", c.tvd_q1},
                     {"tvd_q3", c.tvd_q3},
                     {"tvd_var", c.tvd_var},
                     {"dfc_mean", c.dfc_mean},
                     {"fidelity_orig_mean", c.fidelity_orig_mean},
                     {"fidelity_deobf_mean", c.fidelity_deobf_mean}});
  }
  j["cells"] = std::move(cells);
  result.summary_json = j.dump(2) + "\n";
  return result;
}

}  // namespace qlock
