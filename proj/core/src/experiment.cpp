#include "eadrsim/experiment.hpp"

#include <cinttypes>
#include <cstdio>
#include <map>
#include <ostream>
#include <tuple>

#include "eadrsim/block_cipher.hpp"

namespace eadrsim {

namespace {
SimParams params_for(const ExperimentConfig& cfg, SchemeId scheme) {
  SimParams p;
  p.scheme = scheme;
  p.geometry = cfg.geometry;
  p.nvm_user_bytes = cfg.nvm_user_bytes;
  p.counter_cache_bytes = cfg.counter_cache_bytes;
  p.key = parse_key_hex(cfg.key_hex);
  p.lat = cfg.lat;
  p.energy = cfg.energy;
  return p;
}
}  // namespace

CellResult run_cell_on_trace(const ExperimentConfig& cfg, const CellSpec& spec,
                             const OpTrace& ops) {
  if (spec.crash_point > static_cast<std::int64_t>(ops.size()))
    throw SimError("crash point " + std::to_string(spec.crash_point) +
                   " beyond the " + std::to_string(ops.size()) + "-op trace");

  Simulator sim(params_for(cfg, spec.scheme));
  GroundTruth truth;
  const std::uint64_t to_run = spec.crash_point >= 0
                                   ? static_cast<std::uint64_t>(spec.crash_point)
                                   : ops.size();
  for (std::uint64_t i = 0; i < to_run; i++) {
    const DataLine got = sim.apply(ops[i]);
    const DataLine expect = truth.apply(ops[i]);
    // Functional transparency is a simulator invariant, not an audit verdict:
    // a scheme that corrupts reads is broken, full stop.
    if (!ops[i].is_write && got != expect)
      throw SimError("functional transparency violated at op " +
                     std::to_string(i) + ", addr " + std::to_string(ops[i].addr));
  }

  CellResult r;
  r.spec = spec;
  CrashRecord rec;
  if (spec.crash_point >= 0) {
    rec = sim.crash(spec.model);
    sim.recover();
  }

  r.report.scheme = to_string(spec.scheme);
  r.report.model = to_string(spec.model);
  r.report.config_hash = cfg.hash();
  r.report.crashed = spec.crash_point >= 0;
  r.report.crash_point = spec.crash_point >= 0
                             ? static_cast<std::uint64_t>(spec.crash_point)
                             : 0;
  audit_confidentiality(r.report, sim.trace(), ops);
  audit_pad_uniqueness(r.report, sim.seed_log());
  audit_persistence(r.report, rec.dirty, truth, sim);

  r.stats = sim.stats();
  r.stats.pads_generated = sim.seed_log().size();
  for (const auto& e : sim.trace().events) {
    if (e.cls == BusClass::kUserData)
      r.stats.bus_user_bytes += kLineBytes;
    else
      r.stats.bus_meta_bytes += kLineBytes;
  }
  r.energy_mj = r.stats.crash_energy_mj;
  r.recovery_s = r.stats.recovery_s;
  return r;
}

CellResult run_cell(const ExperimentConfig& cfg, const CellSpec& spec) {
  TxnSpec t;
  t.n_txns = cfg.n_txns;
  t.txn_bytes = spec.txn_bytes;
  t.arena_bytes = cfg.arena_bytes;
  t.rng_seed = cfg.rng_seed;
  t.value_seed = cfg.value_seed;
  return run_cell_on_trace(cfg, spec,
                           generate_multicore(spec.workload, t, spec.n_cores));
}

std::uint64_t run_experiment(const ExperimentConfig& cfg,
                             const std::function<void(const CellResult&)>& sink) {
  cfg.validate();
  // Traces depend only on (workload, txn, cores): generate each once.
  std::map<std::tuple<WorkloadKind, std::uint32_t, std::uint32_t>, OpTrace> traces;
  auto trace_for = [&](WorkloadKind w, std::uint32_t txn,
                       std::uint32_t n_cores) -> const OpTrace& {
    auto key = std::make_tuple(w, txn, n_cores);
    auto it = traces.find(key);
    if (it != traces.end()) return it->second;
    TxnSpec t;
    t.n_txns = cfg.n_txns;
    t.txn_bytes = txn;
    t.arena_bytes = cfg.arena_bytes;
    t.rng_seed = cfg.rng_seed;
    t.value_seed = cfg.value_seed;
    return traces.emplace(key, generate_multicore(w, t, n_cores)).first->second;
  };

  std::uint64_t contrary = 0;
  for (auto scheme : cfg.schemes)
    for (auto model : cfg.models)
      for (auto workload : cfg.workloads)
        for (auto txn : cfg.txn_sizes)
          for (auto n_cores : cfg.cores) {
            const OpTrace& ops = trace_for(workload, txn, n_cores);
            std::vector<std::int64_t> points;
            switch (cfg.crash.mode) {
              case CrashPlan::Mode::kNone:
                points.push_back(-1);
                break;
              case CrashPlan::Mode::kAtStep:
                points.push_back(static_cast<std::int64_t>(cfg.crash.at_step));
                break;
              case CrashPlan::Mode::kSweep: {
                const std::uint64_t len = ops.size();
                const std::uint64_t n = cfg.crash.sweep_points;
                if (n == 0 || n > len) {  // exhaustive: every step plus the end
                  for (std::uint64_t k = 0; k <= len; ++k)
                    points.push_back(static_cast<std::int64_t>(k));
                } else {  // n evenly spaced points; distinct because n <= len
                  for (std::uint64_t i = 0; i < n; ++i)
                    points.push_back(static_cast<std::int64_t>(i * len / n));
                }
                break;
              }
            }
            for (auto k : points) {
              CellSpec spec{scheme, model, workload, txn, n_cores, k};
              const CellResult r = run_cell_on_trace(cfg, spec, ops);
              if (!expected_to_leak(scheme, model) && !r.report.clean()) contrary++;
              if (cfg.expect_leak && r.report.leak_count == 0) contrary++;
              sink(r);
            }
          }
  return contrary;
}

void write_csv_header(std::ostream& os, const ExperimentConfig& cfg) {
  char hash_hex[20];
  std::snprintf(hash_hex, sizeof hash_hex, "%016" PRIx64, cfg.hash());
  os << "# eadrsim results, config_hash=" << hash_hex << "\n"
     << "scheme,model,workload,txn_size,cores,crash_point,ops,cycles,"
        "energy_mj,recovery_s,violations,duplicate_seeds,"
        "persistence_mismatches\n";
}

void write_csv_row(std::ostream& os, const CellResult& r) {
  os << to_string(r.spec.scheme) << ',' << to_string(r.spec.model) << ','
     << to_string(r.spec.workload) << ',' << r.spec.txn_bytes << ','
     << r.spec.n_cores << ',' << r.spec.crash_point << ',' << r.stats.ops << ','
     << r.stats.total_cycles << ',' << format_mj(r.energy_mj) << ','
     << format_seconds(r.recovery_s) << ',' << r.report.leak_count << ','
     << r.report.duplicate_seed_count << ',' << r.report.mismatch_count << '\n';
}

void write_energy_table(std::ostream& os, const ExperimentConfig& cfg) {
  const auto& lv = cfg.geometry.levels;
  const std::uint64_t l1 = lv.size() > 0 ? lv[0].capacity_bytes * lv[0].partitions : 0;
  const std::uint64_t l2 = lv.size() > 1 ? lv[1].capacity_bytes * lv[1].partitions : 0;
  std::uint64_t l3 = 0;
  for (std::size_t i = 2; i < lv.size(); i++)
    l3 += lv[i].capacity_bytes * lv[i].partitions;

  char hash_hex[20];
  std::snprintf(hash_hex, sizeof hash_hex, "%016" PRIx64, cfg.hash());
  os << "# crash-flush energy, config_hash=" << hash_hex << "\n"
     << "system,cache_flush_mj,mc_flush_mj,module_mj,total_mj\n";
  for (const auto& row :
       energy_report(l1, l2, l3, cfg.counter_cache_bytes, cfg.energy)) {
    auto cell = [](double v) { return v < 0 ? std::string("/") : format_mj(v); };
    os << row.system << ',' << cell(row.cache_flush_mj) << ','
       << cell(row.mc_flush_mj) << ',' << cell(row.module_mj) << ','
       << format_mj(row.total_mj) << '\n';
  }
}

void write_recovery_curve(std::ostream& os, const ExperimentConfig& cfg,
                          const std::vector<std::uint64_t>& cache_mib) {
  char hash_hex[20];
  std::snprintf(hash_hex, sizeof hash_hex, "%016" PRIx64, cfg.hash());
  os << "# post-crash recovery time, config_hash=" << hash_hex << "\n"
     << "cache_mib,bbe_s,sepencr_s\n";
  for (const auto& row : recovery_report(cache_mib)) {
    char line[96];
    std::snprintf(line, sizeof line, "%" PRIu64 ",%.9f,%.9f\n", row.cache_mib,
                  row.bbe_s, row.sepencr_s);
    os << line;
  }
}

}  // namespace eadrsim
