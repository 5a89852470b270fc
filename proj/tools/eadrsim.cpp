// eadrsim command-line driver.
//
// Subcommands:
//   run             scheme x model x workload matrix -> CSV stats (+ JSON audits)
//   sweep           run with crash points swept across the trace
//   energy-table    closed-form crash-flush energy table (CSV)
//   recovery-curve  post-crash recovery time vs cache size (CSV)
//   audit           re-run the auditors for one scheme/model over a saved trace
//
// Every output starts with a provenance header carrying the config hash, so a
// result file is attributable to exact settings; identical configs produce
// byte-identical output. Exit status: 0 on success, 1 if any audit came out
// contrary to expectation, 2 on configuration or usage errors.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "eadrsim/audit.hpp"
#include "eadrsim/config.hpp"
#include "eadrsim/experiment.hpp"
#include "eadrsim/types.hpp"
#include "eadrsim/workloads.hpp"

using namespace eadrsim;

namespace {

// Flag values layered on top of the JSON config (absent flag = keep config).
struct Overrides {
  std::vector<std::string> schemes, models, workloads;
  std::vector<std::uint32_t> txn_sizes, cores;
  std::optional<std::uint64_t> n_txns, arena_bytes, rng_seed, value_seed;
  std::optional<std::uint64_t> nvm_user_bytes, counter_cache_bytes;
  std::optional<std::string> key_hex, crash;
  bool expect_leak = false;
};

ExperimentConfig make_config(const std::string& config_path, const Overrides& ov) {
  ExperimentConfig cfg =
      config_path.empty() ? ExperimentConfig{} : ExperimentConfig::load(config_path);
  if (!ov.schemes.empty()) {
    cfg.schemes.clear();
    for (const auto& s : ov.schemes) cfg.schemes.push_back(parse_scheme(s));
  }
  if (!ov.models.empty()) {
    cfg.models.clear();
    for (const auto& m : ov.models) cfg.models.push_back(parse_model(m));
  }
  if (!ov.workloads.empty()) {
    cfg.workloads.clear();
    for (const auto& w : ov.workloads) cfg.workloads.push_back(parse_workload(w));
  }
  if (!ov.txn_sizes.empty()) cfg.txn_sizes = ov.txn_sizes;
  if (!ov.cores.empty()) cfg.cores = ov.cores;
  if (ov.n_txns) cfg.n_txns = *ov.n_txns;
  if (ov.arena_bytes) cfg.arena_bytes = *ov.arena_bytes;
  if (ov.rng_seed) cfg.rng_seed = *ov.rng_seed;
  if (ov.value_seed) cfg.value_seed = *ov.value_seed;
  if (ov.nvm_user_bytes) cfg.nvm_user_bytes = *ov.nvm_user_bytes;
  if (ov.counter_cache_bytes) cfg.counter_cache_bytes = *ov.counter_cache_bytes;
  if (ov.key_hex) cfg.key_hex = *ov.key_hex;
  if (ov.crash) cfg.crash = parse_crash_plan(*ov.crash);
  if (ov.expect_leak) cfg.expect_leak = true;
  cfg.validate();
  return cfg;
}

// Returns std::cout for an empty path, else the opened file.
std::ostream& open_out(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw SimError("cannot open output file '" + path + "'");
  return file;
}

nlohmann::json audit_entry(const CellResult& r) {
  nlohmann::json cell;
  cell["workload"] = to_string(r.spec.workload);
  cell["txn_size"] = r.spec.txn_bytes;
  cell["cores"] = r.spec.n_cores;
  cell["audit"] = nlohmann::json::parse(r.report.to_json());
  return cell;
}

int cmd_run(const ExperimentConfig& cfg, const std::string& out_path,
            const std::string& audits_path, const std::string& export_trace) {
  if (!export_trace.empty()) {
    if (cfg.workloads.size() != 1 || cfg.txn_sizes.size() != 1 || cfg.cores.size() != 1)
      throw ConfigError(
          "--export-trace needs a single workload/txn/cores combination");
    TxnSpec spec;
    spec.n_txns = cfg.n_txns;
    spec.txn_bytes = cfg.txn_sizes[0];
    spec.arena_bytes = cfg.arena_bytes;
    spec.rng_seed = cfg.rng_seed;
    spec.value_seed = cfg.value_seed;
    save_trace(export_trace, generate_multicore(cfg.workloads[0], spec, cfg.cores[0]));
  }

  std::ofstream file;
  std::ostream& os = open_out(file, out_path);
  write_csv_header(os, cfg);

  nlohmann::json audits = nlohmann::json::array();
  const bool want_audits = !audits_path.empty();
  const std::uint64_t contrary = run_experiment(cfg, [&](const CellResult& r) {
    write_csv_row(os, r);
    if (want_audits) audits.push_back(audit_entry(r));
  });
  os.flush();

  if (want_audits) {
    std::ofstream af(audits_path, std::ios::binary);
    if (!af) throw SimError("cannot open audit file '" + audits_path + "'");
    af << audits.dump(2) << "\n";
  }
  if (contrary > 0)
    std::cerr << contrary << " cell(s) came out contrary to expectation\n";
  return contrary > 0 ? 1 : 0;
}

int cmd_audit(const ExperimentConfig& cfg, const std::string& trace_path,
              const std::string& out_path) {
  if (cfg.schemes.size() != 1 || cfg.models.size() != 1)
    throw ConfigError("audit needs exactly one --scheme and one --model");
  std::int64_t crash_point = -1;
  switch (cfg.crash.mode) {
    case CrashPlan::Mode::kNone:
      break;
    case CrashPlan::Mode::kAtStep:
      crash_point = static_cast<std::int64_t>(cfg.crash.at_step);
      break;
    case CrashPlan::Mode::kSweep:
      throw ConfigError("audit takes --crash none or step:K, not a sweep");
  }

  const OpTrace ops = load_trace(trace_path);
  const CellSpec spec{cfg.schemes[0], cfg.models[0], cfg.workloads[0],
                      cfg.txn_sizes[0], cfg.cores[0], crash_point};
  const CellResult r = run_cell_on_trace(cfg, spec, ops);

  std::ofstream file;
  std::ostream& os = open_out(file, out_path);
  os << r.report.to_json() << "\n";
  os.flush();

  const bool contrary =
      (!expected_to_leak(spec.scheme, spec.model) && !r.report.clean()) ||
      (cfg.expect_leak && r.report.leak_count == 0);
  if (contrary) std::cerr << "audit came out contrary to expectation\n";
  return contrary ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eadrsim: deterministic simulator and security auditor for "
               "encrypted NVM under eADR crash-flush models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "eadrsim 1.0.0");

  std::string config_path, out_path, audits_path, trace_in, trace_out;
  std::uint64_t sweep_points = 10;
  std::vector<std::uint64_t> curve_sizes = {2, 4, 8, 16, 32};
  Overrides ov;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--config", config_path, "JSON config file (flags override fields)");
    c->add_option("--out", out_path, "output path (default: stdout)");
  };
  auto add_matrix = [&](CLI::App* c) {
    add_common(c);
    c->add_option("--scheme", ov.schemes,
                  "scheme(s): baseline|mc-cme|eadr-cme|bbe|sepencr");
    c->add_option("--model", ov.models,
                  "eADR model(s): all-operation|write-compute-order|write-only");
    c->add_option("--workload", ov.workloads,
                  "workload(s): array|queue|btree|hash|rbtree");
    c->add_option("--txn", ov.txn_sizes, "transaction size(s) in bytes");
    c->add_option("--cores", ov.cores, "core count(s)");
    c->add_option("--n-txns", ov.n_txns, "transactions per trace");
    c->add_option("--arena", ov.arena_bytes, "per-core working-set bytes");
    c->add_option("--rng-seed", ov.rng_seed, "trace structure seed");
    c->add_option("--value-seed", ov.value_seed, "payload value seed");
    c->add_option("--key", ov.key_hex, "AES-128 key, 32 hex digits");
    c->add_option("--nvm-bytes", ov.nvm_user_bytes, "NVM user-space bytes");
    c->add_option("--counter-cache", ov.counter_cache_bytes, "counter-cache bytes");
    c->add_option("--audits", audits_path, "write per-cell JSON audit reports here");
    c->add_flag("--expect-leak", ov.expect_leak,
                "fail unless the confidentiality audit finds leaks");
  };

  CLI::App* run = app.add_subcommand(
      "run", "Run the scheme x model x workload matrix; one CSV row per cell");
  add_matrix(run);
  run->add_option("--crash", ov.crash, "crash plan: none|step:K|sweep|sweep:K");
  run->add_option("--export-trace", trace_out, "save the generated trace (text)");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Run with crash points swept evenly across the trace");
  add_matrix(sweep);
  sweep->add_option("--points", sweep_points,
                    "evenly spaced crash points (0 = every step)");

  CLI::App* energy = app.add_subcommand(
      "energy-table", "Closed-form crash-flush energy per scheme (CSV)");
  add_common(energy);

  CLI::App* curve = app.add_subcommand(
      "recovery-curve", "Post-crash recovery time vs cache size (CSV)");
  add_common(curve);
  curve->add_option("--sizes", curve_sizes, "cache sizes in MiB");

  CLI::App* audit = app.add_subcommand(
      "audit", "Re-run the auditors for one scheme/model over a saved trace");
  add_matrix(audit);
  audit->add_option("--trace", trace_in, "trace file to audit")->required();
  audit->add_option("--crash", ov.crash, "crash plan: none|step:K");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit 0; parse errors are usage errors
  }

  try {
    if (app.got_subcommand(sweep)) {
      CrashPlan plan;
      plan.mode = CrashPlan::Mode::kSweep;
      plan.sweep_points = sweep_points;
      ov.crash = to_string(plan);
    }
    const bool needs_matrix = app.got_subcommand(run) || app.got_subcommand(sweep) ||
                              app.got_subcommand(audit);
    const ExperimentConfig cfg = needs_matrix
                                     ? make_config(config_path, ov)
                                     : make_config(config_path, Overrides{});

    if (app.got_subcommand(run) || app.got_subcommand(sweep))
      return cmd_run(cfg, out_path, audits_path, trace_out);
    if (app.got_subcommand(audit)) return cmd_audit(cfg, trace_in, out_path);

    std::ofstream file;
    std::ostream& os = open_out(file, out_path);
    if (app.got_subcommand(energy)) write_energy_table(os, cfg);
    if (app.got_subcommand(curve)) write_recovery_curve(os, cfg, curve_sizes);
    os.flush();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
