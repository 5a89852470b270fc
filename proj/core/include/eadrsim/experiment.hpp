#pragma once

// Experiment runner: executes scheme x model x workload x txn x cores cells,
// each optionally with crash injection (single point or sweep), runs all
// three audits per cell, and emits deterministic CSV.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "eadrsim/audit.hpp"
#include "eadrsim/config.hpp"
#include "eadrsim/scheme.hpp"
#include "eadrsim/types.hpp"
#include "eadrsim/workloads.hpp"

namespace eadrsim {

struct CellSpec {
  SchemeId scheme;
  EadrModel model;
  WorkloadKind workload;
  std::uint32_t txn_bytes;
  std::uint32_t n_cores;
  // < 0: no crash; otherwise ops executed before power loss.
  std::int64_t crash_point = -1;
};

struct CellResult {
  CellSpec spec;
  RunStats stats;
  AuditReport report;
  double energy_mj = 0.0;
  double recovery_s = 0.0;
};

// Runs one cell: trace generation, simulation, optional crash + recovery,
// all three audits. The trace is regenerated from config seeds.
CellResult run_cell(const ExperimentConfig& cfg, const CellSpec& spec);

// As run_cell but over a caller-supplied trace (imported or synthetic).
CellResult run_cell_on_trace(const ExperimentConfig& cfg, const CellSpec& spec,
                             const OpTrace& ops);

// Expands the config matrix (and crash sweep) into cells; calls sink after
// each finished cell. Returns the number of cells whose audits came out
// contrary to expectation (clean when a leak was expected, or leaking when
// the scheme/model combination must stay clean).
std::uint64_t run_experiment(const ExperimentConfig& cfg,
                             const std::function<void(const CellResult&)>& sink);

// CSV: provenance header (config hash) + one row per cell.
void write_csv_header(std::ostream& os, const ExperimentConfig& cfg);
void write_csv_row(std::ostream& os, const CellResult& r);

// Headline reports (closed-form; independent of any trace).
void write_energy_table(std::ostream& os, const ExperimentConfig& cfg);
void write_recovery_curve(std::ostream& os, const ExperimentConfig& cfg,
                          const std::vector<std::uint64_t>& cache_mib = {2, 4, 8,
                                                                         16, 32});

}  // namespace eadrsim
