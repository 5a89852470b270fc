#pragma once

// Experiment configuration: one JSON object, overridable field-by-field from
// the command line. The canonical serialization hashes into a config
// fingerprint that stamps every output (CSV headers, audit reports) so runs
// are attributable to exact settings.

#include <cstdint>
#include <string>
#include <vector>

#include "eadrsim/geometry.hpp"
#include "eadrsim/metrics.hpp"
#include "eadrsim/types.hpp"
#include "eadrsim/workloads.hpp"

namespace eadrsim {

struct CrashPlan {
  enum class Mode { kNone, kAtStep, kSweep };
  Mode mode = Mode::kNone;
  std::uint64_t at_step = 0;      // kAtStep: ops executed before power loss
  std::uint64_t sweep_points = 0; // kSweep: evenly spaced crash points; 0 = every step
};

CrashPlan parse_crash_plan(const std::string& text);  // "none"|"step:K"|"sweep"|"sweep:K"
std::string to_string(const CrashPlan& plan);

struct ExperimentConfig {
  std::vector<SchemeId> schemes = {SchemeId::kBaseline, SchemeId::kMcCme,
                                   SchemeId::kEadrCme, SchemeId::kBbe,
                                   SchemeId::kSepencr};
  std::vector<EadrModel> models = {EadrModel::kAllOperation};
  std::vector<WorkloadKind> workloads = {WorkloadKind::kArray};
  std::vector<std::uint32_t> txn_sizes = {64};
  std::vector<std::uint32_t> cores = {1};

  std::uint64_t n_txns = 10000;
  std::uint64_t arena_bytes = 8ull << 20;
  std::uint64_t rng_seed = 1;
  std::uint64_t value_seed = 1;
  std::string key_hex = "000102030405060708090a0b0c0d0e0f";

  CacheGeometry geometry = CacheGeometry::default_geometry();
  std::uint64_t nvm_user_bytes = 16ull << 30;
  std::uint64_t counter_cache_bytes = 512ull << 10;
  LatencyTable lat{};
  EnergyTable energy{};

  CrashPlan crash{};
  bool expect_leak = false;  // run fails unless the audit finds leaks

  // Canonical JSON (sorted keys, fixed formatting).
  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig load(const std::string& path);

  void validate() const;  // throws ConfigError with a specific message
  std::uint64_t hash() const { return fnv1a64(to_json()); }
};

}  // namespace eadrsim
