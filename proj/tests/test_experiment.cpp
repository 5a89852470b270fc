#include <cinttypes>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "eadrsim/experiment.hpp"

using namespace eadrsim;

namespace {

// Small matrix over the 16-slot geometry: fast cells, real evictions.
ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.geometry = CacheGeometry{{{256, 2, 2}, {512, 2, 1}}};
  cfg.nvm_user_bytes = 256ull << 20;
  cfg.counter_cache_bytes = 4096;
  cfg.n_txns = 50;
  cfg.arena_bytes = 4096;
  return cfg;
}

CellSpec cell(SchemeId s, EadrModel m, std::int64_t crash_point = -1) {
  return CellSpec{s, m, WorkloadKind::kArray, 64, 1, crash_point};
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("run_cell executes the trace, audits it, and stamps provenance") {
  const ExperimentConfig cfg = small_config();
  const CellResult r = run_cell(cfg, cell(SchemeId::kBaseline, EadrModel::kAllOperation));

  CHECK(r.stats.ops == 50);
  CHECK(r.stats.total_cycles > 0);
  CHECK(r.stats.bus_user_bytes > 0);
  CHECK(r.report.config_hash == cfg.hash());
  CHECK_FALSE(r.report.crashed);
  CHECK(r.report.leak_count > 0);  // plaintext evictions during normal operation
  CHECK(r.report.pads_unique());
  CHECK(r.stats.pads_generated == 0);
  CHECK(r.report.persistent());
  CHECK(r.energy_mj == 0.0);  // no crash, no flush
  CHECK(r.recovery_s == 0.0);
}

TEST_CASE("crashed cells expose the mc-cme dilemma and its energy cost") {
  const ExperimentConfig cfg = small_config();
  const CellResult r =
      run_cell(cfg, cell(SchemeId::kMcCme, EadrModel::kWriteOnly, 25));

  CHECK(r.report.crashed);
  CHECK(r.report.crash_point == 25);
  CHECK(r.report.leak_count >= 1);  // dirty lines flushed as plaintext
  CHECK(r.report.persistent());    // ...yet everything survived
  CHECK(r.report.pads_unique());
  CHECK(expected_to_leak(r.spec.scheme, r.spec.model));
  CHECK(r.energy_mj > 0.0);
  CHECK(r.recovery_s == 0.0);  // counter-mode recovery is on demand
}

TEST_CASE("battery-backed recovery time scales with the data cache") {
  const ExperimentConfig cfg = small_config();  // 1024 B of cache = 16 lines

  const CellResult sep =
      run_cell(cfg, cell(SchemeId::kSepencr, EadrModel::kWriteOnly, 25));
  CHECK(sep.report.clean());
  CHECK(sep.recovery_s == doctest::Approx(1.6e-6).epsilon(1e-12));

  const CellResult bbe =
      run_cell(cfg, cell(SchemeId::kBbe, EadrModel::kWriteComputeOrder, 25));
  CHECK(bbe.report.clean());
  CHECK(bbe.recovery_s == doctest::Approx(3.2e-6).epsilon(1e-12));
  CHECK(bbe.recovery_s == doctest::Approx(2 * sep.recovery_s));
}

TEST_CASE("crash points beyond the trace are rejected") {
  const ExperimentConfig cfg = small_config();
  const OpTrace ops = generate_uniform(20, 4096, 3);

  const CellResult last =
      run_cell_on_trace(cfg, cell(SchemeId::kEadrCme, EadrModel::kWriteOnly, 20), ops);
  CHECK(last.report.crashed);
  CHECK(last.stats.ops == 20);

  CHECK_THROWS_AS(
      run_cell_on_trace(cfg, cell(SchemeId::kEadrCme, EadrModel::kWriteOnly, 21), ops),
      SimError);
}

TEST_CASE("sweep:k expands to k evenly spaced crash points") {
  ExperimentConfig cfg = small_config();
  cfg.schemes = {SchemeId::kEadrCme};
  cfg.models = {EadrModel::kAllOperation};
  cfg.crash = parse_crash_plan("sweep:7");

  std::set<std::int64_t> points;
  std::uint64_t cells = 0;
  const std::uint64_t contrary = run_experiment(cfg, [&](const CellResult& r) {
    cells++;
    points.insert(r.spec.crash_point);
    CHECK(r.report.clean());
  });

  CHECK(contrary == 0);
  CHECK(cells == 7);  // floor(i * 50 / 7) for i = 0..6
  CHECK(points == std::set<std::int64_t>{0, 7, 14, 21, 28, 35, 42});
}

TEST_CASE("bare sweep crashes at every step plus the trace end") {
  ExperimentConfig cfg = small_config();
  cfg.schemes = {SchemeId::kEadrCme};
  cfg.models = {EadrModel::kAllOperation};
  cfg.crash = parse_crash_plan("sweep");

  std::set<std::int64_t> points;
  std::uint64_t cells = 0;
  run_experiment(cfg, [&](const CellResult& r) {
    cells++;
    points.insert(r.spec.crash_point);
  });

  CHECK(cells == 51);  // 50-op trace: crash points 0..50 inclusive
  CHECK(*points.begin() == 0);
  CHECK(*points.rbegin() == 50);
}

TEST_CASE("contrary cells are counted in both directions") {
  // A clean scheme under --expect-leak comes up short...
  ExperimentConfig expecting = small_config();
  expecting.schemes = {SchemeId::kEadrCme};
  expecting.models = {EadrModel::kAllOperation};
  expecting.expect_leak = true;
  CHECK(run_experiment(expecting, [](const CellResult&) {}) == 1);

  // ...while baseline leaking in normal operation satisfies it.
  ExperimentConfig leaky = expecting;
  leaky.schemes = {SchemeId::kBaseline};
  CHECK(run_experiment(leaky, [](const CellResult&) {}) == 0);
}

TEST_CASE("csv output carries the config hash and 13 fixed columns") {
  const ExperimentConfig cfg = small_config();
  std::ostringstream os;
  write_csv_header(os, cfg);
  write_csv_row(os, run_cell(cfg, cell(SchemeId::kBaseline, EadrModel::kAllOperation)));

  std::istringstream is(os.str());
  std::string provenance, header, row;
  REQUIRE(std::getline(is, provenance));
  REQUIRE(std::getline(is, header));
  REQUIRE(std::getline(is, row));

  char expect[64];
  std::snprintf(expect, sizeof expect, "# eadrsim results, config_hash=%016" PRIx64,
                cfg.hash());
  CHECK(provenance == expect);
  CHECK(header ==
        "scheme,model,workload,txn_size,cores,crash_point,ops,cycles,"
        "energy_mj,recovery_s,violations,duplicate_seeds,persistence_mismatches");

  const auto fields = split_csv(row);
  REQUIRE(fields.size() == 13);
  CHECK(fields[0] == "baseline");
  CHECK(fields[1] == "all-operation");
  CHECK(fields[2] == "array");
  CHECK(fields[3] == "64");
  CHECK(fields[4] == "1");
  CHECK(fields[5] == "-1");  // no crash injected
  CHECK(fields[6] == "50");
}

TEST_CASE("identical cells reproduce bit-identical results") {
  const ExperimentConfig cfg = small_config();
  const CellSpec spec = cell(SchemeId::kSepencr, EadrModel::kWriteOnly, 30);
  const CellResult a = run_cell(cfg, spec);
  const CellResult b = run_cell(cfg, spec);
  CHECK(a.stats.total_cycles == b.stats.total_cycles);
  CHECK(a.stats.pads_generated == b.stats.pads_generated);
  CHECK(a.report.leak_count == b.report.leak_count);
  CHECK(a.energy_mj == b.energy_mj);
  CHECK(a.recovery_s == b.recovery_s);
}

TEST_CASE("energy table reproduces the headline milli-joule rows") {
  std::ostringstream os;
  write_energy_table(os, ExperimentConfig{});  // 1+1+2 MiB caches, 512 KiB counters
  const std::string out = os.str();

  std::istringstream is(out);
  std::string provenance, header;
  REQUIRE(std::getline(is, provenance));
  REQUIRE(std::getline(is, header));
  CHECK(provenance.rfind("# crash-flush energy, config_hash=", 0) == 0);
  CHECK(header == "system,cache_flush_mj,mc_flush_mj,module_mj,total_mj");

  CHECK(out.find("baseline,47.7343,/,/,47.7343\n") != std::string::npos);
  CHECK(out.find("mc-cme,47.7343,/,/,47.7343\n") != std::string::npos);
  CHECK(out.find("eadr-cme,47.7343,/,/,47.7343\n") != std::string::npos);
  CHECK(out.find("sepencr,23.8672,5.8867,/,29.7539\n") != std::string::npos);
  CHECK(out.find("bbe,47.7343,5.8867,0.8087,54.4297\n") != std::string::npos);
}

TEST_CASE("recovery curve reproduces the headline seconds") {
  std::ostringstream os;
  write_recovery_curve(os, ExperimentConfig{});
  const std::string out = os.str();

  std::istringstream is(out);
  std::string provenance, header;
  REQUIRE(std::getline(is, provenance));
  REQUIRE(std::getline(is, header));
  CHECK(header == "cache_mib,bbe_s,sepencr_s");

  CHECK(out.find("4,0.013107200,0.006553600\n") != std::string::npos);
  CHECK(out.find("32,0.104857600,0.052428800\n") != std::string::npos);
}

}  // TEST_SUITE
