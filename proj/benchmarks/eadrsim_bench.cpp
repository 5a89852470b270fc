// Microbenchmarks for the hot paths: AES block encryption, one-time-pad
// generation, the simulator access loop per scheme, and a full experiment
// cell. Throughput counters are bytes of user data moved (pads: pad bytes).

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "eadrsim/block_cipher.hpp"
#include "eadrsim/cme.hpp"
#include "eadrsim/config.hpp"
#include "eadrsim/experiment.hpp"
#include "eadrsim/scheme.hpp"
#include "eadrsim/types.hpp"
#include "eadrsim/workloads.hpp"

namespace {

using namespace eadrsim;

AesKey bench_key() { return parse_key_hex("000102030405060708090a0b0c0d0e0f"); }

void bm_aes_block(benchmark::State& state) {
  const Aes128 cipher(bench_key());
  Block16 block{};
  for (auto _ : state) {
    block = cipher.encrypt_block(block);
    benchmark::DoNotOptimize(block);
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * 16);
}
BENCHMARK(bm_aes_block);

void bm_otp_pad(benchmark::State& state) {
  OtpGen otp(bench_key());
  Seed seed{SeedDomain::kLineCounter, 0, 1, 0};
  std::uint64_t step = 0;
  for (auto _ : state) {
    seed.addr += kLineBytes;  // fresh seed each pad, like a counter bump
    DataLine pad = otp.generate(seed, PadPurpose::kEncrypt, step++, 0);
    benchmark::DoNotOptimize(pad);
    if (otp.log().size() > (1u << 20)) {
      state.PauseTiming();
      otp.log().clear();  // keep the append-only log bounded
      state.ResumeTiming();
    }
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          kLineBytes);
}
BENCHMARK(bm_otp_pad);

// One simulated op (read or write) over a cache-resident working set.
void bm_access_loop(benchmark::State& state) {
  SimParams p;
  p.scheme = static_cast<SchemeId>(state.range(0));
  p.key = bench_key();
  Simulator sim(p);

  const OpTrace ops = generate_uniform(1 << 14, 256 << 10, /*seed=*/7);
  for (const Op& op : ops) sim.apply(op);  // warm the hierarchy

  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim.apply(ops[i]));
    if (++i == ops.size()) i = 0;
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          kLineBytes);
  state.SetLabel(to_string(p.scheme));
}
BENCHMARK(bm_access_loop)
    ->Arg(static_cast<int>(SchemeId::kBaseline))
    ->Arg(static_cast<int>(SchemeId::kEadrCme))
    ->Arg(static_cast<int>(SchemeId::kBbe))
    ->Arg(static_cast<int>(SchemeId::kSepencr));

// Full cell: trace generation, simulation, audits. Items = simulated ops.
void bm_experiment_cell(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.n_txns = 10000;
  cfg.arena_bytes = 1 << 20;
  const CellSpec spec{SchemeId::kSepencr, EadrModel::kAllOperation,
                      WorkloadKind::kArray, 64, 1, -1};
  std::uint64_t ops = 0;
  for (auto _ : state) {
    const CellResult r = run_cell(cfg, spec);
    benchmark::DoNotOptimize(r.stats.total_cycles);
    ops += r.stats.ops;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(ops));
}
BENCHMARK(bm_experiment_cell)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
