#pragma once

// Deterministic trace generators. Five data-structure workloads emit full-line
// read/write ops over per-core arenas; identical spec -> identical trace,
// bit-for-bit. Randomness comes from mt19937_64 raw draws reduced by modulo.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "eadrsim/types.hpp"

namespace eadrsim {

enum class WorkloadKind { kArray, kQueue, kBtree, kHash, kRbtree };

const char* to_string(WorkloadKind k);
WorkloadKind parse_workload(const std::string& name);

struct Op {
  std::uint32_t core = 0;
  bool is_write = false;
  PhysAddr addr = 0;
  DataLine value{};  // written value; all-zero for reads
};

using OpTrace = std::vector<Op>;

// Cores own disjoint 64 MiB arena strides; the generator touches at most
// arena_bytes of its stride.
inline constexpr std::uint64_t kArenaStride = 64ull << 20;

struct TxnSpec {
  std::uint64_t n_txns = 1000;
  std::uint32_t txn_bytes = 64;     // multiple of 64
  std::uint64_t arena_bytes = 8ull << 20;
  std::uint64_t rng_seed = 1;       // structural choices (keys, ops)
  std::uint64_t value_seed = 1;     // payload bytes
};

// Single-core trace for one workload, arena based at arena_base.
OpTrace generate_trace(WorkloadKind kind, const TxnSpec& spec,
                       std::uint32_t core = 0, PhysAddr arena_base = 0);

// Round-robin interleave of per-core traces (op granularity). Throws if two
// traces touch overlapping arenas.
OpTrace interleave_cores(const std::vector<OpTrace>& per_core);

// Convenience: n_cores independent copies of the workload, core c based at
// c * 64 MiB, seeds offset per core, round-robin interleaved.
OpTrace generate_multicore(WorkloadKind kind, const TxnSpec& spec,
                           std::uint32_t n_cores);

// Uniform mixed read/write trace (not one of the named workloads); used by
// audits and equivalence tests.
OpTrace generate_uniform(std::uint64_t n_ops, std::uint64_t arena_bytes,
                         std::uint64_t seed, std::uint32_t n_cores = 1,
                         unsigned write_pct = 50);

// Text round-trip: one op per line, "core op addr hexvalue".
void write_trace(std::ostream& os, const OpTrace& trace);
OpTrace read_trace(std::istream& is);
void save_trace(const std::string& path, const OpTrace& trace);
OpTrace load_trace(const std::string& path);

}  // namespace eadrsim
