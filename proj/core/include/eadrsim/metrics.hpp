#pragma once

// Cycle, energy, and recovery-time accounting.
//
// Cycle model: flat per-level probe costs; misses pay the NVM read, with
// memory-side decryption overlapped (max of fetch and pad generation) for
// schemes that decrypt at the controller; counter-block fetches on the fill
// or encrypt path add serialized NVM reads; per-access scheme adders charge
// pad generation + XOR (ciphertext-in-cache) or XOR only (pre-generated
// pads). NVM writes drain through a 64-entry queue with overlapped service —
// an access stalls only when the queue is full.

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "eadrsim/types.hpp"

namespace eadrsim {

struct LatencyTable {
  std::uint32_t l1_hit_cycles = 4;
  std::uint32_t l2_hit_cycles = 12;
  std::uint32_t l3_hit_cycles = 36;
  double nvm_read_ns = 63.0;    // row activate + column read
  double nvm_write_ns = 313.0;  // write service (command to durable)
  std::uint32_t otp_gen_cycles = 80;
  std::uint32_t xor_cycles = 1;
  double cpu_ghz = 2.0;
  std::uint32_t write_queue_entries = 64;

  std::uint64_t nvm_read_cycles() const {
    return static_cast<std::uint64_t>(nvm_read_ns * cpu_ghz + 0.5);
  }
  std::uint64_t nvm_write_cycles() const {
    return static_cast<std::uint64_t>(nvm_write_ns * cpu_ghz + 0.5);
  }
  std::uint64_t probe_cycles(std::size_t depth) const;  // levels probed: 1..3+
};

struct EnergyTable {
  // Crash-flush energy per byte by source (nJ/B).
  double flush_l1_nj = 11.839;
  double flush_l2_nj = 11.228;
  double flush_l3_nj = 11.228;
  double flush_mc_nj = 11.228;
  // Battery-backed engine work during the flush.
  double xor_fj_per_byte = 800.0;
  double aes_pj_per_byte = 192.0;

  double level_nj(std::size_t level) const {
    if (level == 0) return flush_l1_nj;
    if (level == 1) return flush_l2_nj;
    return flush_l3_nj;
  }
};

// Crash-flush energy in millijoules. dirty_bytes_by_level: bytes leaving
// each cache level; mc_bytes: counter-cache bytes; engine_bytes: bytes the
// battery-backed engine encrypts (AES + XOR) on the way out.
double energy_crash_flush_mj(const std::vector<std::uint64_t>& dirty_bytes_by_level,
                             std::uint64_t mc_bytes, std::uint64_t engine_bytes,
                             const EnergyTable& e);

// Post-crash recovery time in seconds. Battery-backed restoration streams the
// shadow region at 200 ns per line; pre-generated-pad recovery touches half
// the slots. Counter-mode schemes recover on demand (no stop-the-world cost).
double recovery_seconds(SchemeId scheme, std::uint64_t data_cache_bytes,
                        double ns_per_line = 200.0);

// 64-entry write queue with overlapped service: each write completes
// arrival + service; admission stalls only while all entries are in flight.
class WriteQueue {
 public:
  WriteQueue(std::uint32_t entries, std::uint64_t service_cycles)
      : entries_(entries), service_(service_cycles) {}

  // Enqueue at absolute cycle `now`; returns stall cycles (0 if a slot free).
  std::uint64_t push(std::uint64_t now);

  std::size_t in_flight(std::uint64_t now) const;
  std::uint64_t total_stall_cycles() const { return total_stall_; }
  std::uint64_t pushes() const { return pushes_; }

 private:
  std::uint32_t entries_;
  std::uint64_t service_;
  std::deque<std::uint64_t> completions_;  // ascending completion times
  std::uint64_t total_stall_ = 0;
  std::uint64_t pushes_ = 0;
};

struct RunStats {
  std::uint64_t ops = 0;
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t hits_by_level[3] = {0, 0, 0};
  std::uint64_t fills = 0;             // read misses serviced from NVM
  std::uint64_t write_allocs = 0;      // write misses (no fetch)
  std::uint64_t evict_writebacks = 0;  // dirty L3 victims written to NVM
  std::uint64_t counter_fetches = 0;   // counter-cache misses
  std::uint64_t counter_hits = 0;
  std::uint64_t overflow_events = 0;
  std::uint64_t pads_generated = 0;
  std::uint64_t total_cycles = 0;
  std::uint64_t stall_cycles = 0;
  std::uint64_t bus_user_bytes = 0;
  std::uint64_t bus_meta_bytes = 0;
  std::uint64_t crashes = 0;
  double crash_energy_mj = 0.0;
  double recovery_s = 0.0;
};

// One host access, reduced to what the cycle model charges for.
struct AccessEvent {
  bool is_write = false;
  // 0-based level of the hit; >= levels means miss (probed everything).
  std::size_t hit_depth = 0;
  std::size_t n_levels = 3;
  bool fill_from_nvm = false;
  bool fill_decrypt_at_mc = false;  // overlap pad gen with the fetch
  std::uint32_t counter_fetches = 0;
  std::uint32_t scheme_adder_otp = 0;  // pad generations on the access path
  std::uint32_t scheme_adder_xor = 0;
  std::uint32_t nvm_writes = 0;  // writebacks this access pushed to the queue
};

// Charges the event against stats and the write queue; returns the cycles.
std::uint64_t account_access(RunStats& stats, const AccessEvent& ev,
                             const LatencyTable& lat, WriteQueue& wq);

// Headline crash-energy table: closed-form capacity * constant products.
struct EnergyRow {
  std::string system;
  double cache_flush_mj;  // "/" when not applicable => negative
  double mc_flush_mj;
  double module_mj;
  double total_mj;
};
std::vector<EnergyRow> energy_report(std::uint64_t l1_bytes, std::uint64_t l2_bytes,
                                     std::uint64_t l3_bytes, std::uint64_t mc_bytes,
                                     const EnergyTable& e);

struct RecoveryRow {
  std::uint64_t cache_mib;
  double bbe_s;
  double sepencr_s;
};
std::vector<RecoveryRow> recovery_report(const std::vector<std::uint64_t>& cache_mib,
                                         double ns_per_line = 200.0);

std::string format_mj(double mj);  // fixed, 4 decimals
std::string format_seconds(double s);

}  // namespace eadrsim
