#pragma once

// The scheme engine: one simulator class executing host reads/writes against
// the exclusive cache hierarchy + NVM under one of five protection schemes,
// with crash injection and recovery.
//
//   Baseline   plaintext everywhere; crash flush writes plaintext.
//   MC-CME     memory-controller counter-mode encryption: plaintext in cache,
//              encrypt on eviction. The crash flush can encrypt only under
//              the all-operation eADR model; under weaker models it pushes
//              plaintext across the bus (the leak the audits expose).
//   EadrCME    ciphertext in cache: pads regenerated and XORed at the core on
//              every access, so the flush writes ciphertext under any model.
//   BBE        plaintext in cache + a battery-backed engine that encrypts the
//              crash flush into a shadow region with pads keyed by an
//              incrementing-counter register (one fresh value per slot).
//              Needs compute during the flush: incompatible with write-only.
//   Sepencr    cache lines stored XORed with pre-generated per-slot pads
//              (upper half of each set's ways is reserved for the pad store).
//              The crash flush copies slot bytes verbatim -- already
//              ciphertext -- so even write-only eADR is safe; a crash-count
//              register rekeys the pad table on every recovery.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "eadrsim/block_cipher.hpp"
#include "eadrsim/cache.hpp"
#include "eadrsim/cme.hpp"
#include "eadrsim/geometry.hpp"
#include "eadrsim/metrics.hpp"
#include "eadrsim/nvm.hpp"
#include "eadrsim/types.hpp"
#include "eadrsim/workloads.hpp"

namespace eadrsim {

struct SimParams {
  SchemeId scheme = SchemeId::kBaseline;
  CacheGeometry geometry = CacheGeometry::default_geometry();
  std::uint64_t nvm_user_bytes = 16ull << 30;
  std::uint64_t counter_cache_bytes = 512ull << 10;
  AesKey key{};
  LatencyTable lat{};
  EnergyTable energy{};
};

// Everything the crash flush decided and did, for audits and energy checks.
struct CrashRecord {
  EadrModel model{};
  std::uint64_t at_step = 0;  // ops executed before the crash
  std::vector<std::pair<PhysAddr, DataLine>> dirty;  // pre-crash plaintext
  std::vector<std::uint64_t> dirty_bytes_by_level;
  std::uint64_t mc_flush_bytes = 0;
  std::uint64_t engine_bytes = 0;
  double energy_mj = 0.0;
};

class Simulator {
 public:
  explicit Simulator(const SimParams& p);

  // Host ops (full-line). step advances automatically; one op = one step.
  DataLine host_read(std::uint32_t core, PhysAddr addr);
  void host_write(std::uint32_t core, PhysAddr addr, const DataLine& v);
  DataLine apply(const Op& op) {
    return op.is_write ? (host_write(op.core, op.addr, op.value), op.value)
                       : host_read(op.core, op.addr);
  }

  // Power loss after the ops executed so far. Flushes what the eADR model
  // allows, snapshots NVM, freezes host ops until recover().
  CrashRecord crash(EadrModel model);
  void recover();
  bool crashed() const { return crashed_; }

  // ---- audit/debug hooks: no bus events, no cycles, no log entries ----
  DataLine peek_plaintext(PhysAddr addr) const;
  std::vector<std::pair<PhysAddr, DataLine>> resident_lines() const;
  void dump_snapshot(std::ostream& os) const;

  const SimParams& params() const { return p_; }
  const RunStats& stats() const { return stats_; }
  RunStats& stats() { return stats_; }
  const AdversaryTrace& trace() const { return nvm_.trace(); }
  const SeedLog& seed_log() const { return otp_.log(); }
  CacheHierarchy& cache() { return cache_; }
  const CacheHierarchy& cache() const { return cache_; }
  NvmStore& nvm() { return nvm_; }
  const NvmStore& nvm() const { return nvm_; }
  std::uint64_t step() const { return step_; }
  std::uint64_t incr_counter() const { return incr_counter_; }
  std::uint64_t crash_count() const { return crash_count_; }
  std::uint64_t crash_epoch() const { return crash_epoch_; }

 private:
  // -- access flow --
  std::uint64_t promote_to_l1(CacheHierarchy::Hit hit, std::uint32_t core,
                              AccessEvent& ev);
  std::uint64_t allocate_slot(std::size_t level, std::uint32_t partition,
                              PhysAddr addr, AccessEvent* ev);
  void writeback_nvm(PhysAddr addr, const DataLine& slot_bytes,
                     std::uint64_t src_slot, AccessEvent* ev);
  void mc_encrypt_store(PhysAddr addr, const DataLine& plain, AccessEvent* ev);
  DataLine read_slot_value(std::uint64_t slot_id, AccessEvent& ev);
  DataLine fill_and_read(std::uint32_t core, PhysAddr addr, AccessEvent& ev);
  void encode_store(std::uint64_t slot_id, PhysAddr addr, const DataLine& v,
                    AccessEvent& ev);

  // -- counter-mode helpers --
  Seed line_seed(PhysAddr addr, const CounterBlock& blk) const {
    return Seed{SeedDomain::kLineCounter, addr, blk.major,
                blk.minors[(addr / kLineBytes) % kRegionLines]};
  }
  CounterBlock& counters_for(PhysAddr addr, AccessEvent* ev);
  CounterBlock peek_counters(PhysAddr addr) const;
  // Minor overflow: re-key every encrypted copy in the 4 KiB region from the
  // pre-overflow counters to (major+1, minor 0).
  void reencrypt_region(PhysAddr any_addr_in_region, const CounterBlock& old_blk,
                        const CounterBlock& new_blk, AccessEvent* ev);

  // -- Sepencr pad table --
  bool is_user_slot(std::uint64_t slot_id) const;
  void regenerate_cotp();

  DataLine slot_plaintext_nolog(std::uint64_t slot_id) const;
  void require_user_line(PhysAddr addr) const;

  SimParams p_;
  CacheHierarchy cache_;
  NvmStore nvm_;
  OtpGen otp_;
  CounterCache cc_;
  WriteQueue wq_;
  std::vector<DataLine> cotp_;   // per-slot pre-generated pads (Sepencr)
  std::uint64_t incr_counter_ = 1;  // BBE: one fresh value per slot per flush
  std::uint64_t crash_count_ = 1;   // Sepencr: pad-table generation number
  std::uint64_t crash_epoch_ = 0;   // shadow-entry validity tag
  std::uint64_t step_ = 0;
  bool crashed_ = false;
  RunStats stats_;
};

}  // namespace eadrsim
