#pragma once

// Sparse NVM model. Every read/write that crosses the persistence boundary
// appends a BusEvent to the adversary trace; peek()/poke-free inspection is
// reserved for audits and never emits events.
//
// Address map:
//   [0, user_size)                         user data
//   [seed_base,   seed_base + S*64)        reserved seed addresses (no storage)
//   [ctr_base,    ctr_base + regions*64)   counter blocks
//   [shadow_base, shadow_base + S*64)      shadow data, one line per slot
//   [smeta_base,  smeta_base + S*64)       shadow metadata (orig tag + epoch)
// where S = total cache slots. The seed window exists so battery-backed pads
// can be keyed to addresses that can never alias user data; storing there is
// an error by construction.

#include <cstdint>
#include <optional>
#include <unordered_map>

#include "eadrsim/types.hpp"

namespace eadrsim {

struct NvmLayout {
  std::uint64_t user_size = 0;
  std::uint64_t seed_base = 0;
  std::uint64_t ctr_base = 0;
  std::uint64_t shadow_base = 0;
  std::uint64_t smeta_base = 0;
  std::uint64_t end = 0;

  static NvmLayout make(std::uint64_t user_bytes, std::uint64_t cache_slots);

  bool in_user(PhysAddr a) const { return a < user_size; }
  bool in_seed_window(PhysAddr a) const { return a >= seed_base && a < ctr_base; }

  PhysAddr seed_addr(std::uint64_t slot) const { return seed_base + slot * kLineBytes; }
  PhysAddr ctr_addr(PhysAddr user_addr) const {
    return ctr_base + (user_addr / kRegionBytes) * kLineBytes;
  }
  PhysAddr shadow_addr(std::uint64_t slot) const { return shadow_base + slot * kLineBytes; }
  PhysAddr smeta_addr(std::uint64_t slot) const { return smeta_base + slot * kLineBytes; }
};

struct NvmLine {
  DataLine data{};
  // Simulator bookkeeping (not adversary-visible): true iff the stored bytes
  // are ciphertext under the line's current counter. Plaintext crash flushes
  // and never-written lines leave it false.
  bool encrypted = false;
};

class NvmStore {
 public:
  explicit NvmStore(const NvmLayout& layout) : layout_(layout) {}

  const NvmLayout& layout() const { return layout_; }

  // Bus-visible accesses. Absent lines read as all-zero plaintext.
  void write(PhysAddr addr, const DataLine& data, BusClass cls, bool encrypted);
  NvmLine read(PhysAddr addr, BusClass cls);

  // Audit-only inspection: no bus event, no mutation.
  NvmLine peek(PhysAddr addr) const;
  bool contains(PhysAddr addr) const;

  void set_step(std::uint64_t step) { step_ = step; }
  std::uint64_t step() const { return step_; }

  AdversaryTrace& trace() { return trace_; }
  const AdversaryTrace& trace() const { return trace_; }

  // Order-independent fingerprint of full NVM content (addr, bytes, flag
  // excluded: the flag is bookkeeping, not stored bits).
  std::uint64_t content_hash() const;
  void snapshot() { trace_.nvm_snapshots[step_] = content_hash(); }

  std::uint64_t lines_stored() const { return lines_.size(); }

 private:
  void check_addr(PhysAddr addr) const;

  NvmLayout layout_;
  std::unordered_map<PhysAddr, NvmLine> lines_;
  AdversaryTrace trace_;
  std::uint64_t step_ = 0;
};

}  // namespace eadrsim
