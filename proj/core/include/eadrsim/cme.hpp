#pragma once

// Counter-mode encryption machinery: pad seeds, the one-time-pad generator
// with its append-only seed log, split-counter blocks, and the counter
// metadata cache.
//
// A pad covers one 64-byte line and is the concatenation of four AES-128
// encryptions of seed blocks that differ only in block_index. Seed blocks
// pack (domain, address, major, minor, block_index) injectively into 16
// bytes; the address contributes its line number as a 48-bit field, so the
// modeled physical window is 2^48 lines — far beyond any configuration here.

#include <cstdint>
#include <list>
#include <optional>
#include <unordered_map>
#include <vector>

#include "eadrsim/block_cipher.hpp"
#include "eadrsim/nvm.hpp"
#include "eadrsim/types.hpp"

namespace eadrsim {

enum class SeedDomain : std::uint8_t {
  kLineCounter = 0,  // per-line split counters (CME family, Sepencr MC path)
  kBbeSlot = 1,      // battery-backed engine per-slot pads
  kCotp = 2,         // pre-generated cache one-time pads
};

enum class PadPurpose : std::uint8_t { kEncrypt, kDecrypt };

struct Seed {
  SeedDomain domain;
  PhysAddr addr;        // line-aligned
  std::uint64_t major;
  std::uint8_t minor;   // 7-bit

  // 16-byte block for AES input; block_index in [0,4) selects the pad quarter.
  Block16 to_block(unsigned block_index) const;
};

struct SeedLogEntry {
  Block16 seed;               // block_index=0 identity of the pad
  PadPurpose purpose;
  std::uint64_t plaintext_fp; // fingerprint of the line the pad covered
  std::uint64_t step;
};

using SeedLog = std::vector<SeedLogEntry>;

class OtpGen {
 public:
  explicit OtpGen(const AesKey& key) : cipher_(key) {}

  // Generates the 64-byte pad and appends to the seed log.
  DataLine generate(const Seed& seed, PadPurpose purpose, std::uint64_t step,
                    std::uint64_t plaintext_fp);

  // Audit/debug path: same pad, no log entry.
  DataLine generate_nolog(const Seed& seed) const;

  const SeedLog& log() const { return log_; }
  SeedLog& log() { return log_; }
  const Aes128& cipher() const { return cipher_; }

  std::uint64_t pads_generated() const { return pads_generated_; }

 private:
  Aes128 cipher_;
  SeedLog log_;
  std::uint64_t pads_generated_ = 0;
};

// Split counter for one 4 KiB region: shared 64-bit major, 64 7-bit minors.
// Serializes to exactly one 64-byte line (8-byte major + 448 packed bits).
struct CounterBlock {
  std::uint64_t major = 0;
  std::array<std::uint8_t, kRegionLines> minors{};

  DataLine pack() const;
  static CounterBlock unpack(const DataLine& line);

  // 71-bit concatenated counter value for monotonicity checks.
  unsigned __int128 concat(unsigned line_idx) const {
    return (static_cast<unsigned __int128>(major) << 7) | minors[line_idx];
  }
};

struct BumpResult {
  bool overflowed;       // true: caller must re-encrypt the region, then bump again
  std::uint64_t major;
  std::uint8_t minor;
};

// Advance the minor for line_idx. On overflow (minor was 127) the major
// increments and all minors reset; the triggering write must re-encrypt the
// region under (major, 0) and then bump again so its own data gets (major, 1)
// rather than colliding with the re-encrypted stale line.
BumpResult bump_minor(CounterBlock& blk, unsigned line_idx);

// Write-back LRU cache over the NVM-resident counter blocks, keyed by user
// region base. Fills and dirty evictions move security metadata across the
// bus; eviction of dirty state is what makes counters crash-consistent for
// schemes that bump on eviction.
class CounterCache {
 public:
  explicit CounterCache(std::uint64_t capacity_bytes)
      : capacity_entries_(capacity_bytes / kLineBytes) {}

  // missed is set when the block had to be fetched from NVM.
  CounterBlock& lookup(PhysAddr user_addr, NvmStore& nvm, bool& missed);
  void mark_dirty(PhysAddr user_addr);

  // Audit path: resident block or null, no fill, no LRU movement.
  const CounterBlock* peek(PhysAddr user_addr) const {
    auto it = map_.find(region_base(user_addr));
    return it == map_.end() ? nullptr : &it->second.block;
  }

  // Crash path: persist every dirty block (ascending region order).
  // Returns bytes written.
  std::uint64_t flush_dirty(NvmStore& nvm);

  // Recovery path: volatile contents are gone.
  void clear();

  std::uint64_t entries() const { return map_.size(); }
  std::uint64_t capacity_entries() const { return capacity_entries_; }
  std::uint64_t dirty_entries() const;

 private:
  struct Entry {
    CounterBlock block;
    bool dirty = false;
    std::list<PhysAddr>::iterator lru_it;
  };

  std::uint64_t capacity_entries_;
  std::list<PhysAddr> lru_;  // front = LRU, back = MRU
  std::unordered_map<PhysAddr, Entry> map_;
};

}  // namespace eadrsim
