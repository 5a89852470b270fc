#pragma once

// Exclusive multi-level cache: a line lives in exactly one slot across the
// whole hierarchy. Hits below L1 promote to L1; victims demote one level
// down; L3 victims leave the hierarchy (the scheme engine writes dirty ones
// back). Replacement is LRU within a set, preferring invalid ways.
//
// Schemes that reserve capacity (per-slot pad tables) restrict user data to
// the lower half of each set's ways via user_way_shift.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "eadrsim/geometry.hpp"
#include "eadrsim/types.hpp"

namespace eadrsim {

struct CacheSlot {
  PhysAddr tag = 0;  // line base address
  DataLine data{};
  bool valid = false;
  bool dirty = false;
  std::uint64_t lru = 0;
};

class CacheHierarchy {
 public:
  // user_way_shift = 0: all ways usable; 1: lower half only (upper half
  // reserved, never allocated).
  CacheHierarchy(const CacheGeometry& geo, unsigned user_way_shift = 0);

  const CacheGeometry& geometry() const { return geo_; }
  std::uint64_t total_slots() const { return slots_.size(); }
  std::uint32_t user_ways(std::size_t level) const {
    return geo_.levels[level].assoc >> user_way_shift_;
  }

  CacheSlot& slot(std::uint64_t id) { return slots_[id]; }
  const CacheSlot& slot(std::uint64_t id) const { return slots_[id]; }

  // Probe one level. partition is the core id at private levels and must be
  // 0 at shared ones. Returns the global slot id on hit.
  std::optional<std::uint64_t> find(std::size_t level, std::uint32_t partition,
                                    PhysAddr addr) const;

  // Probe every level in order (L1 partition = core). Returns (level, slot).
  struct Hit {
    std::size_t level;
    std::uint64_t slot;
  };
  std::optional<Hit> find_any(std::uint32_t core, PhysAddr addr) const;

  // Probe every partition of every level (maintenance paths, audits).
  std::optional<Hit> find_global(PhysAddr addr) const;

  // Slot id that an install into (level, partition) for addr will use,
  // choosing an invalid way if present, else the LRU user way.
  std::uint64_t pick_victim(std::size_t level, std::uint32_t partition,
                            PhysAddr addr) const;

  void touch(std::uint64_t slot_id) { slots_[slot_id].lru = ++tick_; }

  // Remove a line from its slot and return the contents.
  CacheSlot extract(std::uint64_t slot_id);

  void install(std::uint64_t slot_id, PhysAddr tag, const DataLine& data, bool dirty);

  void invalidate_all();

  std::size_t level_of_slot(std::uint64_t slot_id) const;
  std::uint32_t partition_of_slot(std::uint64_t slot_id) const;
  // False for slots in reserved (non-user) ways.
  bool is_user_way(std::uint64_t slot_id) const;

  // Dirty-line census for crash flushes: bytes per level.
  std::vector<std::uint64_t> dirty_bytes_by_level() const;
  std::uint64_t valid_count() const;
  std::uint64_t dirty_count() const;

 private:
  CacheGeometry geo_;
  unsigned user_way_shift_;
  std::vector<CacheSlot> slots_;
  std::vector<std::uint64_t> level_base_;
  std::uint64_t tick_ = 0;
};

}  // namespace eadrsim
