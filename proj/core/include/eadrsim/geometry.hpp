#pragma once

// Cache hierarchy geometry and the global slot index space.
//
// Slots are numbered 0..S-1 across all levels: level 0 partitions first
// (partition-major, then set, then way), then level 1, and so on. The global
// slot id is what the battery-backed schemes key their per-slot state on
// (shadow region entries, per-slot pads, incrementing counter values).

#include <cstdint>
#include <vector>

#include "eadrsim/types.hpp"

namespace eadrsim {

struct LevelSpec {
  std::uint64_t capacity_bytes;  // per partition
  std::uint32_t assoc;
  std::uint32_t partitions = 1;  // private caches: one per core

  std::uint64_t lines_per_partition() const { return capacity_bytes / kLineBytes; }
  std::uint64_t sets() const { return lines_per_partition() / assoc; }
  std::uint64_t total_lines() const { return lines_per_partition() * partitions; }
};

struct CacheGeometry {
  std::vector<LevelSpec> levels;  // innermost (L1) first

  // 8-core default: 8 x 128 KiB 2-way L1d, 1 MiB 8-way L2, 2 MiB 8-way L3.
  static CacheGeometry default_geometry();

  void validate() const;  // throws ConfigError on degenerate shapes

  std::uint64_t total_lines() const {
    std::uint64_t n = 0;
    for (const auto& l : levels) n += l.total_lines();
    return n;
  }
  std::uint64_t total_bytes() const { return total_lines() * kLineBytes; }

  // First global slot id of a level.
  std::uint64_t level_base(std::size_t level) const;

  // Global slot id for (level, partition, set, way).
  std::uint64_t slot_id(std::size_t level, std::uint32_t partition,
                        std::uint64_t set, std::uint32_t way) const;

  std::uint64_t set_of(std::size_t level, PhysAddr addr) const {
    return (addr / kLineBytes) % levels[level].sets();
  }
};

}  // namespace eadrsim
