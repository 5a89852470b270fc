#include "eadrsim/geometry.hpp"

#include <string>

namespace eadrsim {

CacheGeometry CacheGeometry::default_geometry() {
  CacheGeometry g;
  g.levels = {
      {128ull << 10, 2, 8},  // 8 private 128 KiB 2-way L1d
      {1ull << 20, 8, 1},    // 1 MiB 8-way L2
      {2ull << 20, 8, 1},    // 2 MiB 8-way L3
  };
  return g;
}

void CacheGeometry::validate() const {
  if (levels.empty()) throw ConfigError("cache geometry needs at least one level");
  for (std::size_t i = 0; i < levels.size(); i++) {
    const auto& l = levels[i];
    const std::string where = "cache level " + std::to_string(i + 1);
    if (l.partitions == 0) throw ConfigError(where + ": zero partitions");
    if (i > 0 && l.partitions != 1)
      throw ConfigError(where + ": only the innermost level may be partitioned");
    if (l.assoc == 0) throw ConfigError(where + ": zero associativity");
    if (l.capacity_bytes == 0 || l.capacity_bytes % (kLineBytes * l.assoc) != 0)
      throw ConfigError(where + ": capacity must be a multiple of assoc*" +
                        std::to_string(kLineBytes));
    if ((l.sets() & (l.sets() - 1)) != 0)
      throw ConfigError(where + ": set count must be a power of two");
  }
}

std::uint64_t CacheGeometry::level_base(std::size_t level) const {
  std::uint64_t base = 0;
  for (std::size_t i = 0; i < level; i++) base += levels[i].total_lines();
  return base;
}

std::uint64_t CacheGeometry::slot_id(std::size_t level, std::uint32_t partition,
                                     std::uint64_t set, std::uint32_t way) const {
  const auto& l = levels[level];
  return level_base(level) + partition * l.lines_per_partition() +
         set * l.assoc + way;
}

}  // namespace eadrsim
