#include "eadrsim/cache.hpp"

#include <string>

namespace eadrsim {

CacheHierarchy::CacheHierarchy(const CacheGeometry& geo, unsigned user_way_shift)
    : geo_(geo), user_way_shift_(user_way_shift) {
  geo_.validate();
  for (std::size_t i = 0; i < geo_.levels.size(); i++) {
    if (user_ways(i) == 0)
      throw ConfigError("cache level " + std::to_string(i + 1) +
                        ": reserving half the ways leaves none for data");
    level_base_.push_back(geo_.level_base(i));
  }
  slots_.resize(geo_.total_lines());
}

std::optional<std::uint64_t> CacheHierarchy::find(std::size_t level,
                                                  std::uint32_t partition,
                                                  PhysAddr addr) const {
  const std::uint64_t set = geo_.set_of(level, addr);
  for (std::uint32_t w = 0; w < user_ways(level); w++) {
    const std::uint64_t id = geo_.slot_id(level, partition, set, w);
    if (slots_[id].valid && slots_[id].tag == addr) return id;
  }
  return std::nullopt;
}

std::optional<CacheHierarchy::Hit> CacheHierarchy::find_any(std::uint32_t core,
                                                            PhysAddr addr) const {
  for (std::size_t level = 0; level < geo_.levels.size(); level++) {
    const std::uint32_t part = level == 0 ? core : 0;
    if (auto id = find(level, part, addr)) return Hit{level, *id};
  }
  return std::nullopt;
}

std::optional<CacheHierarchy::Hit> CacheHierarchy::find_global(PhysAddr addr) const {
  for (std::size_t level = 0; level < geo_.levels.size(); level++)
    for (std::uint32_t p = 0; p < geo_.levels[level].partitions; p++)
      if (auto id = find(level, p, addr)) return Hit{level, *id};
  return std::nullopt;
}

std::uint64_t CacheHierarchy::pick_victim(std::size_t level, std::uint32_t partition,
                                          PhysAddr addr) const {
  const std::uint64_t set = geo_.set_of(level, addr);
  std::uint64_t best = 0;
  std::uint64_t best_lru = ~0ull;
  for (std::uint32_t w = 0; w < user_ways(level); w++) {
    const std::uint64_t id = geo_.slot_id(level, partition, set, w);
    if (!slots_[id].valid) return id;
    if (slots_[id].lru < best_lru) {
      best_lru = slots_[id].lru;
      best = id;
    }
  }
  return best;
}

CacheSlot CacheHierarchy::extract(std::uint64_t slot_id) {
  CacheSlot out = slots_[slot_id];
  slots_[slot_id] = CacheSlot{};
  return out;
}

void CacheHierarchy::install(std::uint64_t slot_id, PhysAddr tag,
                             const DataLine& data, bool dirty) {
  CacheSlot& s = slots_[slot_id];
  s.tag = tag;
  s.data = data;
  s.valid = true;
  s.dirty = dirty;
  s.lru = ++tick_;
}

void CacheHierarchy::invalidate_all() {
  for (auto& s : slots_) s = CacheSlot{};
}

std::size_t CacheHierarchy::level_of_slot(std::uint64_t slot_id) const {
  std::size_t level = 0;
  while (level + 1 < level_base_.size() && slot_id >= level_base_[level + 1]) level++;
  return level;
}

std::uint32_t CacheHierarchy::partition_of_slot(std::uint64_t slot_id) const {
  const std::size_t level = level_of_slot(slot_id);
  return static_cast<std::uint32_t>((slot_id - level_base_[level]) /
                                    geo_.levels[level].lines_per_partition());
}

bool CacheHierarchy::is_user_way(std::uint64_t slot_id) const {
  const std::size_t level = level_of_slot(slot_id);
  const std::uint32_t way = static_cast<std::uint32_t>(
      (slot_id - level_base_[level]) % geo_.levels[level].assoc);
  return way < user_ways(level);
}

std::vector<std::uint64_t> CacheHierarchy::dirty_bytes_by_level() const {
  std::vector<std::uint64_t> out(geo_.levels.size(), 0);
  for (std::uint64_t id = 0; id < slots_.size(); id++)
    if (slots_[id].valid && slots_[id].dirty)
      out[level_of_slot(id)] += kLineBytes;
  return out;
}

std::uint64_t CacheHierarchy::valid_count() const {
  std::uint64_t n = 0;
  for (const auto& s : slots_) n += s.valid ? 1 : 0;
  return n;
}

std::uint64_t CacheHierarchy::dirty_count() const {
  std::uint64_t n = 0;
  for (const auto& s : slots_) n += (s.valid && s.dirty) ? 1 : 0;
  return n;
}

}  // namespace eadrsim
