#include "eadrsim/nvm.hpp"

#include <algorithm>
#include <vector>

namespace eadrsim {

NvmLayout NvmLayout::make(std::uint64_t user_bytes, std::uint64_t cache_slots) {
  if (user_bytes == 0 || user_bytes % kRegionBytes != 0)
    throw ConfigError("NVM user size must be a nonzero multiple of " +
                      std::to_string(kRegionBytes));
  NvmLayout lo;
  lo.user_size = user_bytes;
  lo.seed_base = user_bytes;
  lo.ctr_base = lo.seed_base + cache_slots * kLineBytes;
  const std::uint64_t regions = user_bytes / kRegionBytes;
  lo.shadow_base = lo.ctr_base + regions * kLineBytes;
  lo.smeta_base = lo.shadow_base + cache_slots * kLineBytes;
  lo.end = lo.smeta_base + cache_slots * kLineBytes;
  // Seed packing carries the line number in 48 bits.
  if ((lo.end / kLineBytes) >> 48)
    throw ConfigError("NVM layout exceeds the 2^48-line seed address window");
  return lo;
}

void NvmStore::check_addr(PhysAddr addr) const {
  if (!is_line_aligned(addr))
    throw SimError("NVM access not line-aligned: " + std::to_string(addr));
  if (addr >= layout_.end)
    throw SimError("NVM access beyond device end: " + std::to_string(addr));
  if (layout_.in_seed_window(addr))
    throw SimError("NVM access inside the reserved seed window: " +
                   std::to_string(addr));
}

void NvmStore::write(PhysAddr addr, const DataLine& data, BusClass cls,
                     bool encrypted) {
  check_addr(addr);
  lines_[addr] = NvmLine{data, encrypted};
  trace_.events.push_back(BusEvent{BusDir::kToNvm, addr, data, step_, cls});
}

NvmLine NvmStore::read(PhysAddr addr, BusClass cls) {
  check_addr(addr);
  NvmLine l;
  if (auto it = lines_.find(addr); it != lines_.end()) l = it->second;
  trace_.events.push_back(BusEvent{BusDir::kFromNvm, addr, l.data, step_, cls});
  return l;
}

NvmLine NvmStore::peek(PhysAddr addr) const {
  auto it = lines_.find(line_base(addr));
  return it == lines_.end() ? NvmLine{} : it->second;
}

bool NvmStore::contains(PhysAddr addr) const {
  return lines_.count(line_base(addr)) != 0;
}

std::uint64_t NvmStore::content_hash() const {
  std::vector<PhysAddr> addrs;
  addrs.reserve(lines_.size());
  for (const auto& [a, _] : lines_) addrs.push_back(a);
  std::sort(addrs.begin(), addrs.end());
  std::uint64_t h = kFnvOffset;
  for (auto a : addrs) {
    h = fnv1a64_u64(a, h);
    h = fnv1a64(lines_.at(a).data, h);
  }
  return h;
}

}  // namespace eadrsim
