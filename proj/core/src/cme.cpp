#include "eadrsim/cme.hpp"

#include <algorithm>
#include <cstring>
#include <iterator>

namespace eadrsim {

Block16 Seed::to_block(unsigned block_index) const {
  // Injective packing of (domain, addr, major, minor, block_index):
  //   bytes 0..7   major (LE)
  //   bytes 8..13  line number addr/64, 48 bits (LE)
  //   byte  14     minor (7 bits)
  //   byte  15     domain_tag << 2 | block_index
  if (!is_line_aligned(addr)) throw SimError("seed address not line-aligned");
  const std::uint64_t line_no = addr / kLineBytes;
  if (line_no >> 48) throw SimError("seed address beyond the 2^48-line window");
  if (minor >> 7) throw SimError("seed minor counter beyond 7 bits");
  if (block_index >= 4) throw SimError("seed block index beyond 2 bits");

  Block16 b{};
  for (int i = 0; i < 8; i++) b[i] = static_cast<std::uint8_t>(major >> (8 * i));
  for (int i = 0; i < 6; i++) b[8 + i] = static_cast<std::uint8_t>(line_no >> (8 * i));
  b[14] = minor;
  b[15] = static_cast<std::uint8_t>((static_cast<unsigned>(domain) << 2) | block_index);
  return b;
}

DataLine OtpGen::generate_nolog(const Seed& seed) const {
  DataLine pad;
  for (unsigned i = 0; i < 4; i++) {
    const Block16 blk = seed.to_block(i);
    std::memcpy(pad.bytes.data() + 16 * i, blk.data(), 16);
  }
  cipher_.encrypt_blocks(pad.bytes.data(), 4);
  return pad;
}

DataLine OtpGen::generate(const Seed& seed, PadPurpose purpose, std::uint64_t step,
                          std::uint64_t plaintext_fp) {
  log_.push_back(SeedLogEntry{seed.to_block(0), purpose, plaintext_fp, step});
  pads_generated_++;
  return generate_nolog(seed);
}

DataLine CounterBlock::pack() const {
  DataLine l;
  l.set_u64(0, major);
  // 64 seven-bit minors as a little-endian bitstream over bytes 8..63.
  for (unsigned i = 0; i < kRegionLines; i++) {
    const unsigned bit = 7 * i;
    const std::uint16_t v = static_cast<std::uint16_t>(minors[i] & 0x7f)
                            << (bit % 8);
    l.bytes[8 + bit / 8] |= static_cast<std::uint8_t>(v);
    if (bit % 8 > 1) l.bytes[8 + bit / 8 + 1] |= static_cast<std::uint8_t>(v >> 8);
  }
  return l;
}

CounterBlock CounterBlock::unpack(const DataLine& l) {
  CounterBlock b;
  b.major = l.get_u64(0);
  for (unsigned i = 0; i < kRegionLines; i++) {
    const unsigned bit = 7 * i;
    std::uint16_t v = l.bytes[8 + bit / 8];
    if (bit / 8 + 1 < 56) v |= static_cast<std::uint16_t>(l.bytes[8 + bit / 8 + 1]) << 8;
    b.minors[i] = static_cast<std::uint8_t>((v >> (bit % 8)) & 0x7f);
  }
  return b;
}

BumpResult bump_minor(CounterBlock& blk, unsigned line_idx) {
  if (blk.minors[line_idx] < 127) {
    blk.minors[line_idx]++;
    return BumpResult{false, blk.major, blk.minors[line_idx]};
  }
  blk.major++;
  blk.minors.fill(0);
  return BumpResult{true, blk.major, 0};
}

CounterBlock& CounterCache::lookup(PhysAddr user_addr, NvmStore& nvm, bool& missed) {
  const PhysAddr region = region_base(user_addr);
  if (auto it = map_.find(region); it != map_.end()) {
    missed = false;
    lru_.splice(lru_.end(), lru_, it->second.lru_it);  // move to MRU
    return it->second.block;
  }
  missed = true;
  if (map_.size() >= capacity_entries_) {
    const PhysAddr victim = lru_.front();
    lru_.pop_front();
    auto vit = map_.find(victim);
    if (vit->second.dirty)
      nvm.write(nvm.layout().ctr_addr(victim), vit->second.block.pack(),
                BusClass::kSecurityMetadata, false);
    map_.erase(vit);
  }
  const NvmLine stored = nvm.read(nvm.layout().ctr_addr(region),
                                  BusClass::kSecurityMetadata);
  lru_.push_back(region);
  Entry e;
  e.block = CounterBlock::unpack(stored.data);
  e.dirty = false;
  e.lru_it = std::prev(lru_.end());
  return map_.emplace(region, std::move(e)).first->second.block;
}

void CounterCache::mark_dirty(PhysAddr user_addr) {
  auto it = map_.find(region_base(user_addr));
  if (it == map_.end())
    throw SimError("mark_dirty on a counter block that is not resident");
  it->second.dirty = true;
}

std::uint64_t CounterCache::flush_dirty(NvmStore& nvm) {
  std::vector<PhysAddr> regions;
  for (const auto& [r, e] : map_)
    if (e.dirty) regions.push_back(r);
  std::sort(regions.begin(), regions.end());
  for (auto r : regions) {
    Entry& e = map_.at(r);
    nvm.write(nvm.layout().ctr_addr(r), e.block.pack(), BusClass::kSecurityMetadata,
              false);
    e.dirty = false;
  }
  return regions.size() * kLineBytes;
}

void CounterCache::clear() {
  map_.clear();
  lru_.clear();
}

std::uint64_t CounterCache::dirty_entries() const {
  std::uint64_t n = 0;
  for (const auto& [_, e] : map_) n += e.dirty ? 1 : 0;
  return n;
}

}  // namespace eadrsim
