#include "eadrsim/scheme.hpp"

#include <algorithm>
#include <ostream>
#include <tuple>

namespace eadrsim {

namespace {
inline void note_write(AccessEvent* ev) {
  if (ev) ev->nvm_writes++;
}
inline unsigned line_idx(PhysAddr addr) {
  return static_cast<unsigned>((addr / kLineBytes) % kRegionLines);
}
}  // namespace

Simulator::Simulator(const SimParams& p)
    : p_(p),
      cache_(p.geometry, p.scheme == SchemeId::kSepencr ? 1 : 0),
      nvm_(NvmLayout::make(p.nvm_user_bytes, cache_.total_slots())),
      otp_(p.key),
      cc_(p.counter_cache_bytes),
      wq_(p.lat.write_queue_entries, p.lat.nvm_write_cycles()) {
  if (p_.scheme != SchemeId::kBaseline && cc_.capacity_entries() == 0)
    throw ConfigError("counter cache must hold at least one block");
  if (p_.scheme == SchemeId::kSepencr) {
    cotp_.resize(cache_.total_slots());
    regenerate_cotp();
  }
}

bool Simulator::is_user_slot(std::uint64_t slot_id) const {
  return cache_.is_user_way(slot_id);
}

void Simulator::regenerate_cotp() {
  // One pad per user slot, keyed to the slot's reserved seed address and the
  // current crash count. A pad's seed repeats only if the crash count did.
  for (std::uint64_t n = 0; n < cache_.total_slots(); n++) {
    if (!is_user_slot(n)) continue;
    cotp_[n] = otp_.generate(
        Seed{SeedDomain::kCotp, nvm_.layout().seed_addr(n), crash_count_, 0},
        PadPurpose::kEncrypt, step_, 0);
  }
}

void Simulator::require_user_line(PhysAddr addr) const {
  if (crashed_) throw SimError("host access while powered down");
  if (!is_line_aligned(addr))
    throw SimError("host access not line-aligned: " + std::to_string(addr));
  if (addr >= nvm_.layout().user_size)
    throw SimError("host access beyond user space: " + std::to_string(addr));
}

CounterBlock& Simulator::counters_for(PhysAddr addr, AccessEvent* ev) {
  bool missed = false;
  CounterBlock& blk = cc_.lookup(addr, nvm_, missed);
  if (missed) {
    stats_.counter_fetches++;
    if (ev) ev->counter_fetches++;
  } else {
    stats_.counter_hits++;
  }
  return blk;
}

CounterBlock Simulator::peek_counters(PhysAddr addr) const {
  if (const CounterBlock* b = cc_.peek(addr)) return *b;
  return CounterBlock::unpack(nvm_.peek(nvm_.layout().ctr_addr(addr)).data);
}

void Simulator::reencrypt_region(PhysAddr any_addr, const CounterBlock& old_blk,
                                 const CounterBlock& new_blk, AccessEvent* ev) {
  const PhysAddr r0 = region_base(any_addr);
  for (unsigned i = 0; i < kRegionLines; i++) {
    const PhysAddr la = r0 + i * kLineBytes;
    const Seed old_seed{SeedDomain::kLineCounter, la, old_blk.major,
                        old_blk.minors[i]};
    const Seed new_seed{SeedDomain::kLineCounter, la, new_blk.major, 0};

    if (p_.scheme == SchemeId::kEadrCme) {
      if (auto hit = cache_.find_global(la)) {
        // The resident copy is ciphertext under the old counters; re-key it.
        CacheSlot& s = cache_.slot(hit->slot);
        const DataLine plain =
            s.data ^ otp_.generate(old_seed, PadPurpose::kDecrypt, step_, 0);
        s.data = plain ^ otp_.generate(new_seed, PadPurpose::kEncrypt, step_,
                                       fnv1a64(plain));
        if (!s.dirty) {
          // Clean: NVM holds the same ciphertext; rewrite it with the one
          // fresh pad. (A dirty line's stale NVM copy stays under the dead
          // counters -- it is overwritten at eviction or crash, never read,
          // and re-padding it would reuse the new seed on different data.)
          nvm_.write(la, s.data, BusClass::kUserData, true);
          note_write(ev);
        }
        continue;
      }
    }
    const NvmLine nl = nvm_.peek(la);
    if (!nvm_.contains(la) || !nl.encrypted)
      continue;  // nothing keyed to the old counters
    nvm_.read(la, BusClass::kUserData);
    const DataLine plain =
        nl.data ^ otp_.generate(old_seed, PadPurpose::kDecrypt, step_, 0);
    nvm_.write(la,
               plain ^ otp_.generate(new_seed, PadPurpose::kEncrypt, step_,
                                     fnv1a64(plain)),
               BusClass::kUserData, true);
    note_write(ev);
  }
}

void Simulator::mc_encrypt_store(PhysAddr addr, const DataLine& plain,
                                 AccessEvent* ev) {
  CounterBlock& blk = counters_for(addr, nullptr);  // write path: not serialized
  const CounterBlock before = blk;
  BumpResult r = bump_minor(blk, line_idx(addr));
  if (r.overflowed) {
    stats_.overflow_events++;
    reencrypt_region(addr, before, blk, ev);
    r = bump_minor(blk, line_idx(addr));  // 0 -> 1: distinct from re-keyed lines
  }
  cc_.mark_dirty(addr);
  const DataLine pad = otp_.generate(line_seed(addr, blk), PadPurpose::kEncrypt,
                                     step_, fnv1a64(plain));
  nvm_.write(addr, plain ^ pad, BusClass::kUserData, true);
  note_write(ev);
}

void Simulator::writeback_nvm(PhysAddr addr, const DataLine& slot_bytes,
                              std::uint64_t src_slot, AccessEvent* ev) {
  switch (p_.scheme) {
    case SchemeId::kBaseline:
      nvm_.write(addr, slot_bytes, BusClass::kUserData, false);
      note_write(ev);
      break;
    case SchemeId::kEadrCme:
      // Already ciphertext under the line's current counter.
      nvm_.write(addr, slot_bytes, BusClass::kUserData, true);
      note_write(ev);
      break;
    case SchemeId::kMcCme:
    case SchemeId::kBbe:
      mc_encrypt_store(addr, slot_bytes, ev);
      break;
    case SchemeId::kSepencr:
      // Strip the slot pad, then the controller re-encrypts under counters.
      mc_encrypt_store(addr, slot_bytes ^ cotp_[src_slot], ev);
      break;
  }
}

std::uint64_t Simulator::allocate_slot(std::size_t level, std::uint32_t partition,
                                       PhysAddr addr, AccessEvent* ev) {
  const std::uint64_t id = cache_.pick_victim(level, partition, addr);
  if (cache_.slot(id).valid) {
    const CacheSlot victim = cache_.extract(id);
    if (level + 1 < cache_.geometry().levels.size()) {
      const std::uint64_t dst = allocate_slot(level + 1, 0, victim.tag, ev);
      DataLine bytes = victim.data;
      if (p_.scheme == SchemeId::kSepencr) bytes ^= cotp_[id] ^ cotp_[dst];
      cache_.install(dst, victim.tag, bytes, victim.dirty);
    } else if (victim.dirty) {
      stats_.evict_writebacks++;
      writeback_nvm(victim.tag, victim.data, id, ev);
    }
  }
  return id;
}

std::uint64_t Simulator::promote_to_l1(CacheHierarchy::Hit hit, std::uint32_t core,
                                       AccessEvent& ev) {
  if (hit.level == 0) {
    cache_.touch(hit.slot);
    return hit.slot;
  }
  const CacheSlot line = cache_.extract(hit.slot);
  const std::uint64_t dst = allocate_slot(0, core, line.tag, &ev);
  DataLine bytes = line.data;
  if (p_.scheme == SchemeId::kSepencr) bytes ^= cotp_[hit.slot] ^ cotp_[dst];
  cache_.install(dst, line.tag, bytes, line.dirty);
  return dst;
}

DataLine Simulator::read_slot_value(std::uint64_t slot_id, AccessEvent& ev) {
  const CacheSlot& s = cache_.slot(slot_id);
  switch (p_.scheme) {
    case SchemeId::kBaseline:
    case SchemeId::kMcCme:
    case SchemeId::kBbe:
      return s.data;
    case SchemeId::kSepencr:
      ev.scheme_adder_xor++;
      return s.data ^ cotp_[slot_id];
    case SchemeId::kEadrCme: {
      CounterBlock& blk = counters_for(s.tag, &ev);
      ev.scheme_adder_otp++;
      ev.scheme_adder_xor++;
      return s.data ^
             otp_.generate(line_seed(s.tag, blk), PadPurpose::kDecrypt, step_, 0);
    }
  }
  throw SimError("unreachable");
}

DataLine Simulator::fill_and_read(std::uint32_t core, PhysAddr addr,
                                  AccessEvent& ev) {
  ev.fill_from_nvm = true;
  const NvmLine nl = nvm_.read(addr, BusClass::kUserData);
  const std::uint64_t dst = allocate_slot(0, core, addr, &ev);

  switch (p_.scheme) {
    case SchemeId::kBaseline:
      if (nl.encrypted) throw SimError("baseline fetched ciphertext");
      cache_.install(dst, addr, nl.data, false);
      return nl.data;

    case SchemeId::kMcCme:
    case SchemeId::kBbe:
    case SchemeId::kSepencr: {
      DataLine plain = nl.data;
      if (nl.encrypted) {
        ev.fill_decrypt_at_mc = true;
        CounterBlock& blk = counters_for(addr, &ev);
        plain ^= otp_.generate(line_seed(addr, blk), PadPurpose::kDecrypt, step_, 0);
      }
      if (p_.scheme == SchemeId::kSepencr) {
        ev.scheme_adder_xor++;
        cache_.install(dst, addr, plain ^ cotp_[dst], false);
      } else {
        cache_.install(dst, addr, plain, false);
      }
      return plain;
    }

    case SchemeId::kEadrCme: {
      if (nl.encrypted) {
        cache_.install(dst, addr, nl.data, false);
        return read_slot_value(dst, ev);  // access-path decrypt
      }
      // Raw line: ciphertext-in-cache cannot hold plaintext, so encrypt on
      // install. Dirty keeps the advanced counter consistent with NVM at the
      // eventual writeback.
      CounterBlock& blk = counters_for(addr, &ev);
      const CounterBlock before = blk;
      BumpResult r = bump_minor(blk, line_idx(addr));
      if (r.overflowed) {
        stats_.overflow_events++;
        reencrypt_region(addr, before, blk, &ev);
        r = bump_minor(blk, line_idx(addr));
      }
      cc_.mark_dirty(addr);
      const DataLine pad = otp_.generate(line_seed(addr, blk),
                                         PadPurpose::kEncrypt, step_,
                                         fnv1a64(nl.data));
      ev.scheme_adder_otp++;
      ev.scheme_adder_xor++;
      cache_.install(dst, addr, nl.data ^ pad, true);
      return nl.data;
    }
  }
  throw SimError("unreachable");
}

void Simulator::encode_store(std::uint64_t slot_id, PhysAddr addr,
                             const DataLine& v, AccessEvent& ev) {
  switch (p_.scheme) {
    case SchemeId::kBaseline:
    case SchemeId::kMcCme:
    case SchemeId::kBbe:
      cache_.install(slot_id, addr, v, true);
      return;
    case SchemeId::kSepencr:
      ev.scheme_adder_xor++;
      cache_.install(slot_id, addr, v ^ cotp_[slot_id], true);
      return;
    case SchemeId::kEadrCme: {
      CounterBlock& blk = counters_for(addr, &ev);
      const CounterBlock before = blk;
      BumpResult r = bump_minor(blk, line_idx(addr));
      if (r.overflowed) {
        stats_.overflow_events++;
        reencrypt_region(addr, before, blk, &ev);
        r = bump_minor(blk, line_idx(addr));
      }
      cc_.mark_dirty(addr);
      const DataLine pad = otp_.generate(line_seed(addr, blk),
                                         PadPurpose::kEncrypt, step_, fnv1a64(v));
      ev.scheme_adder_otp++;
      ev.scheme_adder_xor++;
      cache_.install(slot_id, addr, v ^ pad, true);
      return;
    }
  }
}

DataLine Simulator::host_read(std::uint32_t core, PhysAddr addr) {
  require_user_line(addr);
  if (core >= p_.geometry.levels[0].partitions)
    throw SimError("core id beyond the innermost level's partitions");
  nvm_.set_step(step_);
  AccessEvent ev;
  ev.n_levels = cache_.geometry().levels.size();
  stats_.ops++;
  stats_.reads++;

  DataLine value;
  if (auto hit = cache_.find_any(core, addr)) {
    ev.hit_depth = hit->level;
    stats_.hits_by_level[std::min<std::size_t>(hit->level, 2)]++;
    const std::uint64_t slot = promote_to_l1(*hit, core, ev);
    value = read_slot_value(slot, ev);
  } else {
    ev.hit_depth = ev.n_levels;
    stats_.fills++;
    value = fill_and_read(core, addr, ev);
  }
  account_access(stats_, ev, p_.lat, wq_);
  step_++;
  return value;
}

void Simulator::host_write(std::uint32_t core, PhysAddr addr, const DataLine& v) {
  require_user_line(addr);
  if (core >= p_.geometry.levels[0].partitions)
    throw SimError("core id beyond the innermost level's partitions");
  nvm_.set_step(step_);
  AccessEvent ev;
  ev.is_write = true;
  ev.n_levels = cache_.geometry().levels.size();
  stats_.ops++;
  stats_.writes++;

  std::uint64_t slot;
  if (auto hit = cache_.find_any(core, addr)) {
    ev.hit_depth = hit->level;
    stats_.hits_by_level[std::min<std::size_t>(hit->level, 2)]++;
    slot = promote_to_l1(*hit, core, ev);
  } else {
    // Full-line store: allocate without fetching.
    ev.hit_depth = ev.n_levels;
    stats_.write_allocs++;
    slot = allocate_slot(0, core, addr, &ev);
  }
  encode_store(slot, addr, v, ev);
  account_access(stats_, ev, p_.lat, wq_);
  step_++;
}

CrashRecord Simulator::crash(EadrModel model) {
  if (crashed_) throw SimError("crash() while already powered down");
  if (p_.scheme == SchemeId::kBbe && model == EadrModel::kWriteOnly)
    throw SimError(
        "bbe is incompatible with the write-only model: its flush engine must "
        "compute pads, and write-only eADR sustains no compute");
  crashed_ = true;
  stats_.crashes++;
  crash_epoch_++;
  nvm_.set_step(step_);

  CrashRecord rec;
  rec.model = model;
  rec.at_step = step_;
  rec.dirty_bytes_by_level = cache_.dirty_bytes_by_level();
  const std::uint64_t slots = cache_.total_slots();
  for (std::uint64_t n = 0; n < slots; n++) {
    const CacheSlot& s = cache_.slot(n);
    if (s.valid && s.dirty) rec.dirty.emplace_back(s.tag, slot_plaintext_nolog(n));
  }
  std::sort(rec.dirty.begin(), rec.dirty.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  switch (p_.scheme) {
    case SchemeId::kBaseline:
      for (std::uint64_t n = 0; n < slots; n++) {
        const CacheSlot& s = cache_.slot(n);
        if (s.valid && s.dirty)
          nvm_.write(s.tag, s.data, BusClass::kUserData, false);
      }
      break;

    case SchemeId::kMcCme:
      if (model == EadrModel::kAllOperation) {
        // Full controller path available: encrypt like a normal eviction.
        for (std::uint64_t n = 0; n < slots; n++) {
          const CacheSlot& s = cache_.slot(n);
          if (s.valid && s.dirty) mc_encrypt_store(s.tag, s.data, nullptr);
        }
      } else {
        // Flush-only window: counters cannot advance, pads cannot be made.
        // The durable image is plaintext -- durability at the cost of
        // confidentiality.
        for (std::uint64_t n = 0; n < slots; n++) {
          const CacheSlot& s = cache_.slot(n);
          if (s.valid && s.dirty)
            nvm_.write(s.tag, s.data, BusClass::kUserData, false);
        }
      }
      break;

    case SchemeId::kEadrCme:
      for (std::uint64_t n = 0; n < slots; n++) {
        const CacheSlot& s = cache_.slot(n);
        if (s.valid && s.dirty)
          nvm_.write(s.tag, s.data, BusClass::kUserData, true);
      }
      break;

    case SchemeId::kBbe:
      // Every slot consumes one incrementing-counter value, occupied or not,
      // so recovery can derive slot n's value as (post-crash register - S + n)
      // without any per-slot counter storage.
      for (std::uint64_t n = 0; n < slots; n++) {
        const std::uint64_t ctr = incr_counter_++;
        const CacheSlot& s = cache_.slot(n);
        if (!s.valid || !s.dirty) continue;
        const DataLine pad = otp_.generate(
            Seed{SeedDomain::kBbeSlot, nvm_.layout().seed_addr(n), ctr, 0},
            PadPurpose::kEncrypt, step_, fnv1a64(s.data));
        nvm_.write(nvm_.layout().shadow_addr(n), s.data ^ pad,
                   BusClass::kUserData, true);
        DataLine meta;
        meta.set_u64(0, s.tag);
        meta.set_u64(8, crash_epoch_);
        nvm_.write(nvm_.layout().smeta_addr(n), meta, BusClass::kSecurityMetadata,
                   false);
        rec.engine_bytes += kLineBytes;
      }
      break;

    case SchemeId::kSepencr:
      // Slot bytes are already pad-XORed: copy them out verbatim. No reads,
      // no compute -- exactly what a write-only window can still do.
      for (std::uint64_t n = 0; n < slots; n++) {
        const CacheSlot& s = cache_.slot(n);
        if (!s.valid || !s.dirty) continue;
        nvm_.write(nvm_.layout().shadow_addr(n), s.data, BusClass::kUserData, true);
        DataLine meta;
        meta.set_u64(0, s.tag);
        meta.set_u64(8, crash_epoch_);
        nvm_.write(nvm_.layout().smeta_addr(n), meta, BusClass::kSecurityMetadata,
                   false);
      }
      break;
  }

  rec.mc_flush_bytes = cc_.flush_dirty(nvm_);
  rec.energy_mj = energy_crash_flush_mj(rec.dirty_bytes_by_level,
                                        rec.mc_flush_bytes, rec.engine_bytes,
                                        p_.energy);
  stats_.crash_energy_mj += rec.energy_mj;
  nvm_.snapshot();
  return rec;
}

void Simulator::recover() {
  if (!crashed_) throw SimError("recover() without a crash");
  cache_.invalidate_all();
  cc_.clear();
  nvm_.set_step(step_);
  const std::uint64_t slots = cache_.total_slots();

  if (p_.scheme == SchemeId::kBbe) {
    const std::uint64_t base = incr_counter_ - slots;
    for (std::uint64_t n = 0; n < slots; n++) {
      const NvmLine meta = nvm_.read(nvm_.layout().smeta_addr(n),
                                     BusClass::kSecurityMetadata);
      if (meta.data.get_u64(8) != crash_epoch_) continue;
      const PhysAddr tag = meta.data.get_u64(0);
      const NvmLine sh = nvm_.read(nvm_.layout().shadow_addr(n),
                                   BusClass::kUserData);
      const DataLine pad = otp_.generate(
          Seed{SeedDomain::kBbeSlot, nvm_.layout().seed_addr(n), base + n, 0},
          PadPurpose::kDecrypt, step_, 0);
      cache_.install(n, tag, sh.data ^ pad, true);
    }
  } else if (p_.scheme == SchemeId::kSepencr) {
    const std::uint64_t old_count = crash_count_;
    std::vector<std::tuple<std::uint64_t, PhysAddr, DataLine>> restored;
    for (std::uint64_t n = 0; n < slots; n++) {
      const NvmLine meta = nvm_.read(nvm_.layout().smeta_addr(n),
                                     BusClass::kSecurityMetadata);
      if (meta.data.get_u64(8) != crash_epoch_) continue;
      const NvmLine sh = nvm_.read(nvm_.layout().shadow_addr(n),
                                   BusClass::kUserData);
      const DataLine old_pad = otp_.generate(
          Seed{SeedDomain::kCotp, nvm_.layout().seed_addr(n), old_count, 0},
          PadPurpose::kDecrypt, step_, 0);
      restored.emplace_back(n, meta.data.get_u64(0), sh.data ^ old_pad);
    }
    // Rekey: every recovery advances the crash count and rebuilds the table.
    crash_count_++;
    regenerate_cotp();
    for (const auto& [n, tag, plain] : restored)
      cache_.install(n, tag, plain ^ cotp_[n], true);
  }

  crashed_ = false;
  stats_.recovery_s +=
      recovery_seconds(p_.scheme, cache_.geometry().total_bytes());
}

DataLine Simulator::slot_plaintext_nolog(std::uint64_t slot_id) const {
  const CacheSlot& s = cache_.slot(slot_id);
  switch (p_.scheme) {
    case SchemeId::kBaseline:
    case SchemeId::kMcCme:
    case SchemeId::kBbe:
      return s.data;
    case SchemeId::kSepencr:
      return s.data ^ cotp_[slot_id];
    case SchemeId::kEadrCme:
      return s.data ^ otp_.generate_nolog(line_seed(s.tag, peek_counters(s.tag)));
  }
  throw SimError("unreachable");
}

DataLine Simulator::peek_plaintext(PhysAddr addr) const {
  if (auto hit = cache_.find_global(addr)) return slot_plaintext_nolog(hit->slot);
  const NvmLine nl = nvm_.peek(addr);
  if (!nl.encrypted) return nl.data;
  return nl.data ^ otp_.generate_nolog(line_seed(addr, peek_counters(addr)));
}

std::vector<std::pair<PhysAddr, DataLine>> Simulator::resident_lines() const {
  std::vector<std::pair<PhysAddr, DataLine>> out;
  for (std::uint64_t n = 0; n < cache_.total_slots(); n++) {
    const CacheSlot& s = cache_.slot(n);
    if (s.valid) out.emplace_back(s.tag, slot_plaintext_nolog(n));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

void Simulator::dump_snapshot(std::ostream& os) const {
  os << "# scheme=" << to_string(p_.scheme) << " step=" << step_
     << " crashed=" << (crashed_ ? 1 : 0) << " incr_counter=" << incr_counter_
     << " crash_count=" << crash_count_ << " crash_epoch=" << crash_epoch_
     << "\n";
  for (std::uint64_t n = 0; n < cache_.total_slots(); n++) {
    const CacheSlot& s = cache_.slot(n);
    if (!s.valid) continue;
    os << n << " L" << (cache_.level_of_slot(n) + 1) << " 0x" << std::hex
       << s.tag << std::dec << (s.dirty ? " d " : " c ") << s.data.to_hex()
       << "\n";
  }
  os << "# nvm_lines=" << nvm_.lines_stored() << " hash=" << nvm_.content_hash()
     << "\n";
}

}  // namespace eadrsim
