#include "eadrsim/audit.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <set>

namespace eadrsim {

bool model_allows(EadrModel m, OpClass c) {
  switch (m) {
    case EadrModel::kAllOperation:
      return true;
    case EadrModel::kWriteComputeOrder:
      return c == OpClass::kCompute || c == OpClass::kWrite;
    case EadrModel::kWriteOnly:
      return c == OpClass::kWrite;
  }
  return false;
}

bool expected_to_leak(SchemeId s, EadrModel m) {
  if (s == SchemeId::kBaseline) return true;  // plaintext bus at all times
  if (s == SchemeId::kMcCme) return m != EadrModel::kAllOperation;
  return false;
}

void audit_confidentiality(AuditReport& rep, const AdversaryTrace& trace,
                           const OpTrace& ops, std::size_t max_records) {
  GroundTruth truth;
  std::size_t applied = 0;
  for (const BusEvent& e : trace.events) {
    while (applied < e.step && applied < ops.size()) truth.apply(ops[applied++]);
    rep.events_checked++;
    if (e.cls != BusClass::kUserData) continue;  // key-independent metadata
    const DataLine expect = truth.line(e.addr);
    if (expect.is_zero()) continue;  // empty lines carry no secret
    if (e.payload == expect) {
      rep.leak_count++;
      if (rep.leaks.size() < max_records)
        rep.leaks.push_back(LeakRecord{e.step, e.addr, e.payload.to_hex()});
    }
  }
}

std::uint64_t count_leaks(const AdversaryTrace& trace, const OpTrace& ops) {
  AuditReport rep;
  audit_confidentiality(rep, trace, ops, 0);
  return rep.leak_count;
}

void audit_pad_uniqueness(AuditReport& rep, const SeedLog& log,
                          std::size_t max_records) {
  struct SeedUse {
    std::uint64_t count = 0;
    std::uint64_t first_step = 0;
    std::uint64_t last_step = 0;
  };
  std::map<Block16, SeedUse> uses;
  for (const auto& entry : log) {
    if (entry.purpose != PadPurpose::kEncrypt) continue;  // decryption reuses by design
    rep.seeds_checked++;
    auto [it, fresh] = uses.try_emplace(entry.seed);
    if (fresh) it->second.first_step = entry.step;
    it->second.count++;
    it->second.last_step = entry.step;
  }
  for (const auto& [seed, use] : uses) {
    if (use.count < 2) continue;
    rep.duplicate_seed_count++;
    if (rep.duplicate_seeds.size() < max_records) {
      std::string hex;
      hex.reserve(32);
      for (auto b : seed) {
        hex.push_back("0123456789abcdef"[b >> 4]);
        hex.push_back("0123456789abcdef"[b & 0xf]);
      }
      rep.duplicate_seeds.push_back(
          DuplicateSeedRecord{hex, use.count, use.first_step, use.last_step});
    }
  }
}

void audit_persistence(AuditReport& rep,
                       const std::vector<std::pair<PhysAddr, DataLine>>& pre_crash_dirty,
                       const GroundTruth& truth, const Simulator& sim,
                       std::size_t max_records) {
  auto check = [&](PhysAddr addr, const DataLine& expect) {
    rep.addresses_checked++;
    const DataLine got = sim.peek_plaintext(addr);
    if (got == expect) return;
    rep.mismatch_count++;
    if (rep.persistence_mismatches.size() < max_records)
      rep.persistence_mismatches.push_back(
          PersistenceMismatch{addr, expect.to_hex(), got.to_hex()});
  };
  // Everything that was volatile-only at the crash, then everything ever
  // written, each address once.
  std::set<PhysAddr> seen;
  for (const auto& [addr, plain] : pre_crash_dirty)
    if (seen.insert(addr).second) check(addr, plain);
  for (const auto& [addr, plain] : truth.lines())
    if (seen.insert(addr).second) check(addr, plain);
}

std::string AuditReport::to_json() const {
  nlohmann::json j;
  j["scheme"] = scheme;
  j["model"] = model;
  char hash_hex[20];
  std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                static_cast<unsigned long long>(config_hash));
  j["config_hash"] = hash_hex;
  j["crashed"] = crashed;
  j["crash_point"] = crash_point;
  j["checked"] = {{"bus_events", events_checked},
                  {"encrypt_seeds", seeds_checked},
                  {"addresses", addresses_checked}};
  j["violations"] = {{"confidentiality", leak_count},
                     {"duplicate_seeds", duplicate_seed_count},
                     {"persistence", mismatch_count}};
  j["passed"] = clean();

  auto leaks_j = nlohmann::json::array();
  for (const auto& l : leaks)
    leaks_j.push_back({{"step", l.step}, {"addr", l.addr}, {"payload", l.payload_hex}});
  j["leaks"] = leaks_j;

  auto dups_j = nlohmann::json::array();
  for (const auto& d : duplicate_seeds)
    dups_j.push_back({{"seed", d.seed_hex},
                      {"count", d.count},
                      {"first_step", d.first_step},
                      {"last_step", d.last_step}});
  j["duplicate_seeds"] = dups_j;

  auto pm_j = nlohmann::json::array();
  for (const auto& m : persistence_mismatches)
    pm_j.push_back(
        {{"addr", m.addr}, {"expected", m.expected_hex}, {"got", m.got_hex}});
  j["persistence_mismatches"] = pm_j;
  return j.dump(2);
}

}  // namespace eadrsim
