#pragma once

// Machine-checked security and durability audits.
//
// Confidentiality: replay the bus trace against ground truth; any user-data
// transfer whose payload equals the current plaintext of its address (nonzero
// lines only; security metadata exempt) is a leak.
//
// Pad uniqueness: scan the seed log for any seed generated twice for
// encryption. A reused pad XORs two plaintexts into correlated ciphertexts.
//
// Persistence: after crash + recovery, every address ground truth knows must
// read back bit-exact through the scheme (plaintext-flush schemes can pass
// this while failing confidentiality -- durability without secrecy).

#include <cstdint>
#include <string>
#include <vector>

#include "eadrsim/cme.hpp"
#include "eadrsim/scheme.hpp"
#include "eadrsim/truth.hpp"
#include "eadrsim/types.hpp"
#include "eadrsim/workloads.hpp"

namespace eadrsim {

// Which op classes an eADR execution model can still perform during the
// power-loss flush window.
bool model_allows(EadrModel m, OpClass c);

struct LeakRecord {
  std::uint64_t step;
  PhysAddr addr;
  std::string payload_hex;
};

struct DuplicateSeedRecord {
  std::string seed_hex;
  std::uint64_t count;         // encrypt-purpose generations of this seed
  std::uint64_t first_step;
  std::uint64_t last_step;
};

struct PersistenceMismatch {
  PhysAddr addr;
  std::string expected_hex;
  std::string got_hex;
};

struct AuditReport {
  std::string scheme;
  std::string model;
  std::uint64_t config_hash = 0;
  std::uint64_t crash_point = 0;
  bool crashed = false;

  // Record vectors are capped for reporting; the counts are exact.
  std::vector<LeakRecord> leaks;
  std::vector<DuplicateSeedRecord> duplicate_seeds;
  std::vector<PersistenceMismatch> persistence_mismatches;
  std::uint64_t leak_count = 0;
  std::uint64_t duplicate_seed_count = 0;
  std::uint64_t mismatch_count = 0;

  std::uint64_t events_checked = 0;
  std::uint64_t seeds_checked = 0;
  std::uint64_t addresses_checked = 0;

  bool confidential() const { return leak_count == 0; }
  bool pads_unique() const { return duplicate_seed_count == 0; }
  bool persistent() const { return mismatch_count == 0; }
  bool clean() const { return confidential() && pads_unique() && persistent(); }

  std::string to_json() const;  // pretty-printed report
};

// Replays ops against ground truth in event-step order and flags leaking
// user-data transfers. Caps stored leak records at max_records (counts keep
// going).
void audit_confidentiality(AuditReport& rep, const AdversaryTrace& trace,
                           const OpTrace& ops, std::size_t max_records = 32);
std::uint64_t count_leaks(const AdversaryTrace& trace, const OpTrace& ops);

void audit_pad_uniqueness(AuditReport& rep, const SeedLog& log,
                          std::size_t max_records = 32);

// pre_crash_dirty: what was volatile-only when power failed (from the crash
// record); truth: the full plaintext state. Both must read back exactly.
void audit_persistence(AuditReport& rep,
                       const std::vector<std::pair<PhysAddr, DataLine>>& pre_crash_dirty,
                       const GroundTruth& truth, const Simulator& sim,
                       std::size_t max_records = 32);

// Whether the scheme is expected to leak plaintext during a crash flush under
// the model (the dilemma the audits demonstrate). Baseline leaks during
// normal operation as well.
bool expected_to_leak(SchemeId s, EadrModel m);

}  // namespace eadrsim
