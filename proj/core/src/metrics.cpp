#include "eadrsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace eadrsim {

std::uint64_t LatencyTable::probe_cycles(std::size_t depth) const {
  std::uint64_t c = 0;
  if (depth >= 1) c += l1_hit_cycles;
  if (depth >= 2) c += l2_hit_cycles;
  if (depth >= 3) c += (depth - 2) * l3_hit_cycles;  // deeper levels at L3 cost
  return c;
}

double energy_crash_flush_mj(const std::vector<std::uint64_t>& dirty_bytes_by_level,
                             std::uint64_t mc_bytes, std::uint64_t engine_bytes,
                             const EnergyTable& e) {
  double nj = 0.0;
  for (std::size_t l = 0; l < dirty_bytes_by_level.size(); l++)
    nj += static_cast<double>(dirty_bytes_by_level[l]) * e.level_nj(l);
  nj += static_cast<double>(mc_bytes) * e.flush_mc_nj;
  double mj = nj * 1e-6;
  mj += static_cast<double>(engine_bytes) * e.aes_pj_per_byte * 1e-9;
  mj += static_cast<double>(engine_bytes) * e.xor_fj_per_byte * 1e-12;
  return mj;
}

double recovery_seconds(SchemeId scheme, std::uint64_t data_cache_bytes,
                        double ns_per_line) {
  const double full = static_cast<double>(data_cache_bytes / kLineBytes) *
                      ns_per_line * 1e-9;
  switch (scheme) {
    case SchemeId::kBbe:
      return full;  // restore every slot from the shadow region
    case SchemeId::kSepencr:
      return full / 2.0;  // only the user half of the slots
    default:
      return 0.0;  // demand reload; no stop-the-world restore
  }
}

std::uint64_t WriteQueue::push(std::uint64_t now) {
  while (!completions_.empty() && completions_.front() <= now)
    completions_.pop_front();
  std::uint64_t stall = 0;
  std::uint64_t start = now;
  if (completions_.size() >= entries_) {
    stall = completions_.front() - now;
    start = completions_.front();
    completions_.pop_front();
  }
  // Overlapped service: each write occupies its entry for service_ cycles.
  const std::uint64_t done = start + service_;
  auto it = std::upper_bound(completions_.begin(), completions_.end(), done);
  completions_.insert(it, done);
  total_stall_ += stall;
  pushes_++;
  return stall;
}

std::size_t WriteQueue::in_flight(std::uint64_t now) const {
  std::size_t n = 0;
  for (auto c : completions_)
    if (c > now) n++;
  return n;
}

std::uint64_t account_access(RunStats& stats, const AccessEvent& ev,
                             const LatencyTable& lat, WriteQueue& wq) {
  const std::size_t depth =
      ev.hit_depth >= ev.n_levels ? ev.n_levels : ev.hit_depth + 1;
  std::uint64_t c = lat.probe_cycles(depth);

  if (ev.fill_from_nvm) {
    // Memory-side decryption overlaps the fetch: the slower of the two.
    c += ev.fill_decrypt_at_mc
             ? std::max<std::uint64_t>(lat.nvm_read_cycles(), lat.otp_gen_cycles)
             : lat.nvm_read_cycles();
  }
  // Counter blocks fetched on the access path serialize before the pad.
  c += ev.counter_fetches * lat.nvm_read_cycles();
  c += static_cast<std::uint64_t>(ev.scheme_adder_otp) * lat.otp_gen_cycles;
  c += static_cast<std::uint64_t>(ev.scheme_adder_xor) * lat.xor_cycles;

  std::uint64_t stall = 0;
  const std::uint64_t now = stats.total_cycles + c;
  for (std::uint32_t i = 0; i < ev.nvm_writes; i++) stall += wq.push(now + stall);
  c += stall;

  stats.total_cycles += c;
  stats.stall_cycles += stall;
  return c;
}

std::string format_mj(double mj) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", mj);
  return buf;
}

std::string format_seconds(double s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", s);
  return buf;
}

std::vector<EnergyRow> energy_report(std::uint64_t l1_bytes, std::uint64_t l2_bytes,
                                     std::uint64_t l3_bytes, std::uint64_t mc_bytes,
                                     const EnergyTable& e) {
  const std::vector<std::uint64_t> full = {l1_bytes, l2_bytes, l3_bytes};
  const std::vector<std::uint64_t> half = {l1_bytes / 2, l2_bytes / 2, l3_bytes / 2};
  const std::uint64_t cache_total = l1_bytes + l2_bytes + l3_bytes;

  std::vector<EnergyRow> rows;
  {
    // Baseline and the counter-mode schemes: whole data cache, no MC flush
    // modeled in the headline number, no battery engine.
    const double cache = energy_crash_flush_mj(full, 0, 0, e);
    rows.push_back({"baseline", cache, -1.0, -1.0, cache});
    rows.push_back({"mc-cme", cache, -1.0, -1.0, cache});
    rows.push_back({"eadr-cme", cache, -1.0, -1.0, cache});
  }
  {
    // Half the data cache holds pads that never flush; counter cache flushes.
    const double cache = energy_crash_flush_mj(half, 0, 0, e);
    const double mc = energy_crash_flush_mj({}, mc_bytes, 0, e);
    rows.push_back({"sepencr", cache, mc, -1.0, cache + mc});
  }
  {
    const double cache = energy_crash_flush_mj(full, 0, 0, e);
    const double mc = energy_crash_flush_mj({}, mc_bytes, 0, e);
    const double module = energy_crash_flush_mj({}, 0, cache_total, e);
    rows.push_back({"bbe", cache, mc, module, cache + mc + module});
  }
  return rows;
}

std::vector<RecoveryRow> recovery_report(const std::vector<std::uint64_t>& cache_mib,
                                         double ns_per_line) {
  std::vector<RecoveryRow> rows;
  for (auto mib : cache_mib) {
    const std::uint64_t bytes = mib << 20;
    rows.push_back({mib, recovery_seconds(SchemeId::kBbe, bytes, ns_per_line),
                    recovery_seconds(SchemeId::kSepencr, bytes, ns_per_line)});
  }
  return rows;
}

}  // namespace eadrsim
