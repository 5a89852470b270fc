#include "eadrsim/config.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "eadrsim/block_cipher.hpp"

namespace eadrsim {

using nlohmann::json;

CrashPlan parse_crash_plan(const std::string& text) {
  CrashPlan p;
  if (text == "none") {
    p.mode = CrashPlan::Mode::kNone;
    return p;
  }
  auto number = [&](std::size_t off) -> std::uint64_t {
    std::uint64_t v = 0;
    std::size_t used = 0;
    const bool leading_digit = off < text.size() && text[off] >= '0' && text[off] <= '9';
    try {
      if (leading_digit) v = std::stoull(text.substr(off), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || off + used != text.size())
      throw ConfigError("bad crash plan number in '" + text + "'");
    return v;
  };
  if (text.rfind("step:", 0) == 0) {
    p.mode = CrashPlan::Mode::kAtStep;
    p.at_step = number(5);
    return p;
  }
  if (text == "sweep") {
    p.mode = CrashPlan::Mode::kSweep;
    p.sweep_points = 0;
    return p;
  }
  if (text.rfind("sweep:", 0) == 0) {
    p.mode = CrashPlan::Mode::kSweep;
    p.sweep_points = number(6);
    if (p.sweep_points == 0) throw ConfigError("sweep point count must be positive");
    return p;
  }
  throw ConfigError("bad crash plan '" + text +
                    "' (expected none|step:K|sweep|sweep:K)");
}

std::string to_string(const CrashPlan& p) {
  switch (p.mode) {
    case CrashPlan::Mode::kNone:
      return "none";
    case CrashPlan::Mode::kAtStep:
      return "step:" + std::to_string(p.at_step);
    case CrashPlan::Mode::kSweep:
      return p.sweep_points == 0 ? "sweep"
                                 : "sweep:" + std::to_string(p.sweep_points);
  }
  return "none";
}

std::string ExperimentConfig::to_json() const {
  json j;
  {
    auto arr = json::array();
    for (auto s : schemes) arr.push_back(to_string(s));
    j["schemes"] = arr;
  }
  {
    auto arr = json::array();
    for (auto m : models) arr.push_back(to_string(m));
    j["models"] = arr;
  }
  {
    auto arr = json::array();
    for (auto w : workloads) arr.push_back(to_string(w));
    j["workloads"] = arr;
  }
  j["txn_sizes"] = txn_sizes;
  j["cores"] = cores;
  j["n_txns"] = n_txns;
  j["arena_bytes"] = arena_bytes;
  j["rng_seed"] = rng_seed;
  j["value_seed"] = value_seed;
  j["key_hex"] = key_hex;
  {
    auto levels = json::array();
    for (const auto& l : geometry.levels)
      levels.push_back({{"capacity_bytes", l.capacity_bytes},
                        {"assoc", l.assoc},
                        {"partitions", l.partitions}});
    j["geometry"] = {{"levels", levels}};
  }
  j["nvm_user_bytes"] = nvm_user_bytes;
  j["counter_cache_bytes"] = counter_cache_bytes;
  j["latency"] = {{"l1_hit_cycles", lat.l1_hit_cycles},
                  {"l2_hit_cycles", lat.l2_hit_cycles},
                  {"l3_hit_cycles", lat.l3_hit_cycles},
                  {"nvm_read_ns", lat.nvm_read_ns},
                  {"nvm_write_ns", lat.nvm_write_ns},
                  {"otp_gen_cycles", lat.otp_gen_cycles},
                  {"xor_cycles", lat.xor_cycles},
                  {"cpu_ghz", lat.cpu_ghz},
                  {"write_queue_entries", lat.write_queue_entries}};
  j["energy"] = {{"flush_l1_nj", energy.flush_l1_nj},
                 {"flush_l2_nj", energy.flush_l2_nj},
                 {"flush_l3_nj", energy.flush_l3_nj},
                 {"flush_mc_nj", energy.flush_mc_nj},
                 {"xor_fj_per_byte", energy.xor_fj_per_byte},
                 {"aes_pj_per_byte", energy.aes_pj_per_byte}};
  j["crash"] = eadrsim::to_string(crash);
  j["expect_leak"] = expect_leak;
  return j.dump(2);  // keys serialize sorted: canonical form
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  try {
    if (j.contains("schemes")) {
      c.schemes.clear();
      for (const auto& s : j["schemes"]) c.schemes.push_back(parse_scheme(s));
    }
    if (j.contains("models")) {
      c.models.clear();
      for (const auto& m : j["models"]) c.models.push_back(parse_model(m));
    }
    if (j.contains("workloads")) {
      c.workloads.clear();
      for (const auto& w : j["workloads"]) c.workloads.push_back(parse_workload(w));
    }
    if (j.contains("txn_sizes"))
      c.txn_sizes = j["txn_sizes"].get<std::vector<std::uint32_t>>();
    if (j.contains("cores")) c.cores = j["cores"].get<std::vector<std::uint32_t>>();
    c.n_txns = j.value("n_txns", c.n_txns);
    c.arena_bytes = j.value("arena_bytes", c.arena_bytes);
    c.rng_seed = j.value("rng_seed", c.rng_seed);
    c.value_seed = j.value("value_seed", c.value_seed);
    c.key_hex = j.value("key_hex", c.key_hex);
    if (j.contains("geometry")) {
      c.geometry.levels.clear();
      for (const auto& l : j["geometry"]["levels"]) {
        LevelSpec spec;
        spec.capacity_bytes = l.at("capacity_bytes").get<std::uint64_t>();
        spec.assoc = l.at("assoc").get<std::uint32_t>();
        spec.partitions = l.value("partitions", 1u);
        c.geometry.levels.push_back(spec);
      }
    }
    c.nvm_user_bytes = j.value("nvm_user_bytes", c.nvm_user_bytes);
    c.counter_cache_bytes = j.value("counter_cache_bytes", c.counter_cache_bytes);
    if (j.contains("latency")) {
      const auto& l = j["latency"];
      c.lat.l1_hit_cycles = l.value("l1_hit_cycles", c.lat.l1_hit_cycles);
      c.lat.l2_hit_cycles = l.value("l2_hit_cycles", c.lat.l2_hit_cycles);
      c.lat.l3_hit_cycles = l.value("l3_hit_cycles", c.lat.l3_hit_cycles);
      c.lat.nvm_read_ns = l.value("nvm_read_ns", c.lat.nvm_read_ns);
      c.lat.nvm_write_ns = l.value("nvm_write_ns", c.lat.nvm_write_ns);
      c.lat.otp_gen_cycles = l.value("otp_gen_cycles", c.lat.otp_gen_cycles);
      c.lat.xor_cycles = l.value("xor_cycles", c.lat.xor_cycles);
      c.lat.cpu_ghz = l.value("cpu_ghz", c.lat.cpu_ghz);
      c.lat.write_queue_entries =
          l.value("write_queue_entries", c.lat.write_queue_entries);
    }
    if (j.contains("energy")) {
      const auto& e = j["energy"];
      c.energy.flush_l1_nj = e.value("flush_l1_nj", c.energy.flush_l1_nj);
      c.energy.flush_l2_nj = e.value("flush_l2_nj", c.energy.flush_l2_nj);
      c.energy.flush_l3_nj = e.value("flush_l3_nj", c.energy.flush_l3_nj);
      c.energy.flush_mc_nj = e.value("flush_mc_nj", c.energy.flush_mc_nj);
      c.energy.xor_fj_per_byte = e.value("xor_fj_per_byte", c.energy.xor_fj_per_byte);
      c.energy.aes_pj_per_byte = e.value("aes_pj_per_byte", c.energy.aes_pj_per_byte);
    }
    if (j.contains("crash")) c.crash = parse_crash_plan(j["crash"]);
    c.expect_leak = j.value("expect_leak", c.expect_leak);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field has wrong type: ") + e.what());
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return from_json(ss.str());
}

void ExperimentConfig::validate() const {
  if (schemes.empty()) throw ConfigError("no schemes selected");
  if (models.empty()) throw ConfigError("no eADR models selected");
  if (workloads.empty()) throw ConfigError("no workloads selected");
  if (txn_sizes.empty()) throw ConfigError("no transaction sizes selected");
  if (cores.empty()) throw ConfigError("no core counts selected");

  geometry.validate();
  const bool has_bbe =
      std::find(schemes.begin(), schemes.end(), SchemeId::kBbe) != schemes.end();
  const bool has_wo = std::find(models.begin(), models.end(),
                                EadrModel::kWriteOnly) != models.end();
  if (has_bbe && has_wo)
    throw ConfigError(
        "bbe cannot run under the write-only model: its flush engine computes "
        "pads during the power-loss window, and write-only eADR sustains "
        "writes but no compute; drop one of the two from the matrix");

  for (auto t : txn_sizes)
    if (t == 0 || t % kLineBytes != 0)
      throw ConfigError("txn size " + std::to_string(t) +
                        " is not a nonzero multiple of 64");
  for (auto n : cores) {
    if (n == 0) throw ConfigError("core count must be positive");
    if (n > geometry.levels[0].partitions)
      throw ConfigError("core count " + std::to_string(n) + " exceeds the " +
                        std::to_string(geometry.levels[0].partitions) +
                        " innermost-level partitions");
  }
  if (n_txns == 0) throw ConfigError("n_txns must be positive");
  if (arena_bytes == 0 || arena_bytes % kLineBytes != 0)
    throw ConfigError("arena_bytes must be a nonzero multiple of 64");
  if (arena_bytes > kArenaStride)
    throw ConfigError("arena_bytes exceeds the 64 MiB per-core stride");
  const std::uint32_t max_cores = *std::max_element(cores.begin(), cores.end());
  if (max_cores * kArenaStride > nvm_user_bytes)
    throw ConfigError("NVM user space too small for " + std::to_string(max_cores) +
                      " 64 MiB core arenas");
  parse_key_hex(key_hex);  // throws on malformed keys
  if (counter_cache_bytes < kLineBytes)
    throw ConfigError("counter cache must hold at least one 64-byte block");
  if (lat.cpu_ghz <= 0) throw ConfigError("cpu_ghz must be positive");
  if (lat.write_queue_entries == 0)
    throw ConfigError("write queue needs at least one entry");
}

}  // namespace eadrsim
