#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "eadrsim/workloads.hpp"

using namespace eadrsim;

namespace {

// Independent copy of the payload stream so a silent change to the library's
// generator shows up as a test failure.
std::uint64_t sm64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

DataLine expected_value(std::uint64_t& vstate) {
  DataLine l;
  for (int i = 0; i < 8; i++) l.set_u64(8 * i, sm64(vstate));
  if (l.is_zero()) l.bytes[0] = 1;
  return l;
}

bool same_op(const Op& a, const Op& b) {
  return a.core == b.core && a.is_write == b.is_write && a.addr == b.addr &&
         a.value == b.value;
}

bool same_trace(const OpTrace& a, const OpTrace& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); i++)
    if (!same_op(a[i], b[i])) return false;
  return true;
}

// Last-write-wins image of memory after the trace runs.
std::map<PhysAddr, DataLine> replay(const OpTrace& t) {
  std::map<PhysAddr, DataLine> mem;
  for (const auto& op : t)
    if (op.is_write) mem[op.addr] = op.value;
  return mem;
}

DataLine at(const std::map<PhysAddr, DataLine>& mem, PhysAddr a) {
  auto it = mem.find(a);
  return it == mem.end() ? DataLine{} : it->second;
}

void walk_btree(const std::map<PhysAddr, DataLine>& mem, PhysAddr base,
                std::uint32_t idx, std::vector<std::uint64_t>& keys,
                std::size_t& visited) {
  REQUIRE(idx != 0);
  const DataLine n = at(mem, base + idx * kLineBytes);
  const int nkeys = n.bytes[0];
  const bool leaf = n.bytes[1] != 0;
  REQUIRE(nkeys >= 1);
  REQUIRE(nkeys <= 3);
  visited++;
  for (int i = 0; i < nkeys; i++) {
    if (!leaf) walk_btree(mem, base, n.get_u32(32 + 4 * i), keys, visited);
    keys.push_back(n.get_u64(8 + 8 * i));
  }
  if (leaf) {
    for (int i = 0; i < 4; i++) CHECK(n.get_u32(32 + 4 * i) == 0);
  } else {
    walk_btree(mem, base, n.get_u32(32 + 4 * nkeys), keys, visited);
  }
}

void walk_rbtree(const std::map<PhysAddr, DataLine>& mem, PhysAddr base,
                 std::uint32_t idx, std::uint32_t parent,
                 std::vector<std::uint64_t>& keys, std::size_t& visited) {
  if (idx == 0) return;
  const DataLine n = at(mem, base + idx * kLineBytes);
  CHECK(n.get_u32(16) == parent);
  const bool red = n.bytes[20] != 0;
  if (red && parent != 0) {
    const DataLine p = at(mem, base + parent * kLineBytes);
    CHECK(p.bytes[20] == 0);  // no red node has a red parent
  }
  visited++;
  walk_rbtree(mem, base, n.get_u32(8), idx, keys, visited);
  keys.push_back(n.get_u64(0));
  walk_rbtree(mem, base, n.get_u32(12), idx, keys, visited);
}

}  // namespace

TEST_SUITE("workloads") {

TEST_CASE("names parse and round-trip") {
  for (auto k : {WorkloadKind::kArray, WorkloadKind::kQueue, WorkloadKind::kBtree,
                 WorkloadKind::kHash, WorkloadKind::kRbtree})
    CHECK(parse_workload(to_string(k)) == k);
  CHECK_THROWS_AS(parse_workload("stack"), ConfigError);
}

TEST_CASE("spec validation") {
  TxnSpec s;
  s.txn_bytes = 65;
  CHECK_THROWS_AS(generate_trace(WorkloadKind::kArray, s), ConfigError);
  s = TxnSpec{};
  s.arena_bytes = (64ull << 20) + 64;
  CHECK_THROWS_AS(generate_trace(WorkloadKind::kArray, s), ConfigError);
  s = TxnSpec{};
  s.arena_bytes = 64;
  s.txn_bytes = 128;
  CHECK_THROWS_AS(generate_trace(WorkloadKind::kArray, s), ConfigError);
  s = TxnSpec{};
  CHECK_THROWS_AS(generate_trace(WorkloadKind::kArray, s, 0, 33), ConfigError);
}

TEST_CASE("array: frozen address sweep and payload stream") {
  TxnSpec s;
  s.n_txns = 8;
  s.txn_bytes = 128;
  s.arena_bytes = 512;
  s.rng_seed = 3;
  s.value_seed = 11;
  const OpTrace t = generate_trace(WorkloadKind::kArray, s);
  REQUIRE(t.size() == 16);

  std::uint64_t vstate = 11;
  for (std::size_t i = 0; i < t.size(); i++) {
    CHECK(t[i].core == 0);
    CHECK(t[i].is_write);
    CHECK(t[i].addr == (i * kLineBytes) % 512);  // sweeps, then wraps
    CHECK(t[i].value == expected_value(vstate));
  }
  CHECK(same_trace(t, generate_trace(WorkloadKind::kArray, s)));
}

TEST_CASE("queue: balanced run leaves only the counters") {
  TxnSpec s;
  s.n_txns = 10;
  s.txn_bytes = 64;
  s.arena_bytes = 640;  // 8 cells after the two counter lines
  const PhysAddr base = 1024;
  const OpTrace t = generate_trace(WorkloadKind::kQueue, s, 0, base);
  REQUIRE(t.size() == 25);  // 5 enqueues (2 ops) + 5 dequeues (3 ops)

  // Enqueue txn shape: cell write then tail bump.
  CHECK(t[0].is_write);
  CHECK(t[0].addr == base + 128);
  CHECK(t[1].addr == base + 64);
  CHECK(t[1].value.get_u64(0) == 1);
  // First dequeue: read cell 0, zero it, bump head.
  CHECK_FALSE(t[10].is_write);
  CHECK(t[10].addr == base + 128);
  CHECK(t[11].is_write);
  CHECK(t[11].value.is_zero());
  CHECK(t[12].addr == base);
  CHECK(t[12].value.get_u64(0) == 1);

  const auto mem = replay(t);
  CHECK(at(mem, base).get_u64(0) == 5);       // head
  CHECK(at(mem, base + 64).get_u64(0) == 5);  // tail
  for (int c = 0; c < 8; c++) CHECK(at(mem, base + 128 + c * 64).is_zero());
}

TEST_CASE("queue: arena too small") {
  TxnSpec s;
  s.n_txns = 4;
  s.txn_bytes = 64;
  s.arena_bytes = 192;  // one cell; second enqueue finds the ring full
  CHECK_THROWS_AS(generate_trace(WorkloadKind::kQueue, s), ConfigError);
  s.arena_bytes = 128;  // zero cells
  CHECK_THROWS_AS(generate_trace(WorkloadKind::kQueue, s), ConfigError);
}

TEST_CASE("btree: replay satisfies search-tree invariants and the key set") {
  TxnSpec s;
  s.n_txns = 20;
  s.txn_bytes = 64;
  s.arena_bytes = 4096;
  s.rng_seed = 42;
  const PhysAddr base = 8192;
  const OpTrace t = generate_trace(WorkloadKind::kBtree, s, 0, base);
  const auto mem = replay(t);

  std::mt19937_64 rng(42);  // independent re-derivation of the key schedule
  std::set<std::uint64_t> want;
  for (int i = 0; i < 20; i++) want.insert(rng() % (20 * 16 + 1));

  const DataLine meta = at(mem, base);
  const std::uint32_t root = meta.get_u32(0);
  REQUIRE(root != 0);
  std::vector<std::uint64_t> keys;
  std::size_t visited = 0;
  walk_btree(mem, base, root, keys, visited);

  for (std::size_t i = 1; i < keys.size(); i++) CHECK(keys[i - 1] < keys[i]);
  CHECK(std::set<std::uint64_t>(keys.begin(), keys.end()) == want);
  CHECK(keys.size() == want.size());
  CHECK(meta.get_u32(4) == visited + 1);  // node count includes the unused slot 0
  CHECK(same_trace(t, generate_trace(WorkloadKind::kBtree, s, 0, base)));
}

TEST_CASE("hash: open addressing with intact probe chains") {
  TxnSpec s;
  s.n_txns = 30;
  s.txn_bytes = 64;
  s.arena_bytes = 2048;  // 32 slots
  s.rng_seed = 7;
  const OpTrace t = generate_trace(WorkloadKind::kHash, s);
  const auto mem = replay(t);

  const std::uint64_t slots = 32;
  std::set<std::uint64_t> keys;
  std::uint64_t occupied = 0;
  for (std::uint64_t sl = 0; sl < slots; sl++) {
    const DataLine l = at(mem, sl * kLineBytes);
    if (l.is_zero()) continue;
    occupied++;
    const std::uint64_t key = l.get_u64(0);
    CHECK((key & 1) == 1);
    keys.insert(key);
    std::uint64_t h = key;
    const std::uint64_t home = sm64(h) % slots;
    // Linear probing never deletes, so every slot between home and the
    // landing slot must still be occupied.
    for (std::uint64_t p = home; p != sl; p = (p + 1) % slots)
      CHECK_FALSE(at(mem, p * kLineBytes).is_zero());
  }
  CHECK(keys.size() == occupied);  // each key lands in exactly one slot
  CHECK(occupied >= 1);
  CHECK(occupied <= 23);  // inserts stop at the 70% load cap

  // Every write is preceded by a read of the same slot (the probe that
  // found it).
  for (std::size_t i = 0; i < t.size(); i++)
    if (t[i].is_write) {
      REQUIRE(i > 0);
      CHECK_FALSE(t[i - 1].is_write);
      CHECK(t[i - 1].addr == t[i].addr);
    }
  CHECK(same_trace(t, generate_trace(WorkloadKind::kHash, s)));
}

TEST_CASE("rbtree: replay is a balanced search tree over the key schedule") {
  TxnSpec s;
  s.n_txns = 15;
  s.txn_bytes = 64;
  s.arena_bytes = 4096;
  s.rng_seed = 9;
  const PhysAddr base = 4096;
  const OpTrace t = generate_trace(WorkloadKind::kRbtree, s, 0, base);
  const auto mem = replay(t);

  std::mt19937_64 rng(9);
  std::set<std::uint64_t> want;
  for (int i = 0; i < 15; i++) want.insert(rng() % (15 * 16 + 1));

  const DataLine meta = at(mem, base);
  const std::uint32_t root = meta.get_u32(0);
  REQUIRE(root != 0);
  CHECK(at(mem, base + root * kLineBytes).bytes[20] == 0);  // root is black

  std::vector<std::uint64_t> keys;
  std::size_t visited = 0;
  walk_rbtree(mem, base, root, 0, keys, visited);
  for (std::size_t i = 1; i < keys.size(); i++) CHECK(keys[i - 1] < keys[i]);
  CHECK(std::set<std::uint64_t>(keys.begin(), keys.end()) == want);
  CHECK(visited == want.size());
  CHECK(meta.get_u32(4) == visited + 1);
  CHECK(same_trace(t, generate_trace(WorkloadKind::kRbtree, s, 0, base)));
}

TEST_CASE("interleave: round-robin with disjoint arena windows") {
  auto op = [](std::uint32_t core, PhysAddr addr) {
    Op o;
    o.core = core;
    o.is_write = true;
    o.addr = addr;
    o.value.bytes[0] = 1;
    return o;
  };
  OpTrace a = {op(0, 0), op(0, 64), op(0, 128)};
  OpTrace b = {op(1, kArenaStride)};
  const OpTrace out = interleave_cores({a, b});
  REQUIRE(out.size() == 4);
  CHECK(same_op(out[0], a[0]));
  CHECK(same_op(out[1], b[0]));
  CHECK(same_op(out[2], a[1]));
  CHECK(same_op(out[3], a[2]));

  OpTrace clash = {op(1, 192)};  // same 64 MiB window as trace a
  CHECK_THROWS_AS(interleave_cores({a, clash}), SimError);
}

TEST_CASE("multicore: per-core seeds, bases, and round-robin wiring") {
  TxnSpec s;
  s.n_txns = 4;
  s.txn_bytes = 64;
  s.arena_bytes = 1024;
  s.rng_seed = 5;
  s.value_seed = 6;
  const OpTrace t = generate_multicore(WorkloadKind::kArray, s, 2);

  TxnSpec s1 = s;
  s1.rng_seed = s.rng_seed + 0x9e3779b97f4a7c15ull;
  s1.value_seed = s.value_seed + 0xc2b2ae3d27d4eb4full;
  const OpTrace c0 = generate_trace(WorkloadKind::kArray, s, 0, 0);
  const OpTrace c1 = generate_trace(WorkloadKind::kArray, s1, 1, kArenaStride);

  OpTrace got0, got1;
  for (const auto& op : t) (op.core == 0 ? got0 : got1).push_back(op);
  CHECK(same_trace(got0, c0));
  CHECK(same_trace(got1, c1));
  CHECK(t.size() == c0.size() + c1.size());
  CHECK(t[0].core == 0);
  CHECK(t[1].core == 1);
  CHECK_THROWS_AS(generate_multicore(WorkloadKind::kArray, s, 0), ConfigError);
}

TEST_CASE("uniform: core cycling, containment, write fraction") {
  const OpTrace t = generate_uniform(99, 1024, 5, 3, 40);
  REQUIRE(t.size() == 99);
  std::size_t writes = 0;
  for (std::size_t i = 0; i < t.size(); i++) {
    const Op& op = t[i];
    CHECK(op.core == i % 3);
    const PhysAddr lo = op.core * kArenaStride;
    CHECK(op.addr >= lo);
    CHECK(op.addr < lo + 1024);
    CHECK(is_line_aligned(op.addr));
    if (op.is_write) {
      writes++;
      CHECK_FALSE(op.value.is_zero());
    } else {
      CHECK(op.value.is_zero());
    }
  }
  CHECK(writes > 0);
  CHECK(writes < t.size());
  CHECK(same_trace(t, generate_uniform(99, 1024, 5, 3, 40)));

  for (const auto& op : generate_uniform(50, 1024, 5, 1, 0)) CHECK_FALSE(op.is_write);
  for (const auto& op : generate_uniform(50, 1024, 5, 1, 100)) CHECK(op.is_write);
  CHECK_THROWS_AS(generate_uniform(10, 96, 1), ConfigError);
}

TEST_CASE("trace text round-trip") {
  const OpTrace t = generate_uniform(40, 2048, 17, 2, 50);
  std::stringstream ss;
  write_trace(ss, t);
  CHECK(same_trace(read_trace(ss), t));

  std::stringstream doc(
      "# header comment\n"
      "\n"
      "1 w 0x40 " + std::string(126, '0') + "ab\n"
      "0 r 0x0 " + std::string(128, '0') + "\n");
  const OpTrace got = read_trace(doc);
  REQUIRE(got.size() == 2);
  CHECK(got[0].core == 1);
  CHECK(got[0].is_write);
  CHECK(got[0].addr == 64);
  CHECK(got[0].value.bytes[63] == 0xab);
  CHECK_FALSE(got[1].is_write);

  std::stringstream bad_dir("0 x 0x40 " + std::string(128, '0') + "\n");
  CHECK_THROWS_AS(read_trace(bad_dir), SimError);
  std::stringstream missing("0 w 0x40\n");
  CHECK_THROWS_AS(read_trace(missing), SimError);

  const std::string path = "workload_trace_roundtrip.tmp";
  save_trace(path, t);
  CHECK(same_trace(load_trace(path), t));
  std::remove(path.c_str());
}

}  // TEST_SUITE
