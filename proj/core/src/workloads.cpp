#include "eadrsim/workloads.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <vector>

namespace eadrsim {

const char* to_string(WorkloadKind k) {
  switch (k) {
    case WorkloadKind::kArray: return "array";
    case WorkloadKind::kQueue: return "queue";
    case WorkloadKind::kBtree: return "btree";
    case WorkloadKind::kHash: return "hash";
    case WorkloadKind::kRbtree: return "rbtree";
  }
  return "?";
}

WorkloadKind parse_workload(const std::string& name) {
  if (name == "array") return WorkloadKind::kArray;
  if (name == "queue") return WorkloadKind::kQueue;
  if (name == "btree") return WorkloadKind::kBtree;
  if (name == "hash") return WorkloadKind::kHash;
  if (name == "rbtree") return WorkloadKind::kRbtree;
  throw ConfigError("unknown workload '" + name +
                    "' (expected array|queue|btree|hash|rbtree)");
}

namespace {

void check_spec(const TxnSpec& spec) {
  if (spec.txn_bytes == 0 || spec.txn_bytes % kLineBytes != 0)
    throw ConfigError("txn_bytes must be a nonzero multiple of 64");
  if (spec.arena_bytes == 0 || spec.arena_bytes % kLineBytes != 0)
    throw ConfigError("arena_bytes must be a nonzero multiple of 64");
  if (spec.arena_bytes > kArenaStride)
    throw ConfigError("arena_bytes exceeds the 64 MiB per-core stride");
  if (spec.arena_bytes < spec.txn_bytes)
    throw ConfigError("arena too small for one transaction");
}

// Emits ops for one core; owns the payload stream.
struct Emitter {
  OpTrace& ops;
  std::uint32_t core;
  std::uint64_t value_state;

  DataLine next_value() {
    DataLine l;
    for (int i = 0; i < 8; i++) l.set_u64(8 * i, splitmix64(value_state));
    if (l.is_zero()) l.bytes[0] = 1;  // keep payloads distinguishable from empty
    return l;
  }
  void read(PhysAddr addr) { ops.push_back(Op{core, false, addr, DataLine{}}); }
  void write(PhysAddr addr, const DataLine& v) {
    ops.push_back(Op{core, true, addr, v});
  }
  void write_fresh(PhysAddr addr) { write(addr, next_value()); }
};

void gen_array(Emitter& em, const TxnSpec& spec, PhysAddr base) {
  // Sequential full-line stores sweeping the arena, wrapping at the end.
  for (std::uint64_t t = 0; t < spec.n_txns; t++)
    for (std::uint64_t off = 0; off < spec.txn_bytes; off += kLineBytes)
      em.write_fresh(base + (t * spec.txn_bytes + off) % spec.arena_bytes);
}

void gen_queue(Emitter& em, const TxnSpec& spec, PhysAddr base) {
  // Ring buffer: head/tail counter lines, then fixed-size cells. First half
  // of the transactions enqueue, second half dequeue; a dequeue restores the
  // cell to its initial all-zero state, so a balanced run leaves the arena
  // untouched except the two counters.
  const PhysAddr head_line = base;
  const PhysAddr tail_line = base + kLineBytes;
  const PhysAddr data_base = base + 2 * kLineBytes;
  const std::uint64_t cells = (spec.arena_bytes - 2 * kLineBytes) / spec.txn_bytes;
  if (cells == 0) throw ConfigError("queue arena too small for one cell");
  const std::uint64_t lines = spec.txn_bytes / kLineBytes;

  const std::uint64_t n_enq = (spec.n_txns + 1) / 2;
  std::uint64_t enq = 0, deq = 0;
  for (std::uint64_t t = 0; t < spec.n_txns; t++) {
    if (t < n_enq) {
      if (enq - deq >= cells) throw ConfigError("queue arena too small: ring full");
      const PhysAddr cell = data_base + (enq % cells) * spec.txn_bytes;
      for (std::uint64_t i = 0; i < lines; i++)
        em.write_fresh(cell + i * kLineBytes);
      enq++;
      DataLine tl;
      tl.set_u64(0, enq);
      em.write(tail_line, tl);
    } else if (deq < enq) {
      const PhysAddr cell = data_base + (deq % cells) * spec.txn_bytes;
      for (std::uint64_t i = 0; i < lines; i++) em.read(cell + i * kLineBytes);
      for (std::uint64_t i = 0; i < lines; i++)
        em.write(cell + i * kLineBytes, DataLine{});
      deq++;
      DataLine hl;
      hl.set_u64(0, deq);
      em.write(head_line, hl);
    }
  }
}

// ---- order-3 B-tree (3 keys, 4 children per node) ----

struct BtNode {
  std::uint8_t nkeys = 0;
  bool leaf = true;
  std::uint64_t keys[3] = {0, 0, 0};
  std::uint32_t child[4] = {0, 0, 0, 0};
};

struct Btree {
  Emitter& em;
  PhysAddr base;
  std::uint64_t max_nodes;
  std::vector<BtNode> nodes;  // [0] unused; meta line lives at its address
  std::uint32_t root = 0;
  bool meta_dirty = false;

  explicit Btree(Emitter& e, PhysAddr b, std::uint64_t cap)
      : em(e), base(b), max_nodes(cap) {
    nodes.resize(1);
  }

  PhysAddr addr(std::uint32_t idx) const { return base + idx * kLineBytes; }

  std::uint32_t alloc() {
    if (nodes.size() >= max_nodes) throw ConfigError("btree arena exhausted");
    nodes.push_back(BtNode{});
    meta_dirty = true;
    return static_cast<std::uint32_t>(nodes.size() - 1);
  }

  DataLine serialize(std::uint32_t idx) const {
    const BtNode& n = nodes[idx];
    DataLine l;
    l.bytes[0] = n.nkeys;
    l.bytes[1] = n.leaf ? 1 : 0;
    for (int i = 0; i < 3; i++) l.set_u64(8 + 8 * i, n.keys[i]);
    for (int i = 0; i < 4; i++) l.set_u32(32 + 4 * i, n.child[i]);
    return l;
  }

  void touch_read(std::uint32_t idx) { em.read(addr(idx)); }
  void touch_write(std::uint32_t idx) { em.write(addr(idx), serialize(idx)); }

  void write_meta() {
    DataLine l;
    l.set_u32(0, root);
    l.set_u32(4, static_cast<std::uint32_t>(nodes.size()));
    em.write(base, l);
    meta_dirty = false;
  }

  // Split full child c of parent p at child slot ci (p has room).
  void split_child(std::uint32_t p, int ci) {
    const std::uint32_t c = nodes[p].child[ci];
    const std::uint32_t r = alloc();
    BtNode& cn = nodes[c];
    BtNode& rn = nodes[r];
    rn.leaf = cn.leaf;
    rn.nkeys = 1;
    rn.keys[0] = cn.keys[2];
    if (!cn.leaf) {
      rn.child[0] = cn.child[2];
      rn.child[1] = cn.child[3];
    }
    const std::uint64_t mid = cn.keys[1];
    cn.nkeys = 1;
    cn.keys[1] = cn.keys[2] = 0;
    cn.child[2] = cn.child[3] = 0;

    BtNode& pn = nodes[p];
    for (int i = pn.nkeys; i > ci; i--) {
      pn.keys[i] = pn.keys[i - 1];
      pn.child[i + 1] = pn.child[i];
    }
    pn.keys[ci] = mid;
    pn.child[ci + 1] = r;
    pn.nkeys++;
    touch_write(c);
    touch_write(r);
    touch_write(p);
  }

  void insert(std::uint64_t key) {
    if (root == 0) {
      root = alloc();
      nodes[root].nkeys = 1;
      nodes[root].keys[0] = key;
      touch_write(root);
      meta_dirty = true;
      return;
    }
    if (nodes[root].nkeys == 3) {
      const std::uint32_t nr = alloc();
      nodes[nr].leaf = false;
      nodes[nr].child[0] = root;
      touch_read(root);
      root = nr;
      split_child(nr, 0);
      meta_dirty = true;
    }
    std::uint32_t cur = root;
    for (;;) {
      touch_read(cur);
      BtNode& n = nodes[cur];
      int i = 0;
      while (i < n.nkeys && key > n.keys[i]) i++;
      if (i < n.nkeys && n.keys[i] == key) {
        touch_write(cur);  // update-in-place of an existing key
        return;
      }
      if (n.leaf) {
        for (int j = n.nkeys; j > i; j--) n.keys[j] = n.keys[j - 1];
        n.keys[i] = key;
        n.nkeys++;
        touch_write(cur);
        return;
      }
      const std::uint32_t c = n.child[i];
      if (nodes[c].nkeys == 3) {
        touch_read(c);
        split_child(cur, i);  // may reallocate nodes; reacquire below
        if (nodes[cur].keys[i] == key) {
          touch_write(cur);  // key was just promoted here: update in place
          return;
        }
        if (key > nodes[cur].keys[i]) i++;
        cur = nodes[cur].child[i];
      } else {
        cur = c;
      }
    }
  }
};

void gen_btree(Emitter& em, const TxnSpec& spec, PhysAddr base,
               std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  Btree t(em, base, spec.arena_bytes / kLineBytes);
  const std::uint64_t inserts_per_txn = spec.txn_bytes / kLineBytes;
  const std::uint64_t total = spec.n_txns * inserts_per_txn;
  for (std::uint64_t t_i = 0; t_i < spec.n_txns; t_i++) {
    em.read(base);  // consult the root pointer
    for (std::uint64_t k = 0; k < inserts_per_txn; k++)
      t.insert(rng() % (total * 16 + 1));
    if (t.meta_dirty) t.write_meta();
  }
}

void gen_hash(Emitter& em, const TxnSpec& spec, PhysAddr base,
              std::uint64_t rng_seed) {
  // Open-addressing table, one entry per line, linear probing. Inserts until
  // 70% load, then switches to updates of previously inserted keys.
  std::mt19937_64 rng(rng_seed);
  const std::uint64_t slots = spec.arena_bytes / kLineBytes;
  std::vector<std::uint64_t> table(slots, 0);
  std::vector<std::uint64_t> inserted;
  std::uint64_t used = 0;

  const std::uint64_t per_txn = spec.txn_bytes / kLineBytes;
  for (std::uint64_t t = 0; t < spec.n_txns; t++) {
    for (std::uint64_t k = 0; k < per_txn; k++) {
      std::uint64_t key;
      if (used * 10 >= slots * 7 && !inserted.empty())
        key = inserted[rng() % inserted.size()];
      else
        key = rng() | 1;
      std::uint64_t h = key;
      const std::uint64_t home = splitmix64(h) % slots;
      for (std::uint64_t p = 0; p < slots; p++) {
        const std::uint64_t s = (home + p) % slots;
        em.read(base + s * kLineBytes);
        if (table[s] == 0 || table[s] == key) {
          if (table[s] == 0) {
            table[s] = key;
            inserted.push_back(key);
            used++;
          }
          DataLine l = em.next_value();
          l.set_u64(0, key);
          em.write(base + s * kLineBytes, l);
          break;
        }
      }
      if (used == slots) throw ConfigError("hash arena full");
    }
  }
}

// ---- red-black tree (CLRS insert; index 0 = nil/meta) ----

struct RbNode {
  std::uint64_t key = 0;
  std::uint32_t left = 0, right = 0, parent = 0;
  bool red = false;
  std::array<std::uint8_t, 40> payload{};
};

struct Rbtree {
  Emitter& em;
  PhysAddr base;
  std::uint64_t max_nodes;
  std::vector<RbNode> nodes;
  std::uint32_t root = 0;
  std::set<std::uint32_t> dirty;
  bool meta_dirty = false;

  Rbtree(Emitter& e, PhysAddr b, std::uint64_t cap) : em(e), base(b), max_nodes(cap) {
    nodes.resize(1);
  }

  PhysAddr addr(std::uint32_t i) const { return base + i * kLineBytes; }
  void mark(std::uint32_t i) {
    if (i) dirty.insert(i);
  }
  void visit(std::uint32_t i) {
    if (i) em.read(addr(i));
  }

  std::uint32_t alloc(std::uint64_t key) {
    if (nodes.size() >= max_nodes) throw ConfigError("rbtree arena exhausted");
    RbNode n;
    n.key = key;
    const DataLine v = em.next_value();
    std::copy(v.bytes.begin(), v.bytes.begin() + 40, n.payload.begin());
    nodes.push_back(n);
    meta_dirty = true;
    return static_cast<std::uint32_t>(nodes.size() - 1);
  }

  DataLine serialize(std::uint32_t i) const {
    const RbNode& n = nodes[i];
    DataLine l;
    l.set_u64(0, n.key);
    l.set_u32(8, n.left);
    l.set_u32(12, n.right);
    l.set_u32(16, n.parent);
    l.bytes[20] = n.red ? 1 : 0;
    std::copy(n.payload.begin(), n.payload.end(), l.bytes.begin() + 24);
    return l;
  }

  void rotate_left(std::uint32_t x) {
    const std::uint32_t y = nodes[x].right;
    visit(y);
    nodes[x].right = nodes[y].left;
    if (nodes[y].left) {
      nodes[nodes[y].left].parent = x;
      mark(nodes[y].left);
    }
    nodes[y].parent = nodes[x].parent;
    if (!nodes[x].parent) {
      root = y;
      meta_dirty = true;
    } else if (x == nodes[nodes[x].parent].left) {
      nodes[nodes[x].parent].left = y;
      mark(nodes[x].parent);
    } else {
      nodes[nodes[x].parent].right = y;
      mark(nodes[x].parent);
    }
    nodes[y].left = x;
    nodes[x].parent = y;
    mark(x);
    mark(y);
  }

  void rotate_right(std::uint32_t x) {
    const std::uint32_t y = nodes[x].left;
    visit(y);
    nodes[x].left = nodes[y].right;
    if (nodes[y].right) {
      nodes[nodes[y].right].parent = x;
      mark(nodes[y].right);
    }
    nodes[y].parent = nodes[x].parent;
    if (!nodes[x].parent) {
      root = y;
      meta_dirty = true;
    } else if (x == nodes[nodes[x].parent].right) {
      nodes[nodes[x].parent].right = y;
      mark(nodes[x].parent);
    } else {
      nodes[nodes[x].parent].left = y;
      mark(nodes[x].parent);
    }
    nodes[y].right = x;
    nodes[x].parent = y;
    mark(x);
    mark(y);
  }

  void insert(std::uint64_t key) {
    std::uint32_t y = 0, x = root;
    while (x) {
      visit(x);
      y = x;
      if (key == nodes[x].key) {  // update payload in place
        const DataLine v = em.next_value();
        std::copy(v.bytes.begin(), v.bytes.begin() + 40, nodes[x].payload.begin());
        mark(x);
        flush();
        return;
      }
      x = key < nodes[x].key ? nodes[x].left : nodes[x].right;
    }
    const std::uint32_t z = alloc(key);
    nodes[z].parent = y;
    nodes[z].red = true;
    if (!y) {
      root = z;
      meta_dirty = true;
    } else if (key < nodes[y].key) {
      nodes[y].left = z;
      mark(y);
    } else {
      nodes[y].right = z;
      mark(y);
    }
    mark(z);

    // fixup
    std::uint32_t cur = z;
    while (cur != root && nodes[nodes[cur].parent].red) {
      const std::uint32_t p = nodes[cur].parent;
      const std::uint32_t g = nodes[p].parent;
      visit(g);
      if (p == nodes[g].left) {
        const std::uint32_t u = nodes[g].right;
        visit(u);
        if (u && nodes[u].red) {
          nodes[p].red = false;
          nodes[u].red = false;
          nodes[g].red = true;
          mark(p);
          mark(u);
          mark(g);
          cur = g;
        } else {
          if (cur == nodes[p].right) {
            cur = p;
            rotate_left(cur);
          }
          const std::uint32_t p2 = nodes[cur].parent;
          const std::uint32_t g2 = nodes[p2].parent;
          nodes[p2].red = false;
          nodes[g2].red = true;
          mark(p2);
          mark(g2);
          rotate_right(g2);
        }
      } else {
        const std::uint32_t u = nodes[g].left;
        visit(u);
        if (u && nodes[u].red) {
          nodes[p].red = false;
          nodes[u].red = false;
          nodes[g].red = true;
          mark(p);
          mark(u);
          mark(g);
          cur = g;
        } else {
          if (cur == nodes[p].left) {
            cur = p;
            rotate_right(cur);
          }
          const std::uint32_t p2 = nodes[cur].parent;
          const std::uint32_t g2 = nodes[p2].parent;
          nodes[p2].red = false;
          nodes[g2].red = true;
          mark(p2);
          mark(g2);
          rotate_left(g2);
        }
      }
    }
    if (nodes[root].red) {
      nodes[root].red = false;
      mark(root);
    }
    flush();
  }

  void flush() {
    for (auto i : dirty) em.write(addr(i), serialize(i));
    dirty.clear();
    if (meta_dirty) {
      DataLine l;
      l.set_u32(0, root);
      l.set_u32(4, static_cast<std::uint32_t>(nodes.size()));
      em.write(base, l);
      meta_dirty = false;
    }
  }
};

void gen_rbtree(Emitter& em, const TxnSpec& spec, PhysAddr base,
                std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  Rbtree t(em, base, spec.arena_bytes / kLineBytes);
  const std::uint64_t per_txn = spec.txn_bytes / kLineBytes;
  const std::uint64_t total = spec.n_txns * per_txn;
  for (std::uint64_t i = 0; i < spec.n_txns; i++) {
    em.read(base);  // consult the root pointer
    for (std::uint64_t k = 0; k < per_txn; k++) t.insert(rng() % (total * 16 + 1));
  }
}

}  // namespace

OpTrace generate_trace(WorkloadKind kind, const TxnSpec& spec, std::uint32_t core,
                       PhysAddr arena_base) {
  check_spec(spec);
  if (!is_line_aligned(arena_base))
    throw ConfigError("arena base must be line-aligned");
  OpTrace ops;
  Emitter em{ops, core, spec.value_seed};
  switch (kind) {
    case WorkloadKind::kArray: gen_array(em, spec, arena_base); break;
    case WorkloadKind::kQueue: gen_queue(em, spec, arena_base); break;
    case WorkloadKind::kBtree: gen_btree(em, spec, arena_base, spec.rng_seed); break;
    case WorkloadKind::kHash: gen_hash(em, spec, arena_base, spec.rng_seed); break;
    case WorkloadKind::kRbtree: gen_rbtree(em, spec, arena_base, spec.rng_seed); break;
  }
  return ops;
}

OpTrace interleave_cores(const std::vector<OpTrace>& per_core) {
  // Arena disjointness: no two traces may touch the same 64 MiB stride.
  std::set<std::uint64_t> windows;
  for (const auto& t : per_core) {
    std::set<std::uint64_t> mine;
    for (const auto& op : t) mine.insert(op.addr / kArenaStride);
    for (auto w : mine)
      if (!windows.insert(w).second)
        throw SimError("per-core arenas overlap in stride window " +
                       std::to_string(w));
  }
  OpTrace out;
  std::size_t total = 0;
  for (const auto& t : per_core) total += t.size();
  out.reserve(total);
  for (std::size_t i = 0; total > 0; i++)
    for (const auto& t : per_core)
      if (i < t.size()) {
        out.push_back(t[i]);
        total--;
      }
  return out;
}

OpTrace generate_multicore(WorkloadKind kind, const TxnSpec& spec,
                           std::uint32_t n_cores) {
  if (n_cores == 0) throw ConfigError("need at least one core");
  std::vector<OpTrace> per_core;
  per_core.reserve(n_cores);
  for (std::uint32_t c = 0; c < n_cores; c++) {
    TxnSpec s = spec;
    s.rng_seed = spec.rng_seed + 0x9e3779b97f4a7c15ull * c;
    s.value_seed = spec.value_seed + 0xc2b2ae3d27d4eb4full * c;
    per_core.push_back(generate_trace(kind, s, c, c * kArenaStride));
  }
  return interleave_cores(per_core);
}

OpTrace generate_uniform(std::uint64_t n_ops, std::uint64_t arena_bytes,
                         std::uint64_t seed, std::uint32_t n_cores,
                         unsigned write_pct) {
  if (arena_bytes == 0 || arena_bytes % kLineBytes != 0)
    throw ConfigError("arena_bytes must be a nonzero multiple of 64");
  std::mt19937_64 rng(seed);
  std::uint64_t vstate = seed ^ 0xa5a5a5a5a5a5a5a5ull;
  OpTrace ops;
  ops.reserve(n_ops);
  const std::uint64_t lines = arena_bytes / kLineBytes;
  for (std::uint64_t i = 0; i < n_ops; i++) {
    Op op;
    op.core = static_cast<std::uint32_t>(i % n_cores);
    op.addr = op.core * kArenaStride + (rng() % lines) * kLineBytes;
    op.is_write = (rng() % 100) < write_pct;
    if (op.is_write) {
      for (int j = 0; j < 8; j++) op.value.set_u64(8 * j, splitmix64(vstate));
      if (op.value.is_zero()) op.value.bytes[0] = 1;
    }
    ops.push_back(op);
  }
  return ops;
}

void write_trace(std::ostream& os, const OpTrace& trace) {
  for (const auto& op : trace) {
    os << op.core << ' ' << (op.is_write ? 'w' : 'r') << " 0x" << std::hex
       << op.addr << std::dec << ' ' << op.value.to_hex() << '\n';
  }
}

OpTrace read_trace(std::istream& is) {
  OpTrace ops;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    lineno++;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    Op op;
    std::string dir, addr, value;
    if (!(ss >> op.core >> dir >> addr >> value))
      throw SimError("trace line " + std::to_string(lineno) +
                     ": expected 'core op addr hexvalue'");
    if (dir == "w")
      op.is_write = true;
    else if (dir == "r")
      op.is_write = false;
    else
      throw SimError("trace line " + std::to_string(lineno) + ": op must be r|w");
    op.addr = std::stoull(addr, nullptr, 0);
    op.value = DataLine::from_hex(value);
    ops.push_back(op);
  }
  return ops;
}

void save_trace(const std::string& path, const OpTrace& trace) {
  std::ofstream f(path);
  if (!f) throw SimError("cannot open trace file for writing: " + path);
  write_trace(f, trace);
}

OpTrace load_trace(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw SimError("cannot open trace file: " + path);
  return read_trace(f);
}

}  // namespace eadrsim
