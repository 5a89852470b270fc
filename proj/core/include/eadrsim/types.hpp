#pragma once

// Core value types shared by every module: 64-byte lines, physical
// addresses, scheme/model identifiers, and the adversary-visible bus trace.

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace eadrsim {

inline constexpr std::uint64_t kLineBytes = 64;
inline constexpr std::uint64_t kRegionLines = 64;          // 4 KiB counter region
inline constexpr std::uint64_t kRegionBytes = kRegionLines * kLineBytes;

using PhysAddr = std::uint64_t;

// Errors raised by simulator components on contract violations
// (misaligned addresses, out-of-range accesses, bad configs, ...).
class SimError : public std::runtime_error {
 public:
  explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public SimError {
 public:
  explicit ConfigError(const std::string& what) : SimError(what) {}
};

inline constexpr bool is_line_aligned(PhysAddr a) { return (a % kLineBytes) == 0; }
inline constexpr PhysAddr line_base(PhysAddr a) { return a - (a % kLineBytes); }
inline constexpr PhysAddr region_base(PhysAddr a) { return a - (a % kRegionBytes); }

enum class SchemeId { kBaseline, kMcCme, kEadrCme, kBbe, kSepencr };
enum class EadrModel { kAllOperation, kWriteComputeOrder, kWriteOnly };
enum class OpClass { kRead, kCompute, kWrite };

const char* to_string(SchemeId s);
const char* to_string(EadrModel m);
const char* to_string(OpClass c);
SchemeId parse_scheme(const std::string& name);
EadrModel parse_model(const std::string& name);

// One cache line of data. Comparable, XOR-able, hex-serializable.
struct DataLine {
  std::array<std::uint8_t, kLineBytes> bytes{};

  bool operator==(const DataLine&) const = default;

  bool is_zero() const {
    for (auto b : bytes)
      if (b != 0) return false;
    return true;
  }

  DataLine& operator^=(const DataLine& o) {
    for (std::size_t i = 0; i < kLineBytes; i++) bytes[i] ^= o.bytes[i];
    return *this;
  }
  friend DataLine operator^(DataLine a, const DataLine& b) { return a ^= b; }

  std::uint64_t get_u64(std::size_t byte_off) const;
  void set_u64(std::size_t byte_off, std::uint64_t v);
  std::uint32_t get_u32(std::size_t byte_off) const;
  void set_u32(std::size_t byte_off, std::uint32_t v);

  std::string to_hex() const;
  static DataLine from_hex(const std::string& hex);
};

// FNV-1a 64-bit, used for content fingerprints and config hashes.
inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

inline std::uint64_t fnv1a64(const std::uint8_t* p, std::size_t n,
                             std::uint64_t h = kFnvOffset) {
  for (std::size_t i = 0; i < n; i++) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}
inline std::uint64_t fnv1a64(const std::string& s, std::uint64_t h = kFnvOffset) {
  return fnv1a64(reinterpret_cast<const std::uint8_t*>(s.data()), s.size(), h);
}
inline std::uint64_t fnv1a64(const DataLine& l, std::uint64_t h = kFnvOffset) {
  return fnv1a64(l.bytes.data(), l.bytes.size(), h);
}
inline std::uint64_t fnv1a64_u64(std::uint64_t v, std::uint64_t h = kFnvOffset) {
  std::uint8_t b[8];
  for (int i = 0; i < 8; i++) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
  return fnv1a64(b, 8, h);
}

// splitmix64: cheap deterministic stream for line payloads.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Everything the memory-bus adversary observes: every transfer that crosses
// the persistence boundary, plus NVM content fingerprints at marked steps.
enum class BusDir { kToNvm, kFromNvm };
enum class BusClass { kUserData, kSecurityMetadata };

struct BusEvent {
  BusDir dir;
  PhysAddr addr;
  DataLine payload;
  std::uint64_t step;  // ops completed before the in-flight op started
  BusClass cls;
};

struct AdversaryTrace {
  std::vector<BusEvent> events;
  std::map<std::uint64_t, std::uint64_t> nvm_snapshots;  // step -> content hash
};

}  // namespace eadrsim
