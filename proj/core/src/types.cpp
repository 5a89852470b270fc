#include "eadrsim/types.hpp"

namespace eadrsim {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_val(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  throw SimError(std::string("bad hex digit '") + c + "'");
}
}  // namespace

const char* to_string(SchemeId s) {
  switch (s) {
    case SchemeId::kBaseline: return "baseline";
    case SchemeId::kMcCme: return "mc-cme";
    case SchemeId::kEadrCme: return "eadr-cme";
    case SchemeId::kBbe: return "bbe";
    case SchemeId::kSepencr: return "sepencr";
  }
  return "?";
}

const char* to_string(EadrModel m) {
  switch (m) {
    case EadrModel::kAllOperation: return "all-operation";
    case EadrModel::kWriteComputeOrder: return "write-compute-order";
    case EadrModel::kWriteOnly: return "write-only";
  }
  return "?";
}

const char* to_string(OpClass c) {
  switch (c) {
    case OpClass::kRead: return "read";
    case OpClass::kCompute: return "compute";
    case OpClass::kWrite: return "write";
  }
  return "?";
}

SchemeId parse_scheme(const std::string& name) {
  if (name == "baseline") return SchemeId::kBaseline;
  if (name == "mc-cme") return SchemeId::kMcCme;
  if (name == "eadr-cme") return SchemeId::kEadrCme;
  if (name == "bbe") return SchemeId::kBbe;
  if (name == "sepencr") return SchemeId::kSepencr;
  throw ConfigError("unknown scheme '" + name +
                    "' (expected baseline|mc-cme|eadr-cme|bbe|sepencr)");
}

EadrModel parse_model(const std::string& name) {
  if (name == "all-operation") return EadrModel::kAllOperation;
  if (name == "write-compute-order") return EadrModel::kWriteComputeOrder;
  if (name == "write-only") return EadrModel::kWriteOnly;
  throw ConfigError("unknown eADR model '" + name +
                    "' (expected all-operation|write-compute-order|write-only)");
}

std::uint64_t DataLine::get_u64(std::size_t off) const {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; i--) v = (v << 8) | bytes[off + i];
  return v;
}

void DataLine::set_u64(std::size_t off, std::uint64_t v) {
  for (int i = 0; i < 8; i++) bytes[off + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint32_t DataLine::get_u32(std::size_t off) const {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; i--) v = (v << 8) | bytes[off + i];
  return v;
}

void DataLine::set_u32(std::size_t off, std::uint32_t v) {
  for (int i = 0; i < 4; i++) bytes[off + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::string DataLine::to_hex() const {
  std::string s(2 * kLineBytes, '0');
  for (std::size_t i = 0; i < kLineBytes; i++) {
    s[2 * i] = kHexDigits[bytes[i] >> 4];
    s[2 * i + 1] = kHexDigits[bytes[i] & 0xf];
  }
  return s;
}

DataLine DataLine::from_hex(const std::string& hex) {
  if (hex.size() != 2 * kLineBytes)
    throw SimError("line hex must be " + std::to_string(2 * kLineBytes) +
                   " digits, got " + std::to_string(hex.size()));
  DataLine l;
  for (std::size_t i = 0; i < kLineBytes; i++)
    l.bytes[i] = static_cast<std::uint8_t>((hex_val(hex[2 * i]) << 4) |
                                           hex_val(hex[2 * i + 1]));
  return l;
}

}  // namespace eadrsim
