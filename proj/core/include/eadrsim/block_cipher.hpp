#pragma once

// Thin AES-128-ECB block wrapper (OpenSSL libcrypto). The pad generator
// encrypts seed blocks; nothing here chains or pads.

#include <array>
#include <cstdint>
#include <string>

namespace eadrsim {

using Block16 = std::array<std::uint8_t, 16>;
using AesKey = std::array<std::uint8_t, 16>;

class Aes128 {
 public:
  explicit Aes128(const AesKey& key);
  ~Aes128();
  Aes128(const Aes128&) = delete;
  Aes128& operator=(const Aes128&) = delete;

  Block16 encrypt_block(const Block16& in) const;

  // Encrypt n consecutive 16-byte blocks in place (one libcrypto call).
  void encrypt_blocks(std::uint8_t* buf, std::size_t n_blocks) const;

  const AesKey& key() const { return key_; }

 private:
  AesKey key_;
  void* ctx_;  // EVP_CIPHER_CTX
};

AesKey parse_key_hex(const std::string& hex);

}  // namespace eadrsim
