#include "eadrsim/block_cipher.hpp"

#include <openssl/evp.h>

#include <stdexcept>

#include "eadrsim/types.hpp"

namespace eadrsim {

Aes128::Aes128(const AesKey& key) : key_(key) {
  EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
  if (!ctx) throw std::runtime_error("EVP_CIPHER_CTX_new failed");
  if (EVP_EncryptInit_ex(ctx, EVP_aes_128_ecb(), nullptr, key_.data(), nullptr) != 1) {
    EVP_CIPHER_CTX_free(ctx);
    throw std::runtime_error("EVP_EncryptInit_ex(aes-128-ecb) failed");
  }
  EVP_CIPHER_CTX_set_padding(ctx, 0);
  ctx_ = ctx;
}

Aes128::~Aes128() { EVP_CIPHER_CTX_free(static_cast<EVP_CIPHER_CTX*>(ctx_)); }

void Aes128::encrypt_blocks(std::uint8_t* buf, std::size_t n_blocks) const {
  auto* ctx = static_cast<EVP_CIPHER_CTX*>(ctx_);
  int outl = 0;
  if (EVP_EncryptUpdate(ctx, buf, &outl, buf, static_cast<int>(n_blocks * 16)) != 1 ||
      outl != static_cast<int>(n_blocks * 16))
    throw std::runtime_error("EVP_EncryptUpdate failed");
}

Block16 Aes128::encrypt_block(const Block16& in) const {
  Block16 out = in;
  encrypt_blocks(out.data(), 1);
  return out;
}

AesKey parse_key_hex(const std::string& hex) {
  if (hex.size() != 32)
    throw ConfigError("AES-128 key must be 32 hex digits, got " +
                      std::to_string(hex.size()));
  auto val = [&](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw ConfigError(std::string("bad hex digit in key: '") + c + "'");
  };
  AesKey k{};
  for (std::size_t i = 0; i < 16; i++)
    k[i] = static_cast<std::uint8_t>((val(hex[2 * i]) << 4) | val(hex[2 * i + 1]));
  return k;
}

}  // namespace eadrsim
