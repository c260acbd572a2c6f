#include "mbfv/digest.hpp"

#include <openssl/evp.h>

#include <memory>
#include <stdexcept>

namespace mbfv {

namespace {

using CtxPtr = std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)>;

template <size_t N>
std::array<uint8_t, N> evp_digest(const EVP_MD* md, std::span<const uint8_t> data) {
  std::array<uint8_t, N> out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, md, nullptr) != 1 ||
      len != N) {
    throw std::runtime_error("digest computation failed");
  }
  return out;
}

std::vector<uint8_t> aes128_cbc(bool enc, const std::array<uint8_t, 16>& key,
                                const std::array<uint8_t, 16>& iv,
                                std::span<const uint8_t> data) {
  if (data.size() % 16 != 0) {
    throw std::invalid_argument("AES-CBC payload must be whole blocks");
  }
  CtxPtr ctx(EVP_CIPHER_CTX_new(), EVP_CIPHER_CTX_free);
  if (!ctx) throw std::runtime_error("EVP context allocation failed");
  if (EVP_CipherInit_ex(ctx.get(), EVP_aes_128_cbc(), nullptr, key.data(), iv.data(),
                        enc ? 1 : 0) != 1) {
    throw std::runtime_error("EVP cipher init failed");
  }
  EVP_CIPHER_CTX_set_padding(ctx.get(), 0);
  std::vector<uint8_t> out(data.size() + 16);
  int len1 = 0, len2 = 0;
  if (EVP_CipherUpdate(ctx.get(), out.data(), &len1, data.data(),
                       static_cast<int>(data.size())) != 1 ||
      EVP_CipherFinal_ex(ctx.get(), out.data() + len1, &len2) != 1) {
    throw std::runtime_error("EVP cipher operation failed");
  }
  out.resize(static_cast<size_t>(len1) + len2);
  return out;
}

}  // namespace

std::array<uint8_t, 32> sha256(std::span<const uint8_t> data) {
  return evp_digest<32>(EVP_sha256(), data);
}

std::array<uint8_t, 20> sha1(std::span<const uint8_t> data) {
  return evp_digest<20>(EVP_sha1(), data);
}

std::vector<uint8_t> aes128_cbc_encrypt(const std::array<uint8_t, 16>& key,
                                        const std::array<uint8_t, 16>& iv,
                                        std::span<const uint8_t> data) {
  return aes128_cbc(true, key, iv, data);
}

std::vector<uint8_t> aes128_cbc_decrypt(const std::array<uint8_t, 16>& key,
                                        const std::array<uint8_t, 16>& iv,
                                        std::span<const uint8_t> data) {
  return aes128_cbc(false, key, iv, data);
}

std::string hex_encode(std::span<const uint8_t> data) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (uint8_t b : data) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

}  // namespace mbfv
