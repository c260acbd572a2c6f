#ifndef MBFV_DIGEST_HPP
#define MBFV_DIGEST_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mbfv {

std::array<uint8_t, 32> sha256(std::span<const uint8_t> data);
std::array<uint8_t, 20> sha1(std::span<const uint8_t> data);

// AES-128-CBC on whole blocks; data length must be a multiple of 16.
// No cipher-level padding: the caller pads explicitly.
std::vector<uint8_t> aes128_cbc_encrypt(const std::array<uint8_t, 16>& key,
                                        const std::array<uint8_t, 16>& iv,
                                        std::span<const uint8_t> data);
std::vector<uint8_t> aes128_cbc_decrypt(const std::array<uint8_t, 16>& key,
                                        const std::array<uint8_t, 16>& iv,
                                        std::span<const uint8_t> data);

std::string hex_encode(std::span<const uint8_t> data);

}  // namespace mbfv

#endif
