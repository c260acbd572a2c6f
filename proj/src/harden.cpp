#include "mbfv/harden.hpp"

#include <cstring>

#include "mbfv/bitpack.hpp"
#include "mbfv/digest.hpp"

namespace mbfv::harden {

std::array<uint8_t, 16> derive_key(std::span<const uint8_t> password) {
  const auto digest = sha1(password);
  std::array<uint8_t, 16> key;
  std::memcpy(key.data(), digest.data(), 16);
  return key;
}

std::array<uint8_t, 16> derive_key(std::string_view password) {
  return derive_key(std::span<const uint8_t>(
      reinterpret_cast<const uint8_t*>(password.data()), password.size()));
}

vault::VaultRecord seal(const vault::VaultRecord& record,
                        std::string_view password, RandomSource& rng) {
  if (record.sealed()) throw EnvelopeError("record is already sealed");
  if (record.coeffs.size() != record.t) {
    throw FormatError("record coefficient count does not match t");
  }

  const unsigned e = record.field.e;
  const size_t payload_bits = size_t{record.t} * e;
  const size_t padded_bits = (payload_bits + 127) / 128 * 128;

  BitWriter w;
  for (uint32_t c : record.coeffs) w.append(c, e);
  // Random padding bits up to the block boundary.
  size_t pad = padded_bits - payload_bits;
  while (pad > 0) {
    const unsigned chunk = pad >= 64 ? 64 : static_cast<unsigned>(pad);
    w.append(rng.next_u64(), chunk);
    pad -= chunk;
  }

  vault::CipherEnvelope env;
  rng.fill(env.iv);
  env.ciphertext = aes128_cbc_encrypt(derive_key(password), env.iv, w.bytes());

  vault::VaultRecord out = record;
  out.coeffs.clear();
  out.envelope = std::move(env);
  return out;
}

vault::VaultRecord open(const vault::VaultRecord& record, std::string_view password) {
  if (!record.sealed()) throw EnvelopeError("record is not sealed");
  const auto& env = *record.envelope;
  if (env.kdf_id != vault::kKdfSha1Trunc128 ||
      env.cipher_id != vault::kCipherAes128Cbc) {
    throw FormatError("unknown envelope algorithm ids");
  }
  const unsigned e = record.field.e;
  const size_t payload_bits = size_t{record.t} * e;
  const size_t padded_bytes = (payload_bits + 127) / 128 * 16;
  if (env.ciphertext.size() != padded_bytes) {
    throw FormatError("envelope ciphertext length mismatch");
  }

  const auto plain = aes128_cbc_decrypt(derive_key(password), env.iv, env.ciphertext);
  BitReader r(plain);
  vault::VaultRecord out = record;
  out.envelope.reset();
  out.coeffs.resize(record.t);
  for (uint32_t i = 0; i < record.t; ++i) {
    out.coeffs[i] = static_cast<uint32_t>(r.read(e));
  }
  // Remaining ceil(te/L)*L - te bits are padding and are dismissed.
  return out;
}

}  // namespace mbfv::harden
