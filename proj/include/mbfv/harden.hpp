#ifndef MBFV_HARDEN_HPP
#define MBFV_HARDEN_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

#include "mbfv/random.hpp"
#include "mbfv/vault.hpp"

namespace mbfv::harden {

// AES-128 key = first 128 bits of SHA-1(password). Kept for fidelity with
// the construction's published procedure; the envelope records the kdf id
// so a stronger derivation can coexist. An empty password is allowed but
// adds no entropy.
std::array<uint8_t, 16> derive_key(std::span<const uint8_t> password);
std::array<uint8_t, 16> derive_key(std::string_view password);

// Encrypts the concatenated e-bit coefficient encodings v_0|...|v_{t-1},
// padded with random bits to a whole number of 128-bit blocks, under
// AES-128-CBC with a fresh random iv. Parameters, field spec and the secret
// hash stay in the clear. Throws EnvelopeError on an already-sealed record.
vault::VaultRecord seal(const vault::VaultRecord& record,
                        std::string_view password, RandomSource& rng);

// Decrypts and reassembles the first t*e bits into coefficients. Always
// structurally succeeds: a wrong password yields a spurious polynomial and
// verification later fails on the hash check. No integrity tag by design —
// the secret hash is the only accept signal, so the password entropy fully
// contributes to false-accept security.
vault::VaultRecord open(const vault::VaultRecord& record, std::string_view password);

}  // namespace mbfv::harden

#endif
