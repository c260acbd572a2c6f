#ifndef MBFV_VAULT_HPP
#define MBFV_VAULT_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mbfv/decoder.hpp"
#include "mbfv/galois.hpp"
#include "mbfv/random.hpp"

namespace mbfv::vault {

// A set of distinct non-negative integers, kept strictly increasing.
// The common currency between feature codecs and the vault.
struct FeatureSet {
  std::vector<uint32_t> elements;

  FeatureSet() = default;
  explicit FeatureSet(std::vector<uint32_t> sorted_distinct);

  // Normalizes arbitrary values: sorts and removes duplicates.
  static FeatureSet from_values(std::vector<uint32_t> values);

  size_t size() const { return elements.size(); }
  bool contains(uint32_t v) const;
};

// Number of common elements; both sets sorted, linear merge.
size_t overlap(const FeatureSet& a, const FeatureSet& b);

// The secret polynomial kappa together with its degree bound k.
// deg(poly) < k; trailing zero coefficients are implicit in the bound.
struct SecretPoly {
  gf::FieldPoly poly;
  uint32_t k = 0;
};

inline constexpr uint8_t kKdfNone = 0;
inline constexpr uint8_t kKdfSha1Trunc128 = 1;
inline constexpr uint8_t kCipherNone = 0;
inline constexpr uint8_t kCipherAes128Cbc = 1;

struct CipherEnvelope {
  uint8_t kdf_id = kKdfSha1Trunc128;
  uint8_t cipher_id = kCipherAes128Cbc;
  std::array<uint8_t, 16> iv{};
  std::vector<uint8_t> ciphertext;  // ceil(t*e/128) blocks of 16 bytes
};

// Locked template: parameters in the clear, the monic polynomial
// V(X) = kappa(X) + prod (X - a) as its t non-leading coefficients
// (or their cipher envelope), and the hash of kappa.
struct VaultRecord {
  gf::FieldSpec field;
  uint32_t t = 0;
  uint32_t k = 0;
  uint64_t codec_fingerprint = 0;
  std::array<uint8_t, 32> secret_hash{};
  std::vector<uint32_t> coeffs;  // v_0..v_{t-1}; empty while sealed
  std::optional<CipherEnvelope> envelope;

  bool sealed() const { return envelope.has_value(); }
};

struct DecoderChoice {
  enum class Kind { kBruteforce, kGs };
  Kind kind = Kind::kGs;
  decode::GsParams gs;
  uint64_t bruteforce_budget = 1'000'000;
};

struct VerifyOutcome {
  bool accepted = false;
  std::optional<SecretPoly> recovered;
  double decode_ops = 0.0;
  std::string reason;  // rejection cause or diagnostics
};

// SHA-256 of the canonical secret encoding: u32-LE k, then k coefficients
// of e bits each, LSB first, lowest degree first.
std::array<uint8_t, 32> hash_secret(const SecretPoly& secret);

// Binds a fresh uniformly random secret polynomial to the feature set.
// Requires k < |features| and all elements < 2^e. The record never holds
// kappa in the clear; the returned SecretPoly is caller-side key material.
std::pair<VaultRecord, SecretPoly> enroll(const FeatureSet& features, uint32_t k,
                                          const gf::Field& field, RandomSource& rng);

// Pairs {(b, V(b))} for a probe set. Requires an unsealed record.
decode::PointList make_unlocking_set(const VaultRecord& record,
                                     const gf::Field& field,
                                     const FeatureSet& probe);

// Runs the chosen decoder on the unlocking set and accepts iff some
// candidate's hash equals the stored secret hash. Decoder parameter
// infeasibility (e.g. |probe| < k) is reported as a rejection with reason.
VerifyOutcome verify(const VaultRecord& record, const gf::Field& field,
                     const FeatureSet& probe, const DecoderChoice& decoder);
VerifyOutcome verify(const VaultRecord& record, const FeatureSet& probe,
                     const DecoderChoice& decoder);

// Binary record layout (little-endian, byte offsets):
//   0  magic "MBFV" | 4 version=1 | 5 flags (bit0 envelope) | 6 kdf_id
//   7  cipher_id | 8 e u16 | 10 reduction u64 | 18 t u32 | 22 k u32
//   26 secret_hash 32B | 58 codec_fingerprint u64 | 66 payload
// payload plain: t coefficients of ceil(e/8) bytes each;
// payload sealed: iv 16B, then ceil(t*e/128) * 16 ciphertext bytes.
std::vector<uint8_t> serialize(const VaultRecord& record);
VaultRecord parse(std::span<const uint8_t> data);

// Exact serialized size for the given parameters.
size_t serialized_size(uint32_t t, uint16_t e, bool sealed);

}  // namespace mbfv::vault

#endif
