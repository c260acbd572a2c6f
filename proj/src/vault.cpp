#include "mbfv/vault.hpp"

#include <algorithm>
#include <cstring>

#include "mbfv/bitpack.hpp"
#include "mbfv/digest.hpp"

namespace mbfv::vault {

namespace {

constexpr char kMagic[4] = {'M', 'B', 'F', 'V'};
constexpr uint8_t kVersion = 1;
constexpr size_t kHeaderSize = 66;

void put_u16(std::vector<uint8_t>& b, uint16_t v) {
  b.push_back(v & 0xFF);
  b.push_back(v >> 8);
}
void put_u32(std::vector<uint8_t>& b, uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xFF);
}
void put_u64(std::vector<uint8_t>& b, uint64_t v) {
  for (int i = 0; i < 8; ++i) b.push_back((v >> (8 * i)) & 0xFF);
}
uint64_t get_le(std::span<const uint8_t> d, size_t off, unsigned nbytes) {
  uint64_t v = 0;
  for (unsigned i = 0; i < nbytes; ++i) v |= uint64_t{d[off + i]} << (8 * i);
  return v;
}

size_t coeff_bytes(uint16_t e) { return (e + 7) / 8; }

}  // namespace

FeatureSet::FeatureSet(std::vector<uint32_t> sorted_distinct)
    : elements(std::move(sorted_distinct)) {
  for (size_t i = 1; i < elements.size(); ++i) {
    if (elements[i - 1] >= elements[i]) {
      throw ParameterError("feature set must be strictly increasing");
    }
  }
}

FeatureSet FeatureSet::from_values(std::vector<uint32_t> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  FeatureSet s;
  s.elements = std::move(values);
  return s;
}

bool FeatureSet::contains(uint32_t v) const {
  return std::binary_search(elements.begin(), elements.end(), v);
}

size_t overlap(const FeatureSet& a, const FeatureSet& b) {
  size_t i = 0, j = 0, n = 0;
  while (i < a.elements.size() && j < b.elements.size()) {
    if (a.elements[i] < b.elements[j]) {
      ++i;
    } else if (a.elements[i] > b.elements[j]) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

std::array<uint8_t, 32> hash_secret(const SecretPoly& secret) {
  const unsigned e = secret.poly.field().degree();
  BitWriter w;
  w.append(secret.k, 32);
  for (uint32_t i = 0; i < secret.k; ++i) w.append(secret.poly.coeff(i), e);
  return sha256(w.bytes());
}

std::pair<VaultRecord, SecretPoly> enroll(const FeatureSet& features, uint32_t k,
                                          const gf::Field& field, RandomSource& rng) {
  if (k < 1) throw ParameterError("polynomial degree bound must be >= 1");
  if (features.size() <= k) {
    throw ParameterError("feature set must be larger than the degree bound k");
  }
  for (uint32_t v : features.elements) {
    if (v > field.max_value()) {
      throw EncodingOverflowError("feature element does not fit the field");
    }
  }

  std::vector<uint32_t> kappa_coeffs(k);
  for (auto& c : kappa_coeffs) c = static_cast<uint32_t>(rng.uniform(field.size()));
  SecretPoly secret{gf::FieldPoly(field, std::move(kappa_coeffs)), k};

  const gf::FieldPoly locking = gf::poly_from_roots(field, features.elements);
  const gf::FieldPoly v_poly = gf::poly_add(secret.poly, locking);

  VaultRecord rec;
  rec.field = field.spec();
  rec.t = static_cast<uint32_t>(features.size());
  rec.k = k;
  rec.secret_hash = hash_secret(secret);
  rec.coeffs.resize(rec.t);
  for (uint32_t i = 0; i < rec.t; ++i) rec.coeffs[i] = v_poly.coeff(i);
  return {std::move(rec), std::move(secret)};
}

decode::PointList make_unlocking_set(const VaultRecord& record,
                                     const gf::Field& field,
                                     const FeatureSet& probe) {
  if (record.sealed()) {
    throw EnvelopeError("record is sealed; open it with the password first");
  }
  if (!(record.field == field.spec())) {
    throw FieldMismatchError("field does not match the record");
  }
  if (record.coeffs.size() != record.t) {
    throw FormatError("record coefficient count does not match t");
  }
  std::vector<uint32_t> v_coeffs(record.coeffs);
  v_coeffs.push_back(1);  // implicit monic leading term
  const gf::FieldPoly v_poly(field, std::move(v_coeffs));

  decode::PointList pairs;
  pairs.reserve(probe.size());
  for (uint32_t b : probe.elements) {
    if (b > field.max_value()) {
      throw EncodingOverflowError("probe element does not fit the field");
    }
    pairs.push_back({b, gf::poly_eval(v_poly, b)});
  }
  return pairs;
}

VerifyOutcome verify(const VaultRecord& record, const gf::Field& field,
                     const FeatureSet& probe, const DecoderChoice& decoder) {
  VerifyOutcome out;
  const decode::PointList pairs = make_unlocking_set(record, field, probe);
  decode::DecodeResult decoded;
  try {
    if (decoder.kind == DecoderChoice::Kind::kBruteforce) {
      decoded = decode::bruteforce_decode(field, pairs, record.k,
                                          decoder.bruteforce_budget);
    } else {
      decoded = decode::gs_decode(field, pairs, record.k, decoder.gs);
    }
  } catch (const ParameterError& e) {
    out.reason = std::string("decoder parameters infeasible: ") + e.what();
    return out;
  }
  out.decode_ops = decoded.ops;

  size_t matches = 0;
  for (auto& cand : decoded.candidates) {
    SecretPoly sp{cand, record.k};
    if (hash_secret(sp) == record.secret_hash) {
      ++matches;
      if (!out.accepted) {
        out.accepted = true;
        out.recovered = std::move(sp);
      }
    }
  }
  if (matches > 1) {
    out.reason = "multiple candidates matched the secret hash; first kept";
  } else if (!out.accepted) {
    out.reason = "no decoded candidate matched the secret hash";
  }
  return out;
}

VerifyOutcome verify(const VaultRecord& record, const FeatureSet& probe,
                     const DecoderChoice& decoder) {
  const gf::Field field(record.field);
  return verify(record, field, probe, decoder);
}

size_t serialized_size(uint32_t t, uint16_t e, bool sealed) {
  if (sealed) {
    const size_t bits = size_t{t} * e;
    return kHeaderSize + 16 + (bits + 127) / 128 * 16;
  }
  return kHeaderSize + size_t{t} * coeff_bytes(e);
}

std::vector<uint8_t> serialize(const VaultRecord& record) {
  std::vector<uint8_t> out;
  out.reserve(serialized_size(record.t, record.field.e, record.sealed()));
  out.insert(out.end(), kMagic, kMagic + 4);
  out.push_back(kVersion);
  out.push_back(record.sealed() ? 0x01 : 0x00);
  out.push_back(record.sealed() ? record.envelope->kdf_id : kKdfNone);
  out.push_back(record.sealed() ? record.envelope->cipher_id : kCipherNone);
  put_u16(out, record.field.e);
  put_u64(out, record.field.reduction);
  put_u32(out, record.t);
  put_u32(out, record.k);
  out.insert(out.end(), record.secret_hash.begin(), record.secret_hash.end());
  put_u64(out, record.codec_fingerprint);

  if (record.sealed()) {
    const auto& env = *record.envelope;
    out.insert(out.end(), env.iv.begin(), env.iv.end());
    out.insert(out.end(), env.ciphertext.begin(), env.ciphertext.end());
  } else {
    if (record.coeffs.size() != record.t) {
      throw FormatError("record coefficient count does not match t");
    }
    const size_t cb = coeff_bytes(record.field.e);
    for (uint32_t c : record.coeffs) {
      for (size_t i = 0; i < cb; ++i) out.push_back((c >> (8 * i)) & 0xFF);
    }
  }
  if (out.size() != serialized_size(record.t, record.field.e, record.sealed())) {
    throw FormatError("serialized record size mismatch");
  }
  return out;
}

VaultRecord parse(std::span<const uint8_t> data) {
  if (data.size() < kHeaderSize) throw FormatError("record truncated");
  if (std::memcmp(data.data(), kMagic, 4) != 0) throw FormatError("bad record magic");
  if (data[4] != kVersion) throw FormatError("unsupported record version");
  const uint8_t flags = data[5];
  if (flags & ~0x01) throw FormatError("reserved flag bits set");
  const bool sealed = flags & 0x01;

  VaultRecord rec;
  const uint8_t kdf_id = data[6];
  const uint8_t cipher_id = data[7];
  rec.field.e = static_cast<uint16_t>(get_le(data, 8, 2));
  rec.field.reduction = get_le(data, 10, 8);
  rec.t = static_cast<uint32_t>(get_le(data, 18, 4));
  rec.k = static_cast<uint32_t>(get_le(data, 22, 4));
  std::copy(data.begin() + 26, data.begin() + 58, rec.secret_hash.begin());
  rec.codec_fingerprint = get_le(data, 58, 8);

  if (rec.field.e < 2 || rec.field.e > 32 ||
      (rec.field.reduction >> rec.field.e) != 1 ||
      !gf::is_irreducible_gf2(rec.field.reduction)) {
    throw FormatError("invalid field spec in record");
  }
  if (rec.k >= rec.t) throw FormatError("record requires k < t");
  if (data.size() != serialized_size(rec.t, rec.field.e, sealed)) {
    throw FormatError("record payload size mismatch");
  }
  if (!sealed && (kdf_id != kKdfNone || cipher_id != kCipherNone)) {
    throw FormatError("algorithm ids set on a plain record");
  }

  if (sealed) {
    CipherEnvelope env;
    env.kdf_id = kdf_id;
    env.cipher_id = cipher_id;
    if (env.kdf_id != kKdfSha1Trunc128 || env.cipher_id != kCipherAes128Cbc) {
      throw FormatError("unknown envelope algorithm ids");
    }
    std::copy(data.begin() + kHeaderSize, data.begin() + kHeaderSize + 16,
              env.iv.begin());
    env.ciphertext.assign(data.begin() + kHeaderSize + 16, data.end());
    rec.envelope = std::move(env);
  } else {
    const size_t cb = coeff_bytes(rec.field.e);
    rec.coeffs.resize(rec.t);
    for (uint32_t i = 0; i < rec.t; ++i) {
      rec.coeffs[i] =
          static_cast<uint32_t>(get_le(data, kHeaderSize + size_t{i} * cb, cb));
      if (rec.field.e < 32 && rec.coeffs[i] >> rec.field.e) {
        throw FormatError("coefficient exceeds field capacity");
      }
    }
  }
  return rec;
}

}  // namespace mbfv::vault
