#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "mbfv/digest.hpp"
#include "mbfv/harden.hpp"

using namespace mbfv;
using namespace mbfv::vault;

namespace {

FeatureSet random_features(size_t n, const gf::Field& f, RandomSource& rng) {
  std::set<uint32_t> s;
  while (s.size() < n) s.insert(static_cast<uint32_t>(rng.uniform(f.size())));
  return FeatureSet(std::vector<uint32_t>(s.begin(), s.end()));
}

VaultRecord sample_record(const gf::Field& f, size_t t, uint32_t k,
                          RandomSource& rng) {
  return enroll(random_features(t, f, rng), k, f, rng).first;
}

}  // namespace

TEST_CASE("key derivation follows the published procedure") {
  // First 16 bytes of the SHA-1 test-vector digest of "abc".
  CHECK(hex_encode(harden::derive_key("abc")) == "a9993e364706816aba3e25717850c26c");
  CHECK(harden::derive_key("abc") == harden::derive_key("abc"));
  CHECK(harden::derive_key("") == harden::derive_key(std::string_view{}));

  SeededRandom rng(2026);
  for (int trial = 0; trial < 200; ++trial) {
    std::string pw(8 + rng.uniform(16), '\0');
    for (auto& ch : pw) ch = static_cast<char>(rng.uniform(256));
    std::string pw2 = pw;
    pw2[rng.uniform(pw2.size())] ^= static_cast<char>(1 + rng.uniform(255));
    CHECK(harden::derive_key(pw) != harden::derive_key(pw2));
  }
}

TEST_CASE("seal/open round trip is bit exact") {
  SeededRandom rng(7);
  for (const gf::FieldSpec spec : {gf::FieldSpec{8, 0x11B}, gf::FieldSpec::standard(16)}) {
    const gf::Field f(spec);
    for (int trial = 0; trial < 60; ++trial) {
      const size_t t = 6 + rng.uniform(60);
      const auto k = static_cast<uint32_t>(1 + rng.uniform(t - 1));
      const VaultRecord plain = sample_record(f, t, k, rng);
      const VaultRecord sealed = harden::seal(plain, "hunter2", rng);

      CHECK(sealed.sealed());
      CHECK(sealed.coeffs.empty());
      CHECK(sealed.t == plain.t);
      CHECK(sealed.secret_hash == plain.secret_hash);

      const VaultRecord opened = harden::open(sealed, "hunter2");
      CHECK_FALSE(opened.sealed());
      CHECK(opened.coeffs == plain.coeffs);
      CHECK(serialize(opened) == serialize(plain));
    }
  }
}

TEST_CASE("envelope size: ceil(te/128) blocks plus one iv block") {
  const gf::Field f(gf::FieldSpec::standard(16));
  SeededRandom rng(9);

  // t*e = 931*16 = 14896 bits -> 117 blocks = 14976 bits of ciphertext.
  const VaultRecord big = sample_record(f, 931, 400, rng);
  const VaultRecord sealed = harden::seal(big, "pw", rng);
  CHECK(sealed.envelope->ciphertext.size() == 117 * 16);
  CHECK(serialize(sealed).size() == 66 + 16 + 117 * 16);

  // t*e = 8*16 = 128 bits exactly: no padding, a single block.
  const VaultRecord small = sample_record(f, 8, 3, rng);
  const VaultRecord sealed_small = harden::seal(small, "pw", rng);
  CHECK(sealed_small.envelope->ciphertext.size() == 16);

  CHECK(serialized_size(10, 16, true) == 66 + 16 + 32);  // 160 bits -> 2 blocks
}

TEST_CASE("sealed records round trip through serialization") {
  const gf::Field f({8, 0x11B});
  SeededRandom rng(13);
  const VaultRecord plain = sample_record(f, 20, 5, rng);
  const VaultRecord sealed = harden::seal(plain, "secret", rng);

  const auto bytes = serialize(sealed);
  CHECK(bytes[5] == 0x01);  // envelope flag
  const VaultRecord back = parse(bytes);
  REQUIRE(back.sealed());
  CHECK(back.envelope->iv == sealed.envelope->iv);
  CHECK(back.envelope->ciphertext == sealed.envelope->ciphertext);

  const VaultRecord opened = harden::open(back, "secret");
  CHECK(opened.coeffs == plain.coeffs);
}

TEST_CASE("wrong password yields well-formed spurious coefficients") {
  const gf::Field f(gf::FieldSpec::standard(16));
  SeededRandom rng(17);
  const VaultRecord plain = sample_record(f, 40, 10, rng);
  const VaultRecord sealed = harden::seal(plain, "right", rng);

  const VaultRecord spurious = harden::open(sealed, "wrong");
  CHECK(spurious.coeffs.size() == plain.t);
  CHECK(spurious.coeffs != plain.coeffs);
  for (uint32_t c : spurious.coeffs) CHECK(c <= f.max_value());
}

TEST_CASE("wrong password makes genuine probes verify as rejects") {
  const gf::Field f(gf::FieldSpec::standard(16));
  SeededRandom rng(19);
  int accepts = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const FeatureSet features = random_features(24, f, rng);
    auto [record, secret] = enroll(features, 6, f, rng);
    const VaultRecord sealed = harden::seal(record, "correct horse", rng);
    const VaultRecord spurious = harden::open(sealed, "battery staple");
    if (verify(spurious, f, features, DecoderChoice{}).accepted) ++accepts;
  }
  CHECK(accepts == 0);
}

TEST_CASE("envelope state errors") {
  const gf::Field f({8, 0x11B});
  SeededRandom rng(23);
  const VaultRecord plain = sample_record(f, 12, 3, rng);
  const VaultRecord sealed = harden::seal(plain, "pw", rng);

  CHECK_THROWS_AS(harden::seal(sealed, "pw", rng), EnvelopeError);
  CHECK_THROWS_AS(harden::open(plain, "pw"), EnvelopeError);
  CHECK_THROWS_AS(make_unlocking_set(sealed, f, FeatureSet({1, 2})), EnvelopeError);

  VaultRecord truncated = sealed;
  truncated.envelope->ciphertext.resize(truncated.envelope->ciphertext.size() - 16);
  CHECK_THROWS_AS(harden::open(truncated, "pw"), FormatError);
}
