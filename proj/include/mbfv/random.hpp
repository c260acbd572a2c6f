#ifndef MBFV_RANDOM_HPP
#define MBFV_RANDOM_HPP

#include <cstdint>
#include <span>

namespace mbfv {

// Byte-level randomness source. Enrolment and sealing take one explicitly so
// key material provably comes from the caller's choice of entropy.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<uint8_t> out) = 0;

  uint64_t next_u64();
  // Uniform in [0, bound), bound >= 1; rejection sampling, unbiased.
  uint64_t uniform(uint64_t bound);
  // Uniform double in [0, 1).
  double uniform_real();
  // Knuth's multiplication method; exact and portable, O(mean).
  uint64_t poisson(double mean);
};

// Operating-system entropy (getentropy). Cryptographically strong.
class OsRandom final : public RandomSource {
 public:
  void fill(std::span<uint8_t> out) override;
};

// Deterministic stream for reproducible evaluation runs (splitmix64-based).
// Not for production key material.
class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(uint64_t seed) : state_(seed) {}
  void fill(std::span<uint8_t> out) override;

  // Independent stream for a derived scope (per-trial seeding).
  static uint64_t derive(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0);

 private:
  uint64_t state_;
};

}  // namespace mbfv

#endif
