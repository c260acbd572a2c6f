#include "mbfv/random.hpp"

#include <unistd.h>

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace mbfv {

namespace {

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

uint64_t RandomSource::next_u64() {
  uint8_t buf[8];
  fill(buf);
  uint64_t v;
  std::memcpy(&v, buf, 8);
  return v;
}

uint64_t RandomSource::uniform(uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform bound must be >= 1");
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % bound;
}

double RandomSource::uniform_real() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

uint64_t RandomSource::poisson(double mean) {
  if (mean <= 0.0) return 0;
  // Split large means so exp(-mean) stays representable.
  uint64_t n = 0;
  double remaining = mean;
  while (remaining > 500.0) {
    const double chunk = 500.0;
    const double l = std::exp(-chunk);
    double p = 1.0;
    uint64_t k = 0;
    do {
      ++k;
      p *= uniform_real();
    } while (p > l);
    n += k - 1;
    remaining -= chunk;
  }
  const double l = std::exp(-remaining);
  double p = 1.0;
  uint64_t k = 0;
  do {
    ++k;
    p *= uniform_real();
  } while (p > l);
  return n + k - 1;
}

void OsRandom::fill(std::span<uint8_t> out) {
  size_t off = 0;
  while (off < out.size()) {
    const size_t chunk = std::min<size_t>(out.size() - off, 256);
    if (getentropy(out.data() + off, chunk) != 0) {
      throw std::runtime_error("getentropy failed");
    }
    off += chunk;
  }
}

void SeededRandom::fill(std::span<uint8_t> out) {
  size_t off = 0;
  while (off < out.size()) {
    const uint64_t v = splitmix64(state_);
    const size_t chunk = std::min<size_t>(out.size() - off, 8);
    std::memcpy(out.data() + off, &v, chunk);
    off += chunk;
  }
}

uint64_t SeededRandom::derive(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
  uint64_t s = seed;
  uint64_t h = splitmix64(s);
  s ^= a * 0x9E3779B97F4A7C15ull;
  h ^= splitmix64(s);
  s ^= b * 0xC2B2AE3D27D4EB4Full;
  h ^= splitmix64(s);
  s ^= c * 0x165667B19E3779F9ull;
  h ^= splitmix64(s);
  return h;
}

}  // namespace mbfv
