#ifndef MBFV_BITPACK_HPP
#define MBFV_BITPACK_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace mbfv {

// LSB-first bit stream append/read; the canonical coefficient packing used
// by secret hashing and envelope plaintexts.
class BitWriter {
 public:
  void append(uint64_t value, unsigned nbits);
  size_t bit_size() const { return bits_; }
  const std::vector<uint8_t>& bytes() const { return buf_; }
  std::vector<uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<uint8_t> buf_;
  size_t bits_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const uint8_t> data) : data_(data) {}
  uint64_t read(unsigned nbits);
  size_t bits_left() const { return data_.size() * 8 - pos_; }

 private:
  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

}  // namespace mbfv

#endif
