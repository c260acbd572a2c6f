#include "mbfv/bitpack.hpp"

#include <stdexcept>

namespace mbfv {

void BitWriter::append(uint64_t value, unsigned nbits) {
  if (nbits > 64) throw std::invalid_argument("bit width too large");
  for (unsigned i = 0; i < nbits; ++i) {
    if (bits_ % 8 == 0) buf_.push_back(0);
    if ((value >> i) & 1) buf_.back() |= uint8_t(1u << (bits_ % 8));
    ++bits_;
  }
}

uint64_t BitReader::read(unsigned nbits) {
  if (nbits > 64) throw std::invalid_argument("bit width too large");
  if (nbits > bits_left()) throw std::out_of_range("bit stream exhausted");
  uint64_t v = 0;
  for (unsigned i = 0; i < nbits; ++i, ++pos_) {
    if ((data_[pos_ / 8] >> (pos_ % 8)) & 1) v |= uint64_t{1} << i;
  }
  return v;
}

}  // namespace mbfv
