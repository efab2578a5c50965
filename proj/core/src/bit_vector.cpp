#include "pbnssa/bit_vector.hpp"

namespace pbnssa {

BitVector::BitVector(std::size_t size, bool value) {
  resize(size, value);
}

void BitVector::resize(std::size_t size, bool value) {
  const std::size_t old = size_;
  words_.resize((size + kWordBits - 1) / kWordBits, 0);
  size_ = size;
  if (size > old && value) {
    for (std::size_t i = old; i < size; ++i) set(i, true);
  }
  if (size_ % kWordBits != 0) {
    words_.back() &= (word_type{1} << (size_ % kWordBits)) - 1;
  }
}

std::size_t BitVector::count(std::size_t first, std::size_t last) const noexcept {
  if (first >= last) return 0;
  std::size_t w0 = first / kWordBits;
  const std::size_t w1 = (last - 1) / kWordBits;
  const word_type head = ~word_type{0} << (first % kWordBits);
  const word_type tail = ~word_type{0} >> (kWordBits - 1 - (last - 1) % kWordBits);
  if (w0 == w1) return static_cast<std::size_t>(std::popcount(words_[w0] & head & tail));
  std::size_t total = static_cast<std::size_t>(std::popcount(words_[w0] & head));
  for (++w0; w0 < w1; ++w0) total += static_cast<std::size_t>(std::popcount(words_[w0]));
  total += static_cast<std::size_t>(std::popcount(words_[w1] & tail));
  return total;
}

}  // namespace pbnssa
