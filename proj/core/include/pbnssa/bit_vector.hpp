#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pbnssa {

/// Growable packed bit sequence. Bits beyond size() in the last word are kept
/// zero so that defaulted equality and popcounts are exact.
class BitVector {
 public:
  using word_type = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  BitVector() = default;
  explicit BitVector(std::size_t size, bool value = false);

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  bool operator[](std::size_t i) const noexcept {
    return (words_[i / kWordBits] >> (i % kWordBits)) & 1U;
  }

  void set(std::size_t i, bool value) noexcept {
    const word_type mask = word_type{1} << (i % kWordBits);
    if (value) {
      words_[i / kWordBits] |= mask;
    } else {
      words_[i / kWordBits] &= ~mask;
    }
  }

  void push_back(bool value) {
    if (size_ % kWordBits == 0) words_.push_back(0);
    if (value) words_.back() |= word_type{1} << (size_ % kWordBits);
    ++size_;
  }

  void reserve(std::size_t bits) { words_.reserve((bits + kWordBits - 1) / kWordBits); }
  void clear() noexcept {
    words_.clear();
    size_ = 0;
  }
  void resize(std::size_t size, bool value = false);

  /// Number of set bits in [first, last).
  std::size_t count(std::size_t first, std::size_t last) const noexcept;
  std::size_t count() const noexcept { return count(0, size_); }

  std::span<const word_type> words() const noexcept { return words_; }
  std::span<word_type> words() noexcept { return words_; }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::vector<word_type> words_;
  std::size_t size_ = 0;
};

}  // namespace pbnssa
