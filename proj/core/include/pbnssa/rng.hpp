#pragma once

#include <array>
#include <cstdint>

namespace pbnssa {

/// Philox4x32-10 block function (Salmon et al., SC'11). Maps a 128-bit counter
/// and a 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// SplitMix64 finaliser; used to turn user seeds into Philox keys.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream. The key is derived from the master seed and the
/// upper 64 counter bits hold the stream id, so streams with different ids
/// never share a counter value: their outputs are disjoint blocks of the same
/// keyed permutation.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept;

  std::uint32_t next_u32() noexcept {
    if (cursor_ == 4) refill();
    return buffer_[cursor_++];
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1]; safe as a log() argument.
  double uniform_open_low() noexcept { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  /// Unbiased integer in [0, bound) (Lemire's multiply-and-reject). bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Unbiased integer in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) noexcept { return lo + below(hi - lo + 1); }

  std::uint64_t stream_id() const noexcept { return stream_id_; }
  /// Number of 128-bit blocks consumed so far.
  std::uint64_t blocks() const noexcept { return block_; }

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned cursor_ = 4;
};

}  // namespace pbnssa
