#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace wetting {

/// Philox4x32-10 block function (Salmon et al., SC'11): maps a 128-bit
/// counter and a 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                         std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer; used to derive per-row seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based stream: the key is the run seed and three counter words
/// name the stream (site, sweep, chain). The fourth word counts blocks.
/// Every (seed, site, sweep, chain) tuple yields an independent stream, so a
/// sweep draws the same numbers whatever the update order or thread count.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint32_t site, std::uint32_t sweep, std::uint32_t chain)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        ctr_{0, site, sweep, chain} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (used_ == 2) refill();
    const auto i = 2 * used_++;
    return (static_cast<std::uint64_t>(block_[i + 1]) << 32) | block_[i];
  }

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  void refill() {
    block_ = philox4x32(ctr_, key_);
    ++ctr_[0];
    used_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint32_t, 4> block_{};
  unsigned used_ = 2;
};

}  // namespace wetting
