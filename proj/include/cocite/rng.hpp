#pragma once

// Counter-based random streams.
//
// Every random decision in the toolkit draws from a StreamRng addressed by
// (master seed, stream id, substream id). The generator is Philox4x32-10: the
// output block for a counter value is a pure function of (key, counter), so a
// stream can be created anywhere, on any thread, without coordinating state.
// Simulation code uses (simulation index, group index) as the stream address,
// which makes results independent of how work is scheduled.

#include <array>
#include <cstdint>
#include <limits>

namespace cocite {

using Block128 = std::array<std::uint32_t, 4>;
using Key64 = std::array<std::uint32_t, 2>;

// One Philox4x32-10 evaluation. Exposed for known-answer tests.
Block128 philox4x32_10(Block128 counter, Key64 key) noexcept;

// Reserved stream ids for non-simulation randomness.
namespace streams {
inline constexpr std::uint32_t synth = 0xFFFF'FF00u;
inline constexpr std::uint32_t composition = 0xFFFF'FF01u;
}  // namespace streams

class StreamRng {
public:
  using result_type = std::uint64_t;

  StreamRng(std::uint64_t seed, std::uint32_t stream, std::uint32_t substream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t lo = next32();
    return (static_cast<std::uint64_t>(next32()) << 32) | lo;
  }

  std::uint32_t next32() noexcept {
    if (lane_ == 4) refill();
    return block_[lane_++];
  }

  // Uniform integer in [0, bound). bound must be > 0. Exact (rejection based).
  std::uint64_t below(std::uint64_t bound) noexcept;

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
  void refill() noexcept;

  Key64 key_;
  Block128 counter_;
  Block128 block_{};
  unsigned lane_ = 4;
};

}  // namespace cocite
