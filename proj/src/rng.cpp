#include "cocite/rng.hpp"

namespace cocite {
namespace {

__extension__ using u128 = unsigned __int128;

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline Block128 round(const Block128& c, const Key64& k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, c[0], hi0, lo0);
  mulhilo(kMul1, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

Block128 philox4x32_10(Block128 counter, Key64 key) noexcept {
  counter = round(counter, key);
  for (int r = 1; r < 10; ++r) {
    key[0] += kWeyl0;
    key[1] += kWeyl1;
    counter = round(counter, key);
  }
  return counter;
}

StreamRng::StreamRng(std::uint64_t seed, std::uint32_t stream, std::uint32_t substream) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      counter_{0u, 0u, substream, stream} {}

void StreamRng::refill() noexcept {
  block_ = philox4x32_10(counter_, key_);
  if (++counter_[0] == 0) ++counter_[1];
  lane_ = 0;
}

std::uint64_t StreamRng::below(std::uint64_t bound) noexcept {
  // Lemire's multiply-shift with rejection; 32-bit path covers every group size in practice.
  if (bound <= 0xFFFF'FFFFull) {
    const auto b = static_cast<std::uint32_t>(bound);
    std::uint64_t m = static_cast<std::uint64_t>(next32()) * b;
    auto low = static_cast<std::uint32_t>(m);
    if (low < b) {
      const std::uint32_t threshold = static_cast<std::uint32_t>(-b) % b;
      while (low < threshold) {
        m = static_cast<std::uint64_t>(next32()) * b;
        low = static_cast<std::uint32_t>(m);
      }
    }
    return m >> 32;
  }
  u128 m = static_cast<u128>((*this)()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>((*this)()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace cocite
