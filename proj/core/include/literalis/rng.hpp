#pragma once

#include <cstdint>
#include <limits>

namespace literalis {

/// SplitMix64. Small state, so a fresh stream can be derived per resample or
/// per instance; results then do not depend on how work is sharded.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Seed of the `index`-th substream of `master`. Fixed splitting rule.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) noexcept {
  SplitMix64 a(master);
  const std::uint64_t base = a();
  SplitMix64 b(base ^ (index * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
  return b();
}

/// Unbiased integer in [0, bound). Lemire's multiply-shift with rejection;
/// unlike std::uniform_int_distribution its output is identical across
/// standard libraries.
template <class Gen>
std::uint64_t uniform_below(Gen& gen, std::uint64_t bound) {
  if (bound <= 1) return 0;
  __extension__ using u128 = unsigned __int128;
  u128 m = static_cast<u128>(gen()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>(gen()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Uniform double in [0, 1) with 53 random bits.
template <class Gen>
double uniform_unit(Gen& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace literalis
