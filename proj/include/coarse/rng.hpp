#pragma once

// Counter-based random numbers: Philox4x32-10 (Salmon et al., SC'11).
// A stream is addressed by (seed, trial); draws within a trial advance a
// 64-bit counter, so trial k's trajectory never depends on thread layout.

#include <array>
#include <cstdint>
#include <string_view>

namespace coarse {

inline constexpr std::string_view kRngAlgorithm = "philox4x32-10";

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

constexpr PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t trial)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, trial_(trial) {}

  std::uint64_t next_u64() {
    if (cached_) {
      cached_ = false;
      return cache_;
    }
    const PhiloxCounter out = philox4x32_10(
        {static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
         static_cast<std::uint32_t>(trial_), static_cast<std::uint32_t>(trial_ >> 32)},
        key_);
    ++counter_;
    cache_ = (std::uint64_t{out[3]} << 32) | out[2];
    cached_ = true;
    return (std::uint64_t{out[1]} << 32) | out[0];
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, n).
  std::uint32_t below(std::uint32_t n) {
    return static_cast<std::uint32_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  PhiloxKey key_;
  std::uint64_t trial_;
  std::uint64_t counter_ = 0;
  std::uint64_t cache_ = 0;
  bool cached_ = false;
};

}  // namespace coarse
