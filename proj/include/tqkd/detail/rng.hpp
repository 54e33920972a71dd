#pragma once

#include <cstdint>

namespace tqkd::detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based per-round random stream: every draw for round i depends only
/// on (seed, i), so chunked or multi-threaded tallying reproduces the serial
/// result bit for bit.
class RoundRng {
 public:
  RoundRng(std::uint64_t seed, std::uint64_t round) {
    std::uint64_t s = seed + 0x9e3779b97f4a7c15ULL * (round + 1);
    state_ = splitmix64(s);
  }

  std::uint64_t next() { return splitmix64(state_); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  bool bit() { return next() & 1; }

  std::uint8_t two_bits() { return static_cast<std::uint8_t>(next() & 3); }

 private:
  std::uint64_t state_;
};

}  // namespace tqkd::detail
