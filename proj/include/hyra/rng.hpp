#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace hyra {

// SplitMix64 step; advances `state` and returns the next output.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stream tags keep arrival and channel draws on disjoint substreams even
// when they share a master seed.
inline constexpr std::uint64_t kStreamArrivals = 0xA1;
inline constexpr std::uint64_t kStreamChannel = 0xC1;

// Derives an independent stream seed from (master, stream, a, b). Every
// (UE, sample) pair gets its own generator, so traces come out identical
// no matter the order blocks are generated in.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = master;
  s = splitmix64_next(s) ^ (stream * 0xA24BAED4963EE407ULL);
  s = splitmix64_next(s) ^ (a * 0x9FB21C651E98DF25ULL);
  s = splitmix64_next(s) ^ (b * 0xC2B2AE3D27D4EB4FULL);
  return splitmix64_next(s);
}

// xoshiro256++ (Blackman & Vigna). Preferred over std::mt19937_64 plus
// std::uniform_real_distribution because the uniform mapping below is pinned
// bit-for-bit, which keeps golden trace vectors portable across toolchains.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : state_) w = splitmix64_next(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on (0, 1]; never 0, so inverse-CDF transforms stay finite.
  double uniform01() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; caches the second draw of each pair.
  double normal01() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * kPi * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_{};
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace hyra
