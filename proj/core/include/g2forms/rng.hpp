#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace g2f {

/// Philox-4x32-10 counter-based generator.  Streams are addressed by
/// (seed, index): identical inputs give identical output on any thread
/// layout, which is what makes Monte Carlo runs reproducible.
class Philox {
public:
  explicit Philox(uint64_t seed) : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)} {}

  /// 128 bits for block `index` in substream `stream`.
  std::array<uint32_t, 4> block(uint64_t index, uint32_t stream = 0) const {
    std::array<uint32_t, 4> ctr = {static_cast<uint32_t>(index), static_cast<uint32_t>(index >> 32),
                                   stream, 0x67617573u};
    uint32_t k0 = key_[0], k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
      const uint64_t p0 = 0xD2511F53ull * ctr[0];
      const uint64_t p1 = 0xCD9E8D57ull * ctr[2];
      const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
      const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    return ctr;
  }

  /// Two doubles in [0,1) from one block.
  std::array<double, 2> uniform2(uint64_t index, uint32_t stream = 0) const {
    const auto b = block(index, stream);
    const uint64_t u0 = (static_cast<uint64_t>(b[0]) << 32) | b[1];
    const uint64_t u1 = (static_cast<uint64_t>(b[2]) << 32) | b[3];
    constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
    return {static_cast<double>(u0 >> 11) * scale, static_cast<double>(u1 >> 11) * scale};
  }

  double uniform(uint64_t index, uint32_t stream = 0) const { return uniform2(index, stream)[0]; }

  /// Two standard normals (Box-Muller, never exactly zero input).
  std::array<double, 2> normal2(uint64_t index, uint32_t stream = 0) const {
    auto [u, v] = uniform2(index, stream);
    const double r = std::sqrt(-2.0 * std::log1p(-u));  // u<1 so 1-u>0
    const double a = 6.283185307179586476925286766559 * v;
    return {r * std::cos(a), r * std::sin(a)};
  }

private:
  std::array<uint32_t, 2> key_;
};

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97f4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace g2f
