// Copyright 2026 The specshare Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPECSHARE_PHILOX_HPP
#define SPECSHARE_PHILOX_HPP

#include <array>
#include <cmath>
#include <cstdint>

namespace specshare {

// Philox4x32-10 counter-based generator (Salmon et al., "Parallel Random
// Numbers: As Easy as 1, 2, 3", SC'11). A (key, counter) pair maps to 128
// random bits through a pure function, so any draw index can be produced
// independently of every other index: partitioning work across threads cannot
// change the stream.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox4x32(std::uint64_t key)
      : key_lo_(static_cast<std::uint32_t>(key)),
        key_hi_(static_cast<std::uint32_t>(key >> 32)) {}

  Block operator()(std::uint64_t ctr_lo, std::uint64_t ctr_hi) const {
    Block c{static_cast<std::uint32_t>(ctr_lo),
            static_cast<std::uint32_t>(ctr_lo >> 32),
            static_cast<std::uint32_t>(ctr_hi),
            static_cast<std::uint32_t>(ctr_hi >> 32)};
    std::uint32_t k0 = key_lo_;
    std::uint32_t k1 = key_hi_;
    for (int r = 0; r < 10; ++r) {
      round(c, k0, k1);
      k0 += 0x9E3779B9u;  // Weyl increments from the reference implementation
      k1 += 0xBB67AE85u;
    }
    return c;
  }

 private:
  static void round(Block& c, std::uint32_t k0, std::uint32_t k1) {
    const std::uint64_t m0 = std::uint64_t{0xD2511F53u} * c[0];
    const std::uint64_t m1 = std::uint64_t{0xCD9E8D57u} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(m0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(m0);
    const auto hi1 = static_cast<std::uint32_t>(m1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(m1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
  }

  std::uint32_t key_lo_;
  std::uint32_t key_hi_;
};

namespace detail {

// Maps 64 random bits to (0, 1]; never returns 0, safe under log().
inline double unit_open_below(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

// Maps 64 random bits to [0, 1).
inline double unit_half_open(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline std::uint64_t join32(std::uint32_t hi, std::uint32_t lo) {
  return (std::uint64_t{hi} << 32) | lo;
}

}  // namespace detail

// Eight independent standard normal draws for one state index, via four
// Box-Muller pairs on Philox output. Pure in (seed, index).
inline std::array<double, 8> state_gaussians(std::uint64_t seed,
                                             std::uint64_t index) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  const Philox4x32 gen(seed);
  std::array<double, 8> z{};
  for (std::uint64_t block = 0; block < 4; ++block) {
    const auto bits = gen(index, block);
    const double u1 = detail::unit_open_below(detail::join32(bits[0], bits[1]));
    const double u2 = detail::unit_half_open(detail::join32(bits[2], bits[3]));
    const double r = std::sqrt(-2.0 * std::log(u1));
    z[2 * block] = r * std::cos(kTwoPi * u2);
    z[2 * block + 1] = r * std::sin(kTwoPi * u2);
  }
  return z;
}

}  // namespace specshare

#endif  // SPECSHARE_PHILOX_HPP
