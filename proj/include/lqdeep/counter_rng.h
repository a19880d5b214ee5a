// Copyright 2026 The lqdeep Authors.
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

///////////////////////////////////////////////////////////////////////////////
//
// Counter-based random numbers. Philox4x32-10 maps a 128-bit counter and a
// 64-bit key to 128 random bits with no hidden state, so a draw is a pure
// function of (seed, rollout, t, player, index) and rollouts can run in any
// order or on any thread with bit-identical results.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef LQDEEP_COUNTER_RNG_H_
#define LQDEEP_COUNTER_RNG_H_

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace lqdeep {

using Philox4x32Counter = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

// Ten rounds; multipliers and Weyl increments from Salmon et al. (SC'11).
inline Philox4x32Counter Philox4x32(Philox4x32Counter ctr, Philox4x32Key key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
           static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
           static_cast<std::uint32_t>(p0)};
  }
  return ctr;
}

// SplitMix64 finalizer; used to derive independent sub-seeds.
inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Seed for a named sub-stream, e.g. DeriveSeed(seed, iteration, purpose).
inline std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b = 0) {
  return SplitMix64(SplitMix64(SplitMix64(seed) ^ a) ^ b);
}

// A stream of draws at one (seed, rollout, t, player) coordinate. Successive
// calls advance a block counter inside the Philox counter word.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint32_t rollout, std::uint32_t t,
               std::uint32_t player)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        rollout_(rollout), t_(t), player_(player) {}

  // Uniform on the open interval (0, 1), 32 bits of resolution.
  double Uniform() {
    if (next_ == 4) Refill();
    return (static_cast<double>(buffer_[next_++]) + 0.5) * 0x1p-32;
  }

  // Standard normal by the Box-Muller transform; the second variate of each
  // pair is cached.
  double Normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(Uniform()));
    const double angle = 2.0 * std::numbers::pi * Uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  void Refill() {
    buffer_ = Philox4x32({rollout_, t_, player_, block_++}, key_);
    next_ = 0;
  }

  Philox4x32Key key_;
  std::uint32_t rollout_, t_, player_;
  std::uint32_t block_ = 0;
  Philox4x32Counter buffer_{};
  int next_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lqdeep

#endif  // LQDEEP_COUNTER_RNG_H_
