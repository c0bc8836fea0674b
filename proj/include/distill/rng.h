//
// Copyright 2026 The bilstm-distill Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DISTILL_RNG_H_
#define DISTILL_RNG_H_

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace distill {

// Anything that yields uniform reals in [0, 1) and uniform integers in [0, n).
// The augmentation routines are written against this so tests can script the
// draws.
template <typename R>
concept UniformSource = requires(R r, std::uint64_t n) {
  { r.uniform01() } -> std::convertible_to<double>;
  { r.uniform_int(n) } -> std::convertible_to<std::uint64_t>;
};

// mt19937_64 with distributions defined here rather than by the standard
// library, so streams are identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // 53 random mantissa bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Draw from the Xavier/Glorot uniform distribution for a weight matrix.
  double xavier(std::size_t fan_in, std::size_t fan_out) {
    return uniform(-1.0, 1.0) *
           std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  }

 private:
  std::mt19937_64 engine_;
};

static_assert(UniformSource<Rng>);

std::uint64_t splitmix64(std::uint64_t x);

// Stable 64-bit FNV-1a hash of a string.
std::uint64_t fnv1a64(std::string_view s);

// Seed for an independent stream derived from a base seed and a path of keys.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

}  // namespace distill

#endif  // DISTILL_RNG_H_
