// Copyright 2026 The Authors.
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

#ifndef SETSCORE_RNG_H_
#define SETSCORE_RNG_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace setscore {

// SplitMix64 generator. The standard library distributions are not
// bit-reproducible across implementations, so every conversion from raw bits
// (uniform doubles, bounded integers, normals, shuffles) lives here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n). n must be positive.
  std::uint64_t uniform_int(std::uint64_t n);

  // Standard normal (Box-Muller, one draw per call).
  double normal();

  bool bernoulli(double p) { return uniform() < p; }

  // Independent child generator; advances this generator by one draw.
  Rng split();

  // Independent stream keyed by `stream`; does not advance this generator.
  Rng derive(std::uint64_t stream) const;

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

// Finalizer used by the generator; exposed for hashing seeds together.
std::uint64_t mix64(std::uint64_t z);

}  // namespace setscore

#endif  // SETSCORE_RNG_H_
