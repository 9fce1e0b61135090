// Copyright 2026 The Shapbandit Authors.
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

#ifndef SHAPBANDIT_RNG_H_
#define SHAPBANDIT_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>

#include <random>

namespace shapbandit {

// Portable seeded generator.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The standard <random> distributions are implementation-defined,
// so every draw below is computed from raw engine output with an explicit
// formula:
//   uniform()      (x >> 11) * 2^-53, in [0, 1)
//   uniform_int(n) rejection sampling on the top of the 64-bit range
//   normal(m, s)   Box-Muller, one engine pair per draw (no cached spare)
//   shuffle        Fisher-Yates from the back using uniform_int
// Streams for independent purposes are derived by hashing (seed, keys...)
// through SplitMix64, so adding draws to one stream never shifts another.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Deterministic child seed for a named sub-stream.
  static std::uint64_t Derive(std::uint64_t seed,
                              std::initializer_list<std::uint64_t> keys);
  static Rng Stream(std::uint64_t seed,
                    std::initializer_list<std::uint64_t> keys) {
    return Rng(Derive(seed, keys));
  }

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform over [0, n). n must be positive.
  std::uint64_t uniform_int(std::uint64_t n);
  double normal(double mean, double sd);
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t SplitMix64(std::uint64_t x);

}  // namespace shapbandit

#endif  // SHAPBANDIT_RNG_H_
