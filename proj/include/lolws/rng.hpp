// Copyright 2026 The lolws Authors
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

#ifndef LOLWS_RNG_HPP_
#define LOLWS_RNG_HPP_

#include <cstdint>
#include <random>
#include <vector>

namespace lolws {

// Every stochastic component draws from its own named substream so that
// toggling one (say, dropout) never perturbs another (say, batch order).
enum class Stream : std::uint64_t {
  Init = 1,
  Dropout = 2,
  Batching = 3,
  TieBreak = 4,
  Smoothing = 5,
  Synthetic = 6,
  Split = 7,
  Sweep = 8,
};

/// SplitMix64 mixing step; the basis for substream seed derivation.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives a child seed from a root seed and a path of stream/index values.
/// Same inputs always give the same output, on every platform.
std::uint64_t deriveSeed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

inline std::uint64_t deriveSeed(std::uint64_t seed, Stream stream) {
  return deriveSeed(seed, {static_cast<std::uint64_t>(stream)});
}
inline std::uint64_t deriveSeed(std::uint64_t seed, Stream stream, std::uint64_t a) {
  return deriveSeed(seed, {static_cast<std::uint64_t>(stream), a});
}
inline std::uint64_t deriveSeed(std::uint64_t seed, Stream stream, std::uint64_t a,
                                std::uint64_t b) {
  return deriveSeed(seed, {static_cast<std::uint64_t>(stream), a, b});
}

/// Deterministic RNG. Wraps std::mt19937_64 (whose output sequence is
/// pinned by the standard) and implements the distributions itself, so the
/// same seed produces the same values on every platform and toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n). Rejection sampled, bias free.
  std::uint64_t uniformInt(std::uint64_t n);

  /// Fisher-Yates shuffle using this stream.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniformInt(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace lolws

#endif  // LOLWS_RNG_HPP_
