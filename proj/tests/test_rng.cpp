// Copyright 2026 The lolws Authors
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

#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "lolws/rng.hpp"

using namespace lolws;

TEST_CASE("deriveSeed is deterministic and path-sensitive") {
  CHECK(deriveSeed(7, Stream::Dropout, 3, 11) == deriveSeed(7, Stream::Dropout, 3, 11));
  CHECK(deriveSeed(7, Stream::Dropout, 3, 11) != deriveSeed(7, Stream::Dropout, 3, 12));
  CHECK(deriveSeed(7, Stream::Dropout, 3, 11) != deriveSeed(7, Stream::Dropout, 11, 3));
  CHECK(deriveSeed(7, Stream::Dropout) != deriveSeed(7, Stream::Batching));
  CHECK(deriveSeed(7, Stream::Dropout) != deriveSeed(8, Stream::Dropout));
}

TEST_CASE("substream seeds do not collide across nearby indices") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t epoch = 1; epoch <= 40; ++epoch) {
    for (std::uint64_t row = 0; row < 200; ++row) {
      seen.insert(deriveSeed(0, Stream::Dropout, epoch, row));
      seen.insert(deriveSeed(0, Stream::Smoothing, epoch, row));
    }
  }
  CHECK(seen.size() == std::size_t{2} * 40 * 200);
}

TEST_CASE("splitmix64 advances its state") {
  std::uint64_t state = 0;
  const std::uint64_t first = splitmix64(state);
  const std::uint64_t second = splitmix64(state);
  CHECK(state != 0);
  CHECK(first != second);
}

TEST_CASE("uniform stays in [0,1) and replays by seed") {
  Rng a(123);
  Rng b(123);
  for (int i = 0; i < 1000; ++i) {
    const double x = a.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    CHECK(x == b.uniform());
  }
}

TEST_CASE("uniform(lo,hi) respects the bounds") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(-2.5, 4.0);
    CHECK(x >= -2.5);
    CHECK(x < 4.0);
  }
}

TEST_CASE("uniformInt is in range and roughly balanced") {
  Rng rng(17);
  std::vector<int> counts(6, 0);
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) {
    const std::uint64_t v = rng.uniformInt(6);
    REQUIRE(v < 6);
    ++counts[static_cast<std::size_t>(v)];
  }
  // Expected 10000 per bucket; 5 sigma is about 480.
  for (int c : counts) {
    CHECK(c > 9500);
    CHECK(c < 10500);
  }
}

TEST_CASE("bernoulli hits its rate") {
  Rng rng(29);
  int hits = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) hits += rng.bernoulli(0.3) ? 1 : 0;
  CHECK(hits > 29000);
  CHECK(hits < 31000);
}

TEST_CASE("shuffle produces a permutation and replays by seed") {
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  std::vector<int> w = v;
  Rng a(99);
  Rng b(99);
  a.shuffle(v);
  b.shuffle(w);
  CHECK(v == w);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expect(50);
  std::iota(expect.begin(), expect.end(), 0);
  CHECK(sorted == expect);
  CHECK(v != expect);  // 50 elements; identity permutation is astronomically unlikely
}
