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

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "lolws/batch.hpp"
#include "lolws/common.hpp"

using namespace lolws;

namespace {

/// Toy term: loss r+1, gradient one-hot at r mod paramCount scaled by r.
ExampleTerm toyTerm(std::size_t paramCount) {
  return [paramCount](std::size_t row, std::span<double> grad, LossScratch&) {
    grad[row % paramCount] += static_cast<double>(row);
    PerExampleLoss loss;
    loss.value = static_cast<double>(row) + 1.0;
    loss.classificationPart = static_cast<double>(row);
    loss.penaltyPart = 1.0;
    return loss;
  };
}

std::vector<std::size_t> rowRange(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

}  // namespace

TEST_CASE("batchReduce averages losses and gradients") {
  const std::size_t paramCount = 4;
  const std::vector<std::size_t> rows = rowRange(10);
  std::vector<double> grad(paramCount, 7.0);  // stale values must be cleared
  const BatchResult res = batchReduce(paramCount, rows, toyTerm(paramCount), grad, 1);
  // Mean loss over rows 0..9: mean(row + 1) = 5.5.
  CHECK(res.loss == doctest::Approx(5.5).epsilon(1e-12));
  CHECK(res.classificationPart == doctest::Approx(4.5).epsilon(1e-12));
  CHECK(res.penaltyPart == doctest::Approx(1.0).epsilon(1e-12));
  // grad[j] = sum of rows congruent to j mod 4, divided by 10.
  CHECK(grad[0] == doctest::Approx((0.0 + 4 + 8) / 10).epsilon(1e-12));
  CHECK(grad[1] == doctest::Approx((1.0 + 5 + 9) / 10).epsilon(1e-12));
  CHECK(grad[2] == doctest::Approx((2.0 + 6) / 10).epsilon(1e-12));
  CHECK(grad[3] == doctest::Approx((3.0 + 7) / 10).epsilon(1e-12));
}

TEST_CASE("batchReduce result is bit-identical across jobs settings") {
  // A term whose partial sums are order-sensitive in floating point.
  const std::size_t paramCount = 8;
  const ExampleTerm term = [](std::size_t row, std::span<double> grad, LossScratch&) {
    const double v = std::sin(static_cast<double>(row) * 0.7) * 1e3 +
                     std::cos(static_cast<double>(row)) * 1e-7;
    for (std::size_t j = 0; j < grad.size(); ++j) {
      grad[j] += v / static_cast<double>(j + 1);
    }
    PerExampleLoss loss;
    loss.value = v;
    loss.classificationPart = v;
    return loss;
  };
  const std::vector<std::size_t> rows = rowRange(197);  // not a chunk multiple
  std::vector<double> g1(paramCount), g2(paramCount), g3(paramCount);
  const BatchResult r1 = batchReduce(paramCount, rows, term, g1, 1);
  const BatchResult r2 = batchReduce(paramCount, rows, term, g2, 4);
  const BatchResult r3 = batchReduce(paramCount, rows, term, g3, 3);
  CHECK(r1.loss == r2.loss);
  CHECK(r1.loss == r3.loss);
  CHECK(r1.classificationPart == r2.classificationPart);
  CHECK(g1 == g2);
  CHECK(g1 == g3);

  // The serial reference accumulates in row order; it agrees to rounding.
  std::vector<double> gs(paramCount);
  const BatchResult rs = batchReduceSerial(paramCount, rows, term, gs);
  CHECK(rs.loss == doctest::Approx(r1.loss).epsilon(1e-12));
  for (std::size_t j = 0; j < paramCount; ++j) {
    CHECK(gs[j] == doctest::Approx(g1[j]).epsilon(1e-12));
  }
}

TEST_CASE("batchReduce handles edge cases") {
  std::vector<double> grad(3, 1.0);
  const BatchResult empty = batchReduce(3, {}, toyTerm(3), grad, 2);
  CHECK(empty.loss == 0.0);
  CHECK(grad == std::vector<double>{0.0, 0.0, 0.0});

  const std::vector<std::size_t> one = {5};
  std::vector<double> g1(3);
  const BatchResult single = batchReduce(3, one, toyTerm(3), g1, 2);
  CHECK(single.loss == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(g1[2] == doctest::Approx(5.0).epsilon(1e-12));

  std::vector<double> wrong(2);
  CHECK_THROWS_AS(batchReduce(3, one, toyTerm(3), wrong, 1), ConfigError);
}

TEST_CASE("batchReduce rethrows the earliest failing chunk") {
  const ExampleTerm term = [](std::size_t row, std::span<double>, LossScratch&) -> PerExampleLoss {
    if (row == 70) throw std::runtime_error("row seventy");
    if (row == 20) throw std::runtime_error("row twenty");
    return {};
  };
  const std::vector<std::size_t> rows = rowRange(100);
  std::vector<double> grad(2);
  // Rows 20 and 70 land in chunks 1 and 4; the earliest chunk wins.
  CHECK_THROWS_WITH_AS(batchReduce(2, rows, term, grad, 4), "row twenty", std::runtime_error);
  CHECK_THROWS_WITH_AS(batchReduceSerial(2, rows, term, grad), "row twenty",
                       std::runtime_error);
}
