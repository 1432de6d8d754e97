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

#ifndef LOLWS_BATCH_HPP_
#define LOLWS_BATCH_HPP_

#include <cstdint>
#include <functional>
#include <span>

#include "lolws/losses.hpp"

namespace lolws {

struct BatchResult {
  double loss = 0.0;               // mean over the batch rows
  double classificationPart = 0.0;
  double penaltyPart = 0.0;
};

/// Per-example term: evaluates one row, accumulating its parameter gradient
/// into grad (sized paramCount). Must be safe to call concurrently on
/// distinct scratches.
using ExampleTerm =
    std::function<PerExampleLoss(std::size_t row, std::span<double> grad, LossScratch& scratch)>;

/// Mean loss and mean gradient over rows. Work is split into fixed-size
/// chunks processed in parallel; per-chunk partial sums are reduced serially
/// in chunk order, so the bits never depend on the thread count. jobs <= 0
/// uses the runtime default.
BatchResult batchReduce(std::size_t paramCount, std::span<const std::size_t> rows,
                        const ExampleTerm& term, std::span<double> grad, int jobs);

/// Naive single-pass reference with one accumulator, kept as the test and
/// benchmark baseline for batchReduce.
BatchResult batchReduceSerial(std::size_t paramCount, std::span<const std::size_t> rows,
                              const ExampleTerm& term, std::span<double> grad);

}  // namespace lolws

#endif  // LOLWS_BATCH_HPP_
