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

#include "lolws/batch.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdint>
#include <exception>
#include <vector>

#include "lolws/common.hpp"

namespace lolws {

namespace {

// Chunk size is a fixed constant, never a function of the thread count:
// chunk boundaries and the chunk-order reduction pin the floating-point
// summation order for every value of jobs.
constexpr std::size_t kChunkRows = 16;

}  // namespace

BatchResult batchReduce(std::size_t paramCount, std::span<const std::size_t> rows,
                        const ExampleTerm& term, std::span<double> grad, int jobs) {
  if (grad.size() != paramCount) throw ConfigError("gradient buffer length mismatch");
  std::fill(grad.begin(), grad.end(), 0.0);
  BatchResult out;
  if (rows.empty()) return out;

  const std::size_t numChunks = (rows.size() + kChunkRows - 1) / kChunkRows;
  std::vector<std::vector<double>> chunkGrad(numChunks);
  std::vector<BatchResult> chunkSum(numChunks);
  std::vector<std::exception_ptr> chunkError(numChunks);

  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
  std::vector<LossScratch> scratch(static_cast<std::size_t>(threads));

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(numChunks); ++c) {
    const auto chunk = static_cast<std::size_t>(c);
    auto& local = scratch[static_cast<std::size_t>(omp_get_thread_num())];
    auto& g = chunkGrad[chunk];
    g.assign(paramCount, 0.0);
    const std::size_t begin = chunk * kChunkRows;
    const std::size_t end = std::min(begin + kChunkRows, rows.size());
    try {
      for (std::size_t r = begin; r < end; ++r) {
        const PerExampleLoss loss = term(rows[r], g, local);
        chunkSum[chunk].loss += loss.value;
        chunkSum[chunk].classificationPart += loss.classificationPart;
        chunkSum[chunk].penaltyPart += loss.penaltyPart;
      }
    } catch (...) {
      chunkError[chunk] = std::current_exception();
    }
  }

  for (std::size_t c = 0; c < numChunks; ++c) {
    if (chunkError[c]) std::rethrow_exception(chunkError[c]);
  }
  for (std::size_t c = 0; c < numChunks; ++c) {
    out.loss += chunkSum[c].loss;
    out.classificationPart += chunkSum[c].classificationPart;
    out.penaltyPart += chunkSum[c].penaltyPart;
    const auto& g = chunkGrad[c];
    for (std::size_t i = 0; i < paramCount; ++i) grad[i] += g[i];
  }
  const auto n = static_cast<double>(rows.size());
  out.loss /= n;
  out.classificationPart /= n;
  out.penaltyPart /= n;
  for (double& g : grad) g /= n;
  return out;
}

BatchResult batchReduceSerial(std::size_t paramCount, std::span<const std::size_t> rows,
                              const ExampleTerm& term, std::span<double> grad) {
  if (grad.size() != paramCount) throw ConfigError("gradient buffer length mismatch");
  std::fill(grad.begin(), grad.end(), 0.0);
  BatchResult out;
  if (rows.empty()) return out;
  LossScratch scratch;
  for (std::size_t row : rows) {
    const PerExampleLoss loss = term(row, grad, scratch);
    out.loss += loss.value;
    out.classificationPart += loss.classificationPart;
    out.penaltyPart += loss.penaltyPart;
  }
  const auto n = static_cast<double>(rows.size());
  out.loss /= n;
  out.classificationPart /= n;
  out.penaltyPart /= n;
  for (double& g : grad) g /= n;
  return out;
}

}  // namespace lolws
