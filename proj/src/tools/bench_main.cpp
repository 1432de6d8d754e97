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

// Benchmark for the batch reduction kernel: wall time of the OpenMP path at
// several thread counts against the serial reference, on the bundled
// synthetic task, plus a result agreement check.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "lolws/batch.hpp"
#include "lolws/labelers.hpp"
#include "lolws/losses.hpp"
#include "lolws/nnet.hpp"
#include "lolws/rng.hpp"
#include "lolws/synthetic.hpp"

namespace {

using namespace lolws;

double secondsOf(const std::function<void()>& fn, int repeats) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  int rows = 512;
  int repeats = 3;
  if (argc > 1) rows = std::atoi(argv[1]);
  if (argc > 2) repeats = std::atoi(argv[2]);
  if (rows < 1 || repeats < 1) {
    std::fprintf(stderr, "usage: %s [rows] [repeats]\n", argv[0]);
    return 2;
  }

  SyntheticTaskConfig taskCfg;
  taskCfg.numTrain = rows;
  const SyntheticTask task = generateSynthetic(taskCfg);
  const VoteMatrix votes = applyLabelers(task.labelers, task.train);

  LossConfig lossCfg;
  lossCfg.penaltyKind = PenaltyKind::Square;
  lossCfg.alpha = 0.1;
  lossCfg.threshold = 1.0;
  const std::vector<SmoothedLabelerGradient> gradients =
      referenceLabelerGradients(task.labelers, task.train.schema(), lossCfg);
  const WeightScheme weights = buildWeightScheme(WeightKind::Uniform, votes, std::nullopt);

  const std::vector<int> layers = {task.train.schema().featureDim, 64, 16,
                                   task.train.schema().numClasses};
  const MlpModel model = makeMlp(layers, 0.2, 7);
  const std::size_t paramCount = model.paramCount();

  std::vector<std::size_t> order(task.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  const ExampleTerm term = [&](std::size_t row, std::span<double> grad,
                               LossScratch& scratch) {
    const std::uint64_t dropSeed = deriveSeed(7, Stream::Dropout, 1, row);
    const std::uint64_t smoothSeed = deriveSeed(7, Stream::Smoothing, 1, row);
    return exampleObjective(model, task.train, row, votes, gradients, lossCfg,
                            weights, dropSeed, smoothSeed, grad, scratch);
  };

  std::vector<double> gradSerial(paramCount);
  BatchResult refResult{};
  const double tSerial = secondsOf(
      [&] { refResult = batchReduceSerial(paramCount, order, term, gradSerial); },
      repeats);
  std::printf("%-22s %10.4fs   loss=%.12f\n", "serial reference", tSerial,
              refResult.loss);

  const int maxThreads = omp_get_max_threads();
  for (int jobs = 1; jobs <= maxThreads; jobs *= 2) {
    std::vector<double> grad(paramCount);
    BatchResult result{};
    const double t = secondsOf(
        [&] { result = batchReduce(paramCount, order, term, grad, jobs); },
        repeats);
    double maxGradDiff = 0.0;
    for (std::size_t i = 0; i < paramCount; ++i) {
      maxGradDiff = std::max(maxGradDiff, std::abs(grad[i] - gradSerial[i]));
    }
    const double lossDiff = std::abs(result.loss - refResult.loss);
    const std::string label = "parallel jobs=" + std::to_string(jobs);
    std::printf("%-22s %10.4fs   speedup=%5.2fx   |loss diff|=%.2e   max|grad diff|=%.2e\n",
                label.c_str(), t, tSerial / t, lossDiff, maxGradDiff);
    if (lossDiff > 1e-9 || maxGradDiff > 1e-9) {
      std::fprintf(stderr, "parallel result disagrees with serial reference\n");
      return 1;
    }
  }
  return 0;
}
