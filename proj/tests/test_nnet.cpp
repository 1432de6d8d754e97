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
#include <cstdint>
#include <vector>

#include "lolws/common.hpp"
#include "lolws/nnet.hpp"
#include "lolws/rng.hpp"
#include "oracle_helpers.hpp"
#include "temp_files.hpp"

using namespace lolws;
using lolws::testing::TempDir;

namespace {

/// Cross-entropy against a fixed target class, for finite differencing.
double ceLossAt(const MlpModel& model, std::span<const double> x, int target) {
  ForwardCache cache;
  forward(model, x, ForwardMode::Eval, 0, cache);
  return -std::log(std::max(cache.probs[static_cast<std::size_t>(target)], 1e-12));
}

}  // namespace

TEST_CASE("makeMlp lays out parameters as documented") {
  const MlpModel model = makeMlp({5, 4, 3}, 0.2, 1);
  CHECK(model.numLayers() == 2);
  CHECK(model.inputDim() == 5);
  CHECK(model.numClasses() == 3);
  CHECK(model.paramCount() == 5 * 4 + 4 + 4 * 3 + 3);
  CHECK(model.params.size() == model.paramCount());
  CHECK(model.weightOffset(0) == 0);
  CHECK(model.biasOffset(0) == 20);
  CHECK(model.weightOffset(1) == 24);
  CHECK(model.biasOffset(1) == 36);

  // Biases start at zero; weights stay inside the He-uniform bound.
  for (std::size_t l = 0; l < 2; ++l) {
    const double bound = std::sqrt(6.0 / model.layerSizes[l]);
    for (std::size_t i = model.weightOffset(l); i < model.biasOffset(l); ++i) {
      CHECK(std::abs(model.params[i]) <= bound);
    }
    const std::size_t biasEnd = l + 1 < 2 ? model.weightOffset(l + 1) : model.paramCount();
    for (std::size_t i = model.biasOffset(l); i < biasEnd; ++i) {
      CHECK(model.params[i] == 0.0);
    }
  }

  // Same seed, same network; different seed, different weights.
  CHECK(makeMlp({5, 4, 3}, 0.2, 1).params == model.params);
  CHECK(makeMlp({5, 4, 3}, 0.2, 2).params != model.params);
}

TEST_CASE("model validation rejects bad shapes and values") {
  CHECK_THROWS_AS(makeMlp({5}, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(makeMlp({5, 0, 2}, 0.0, 1), ConfigError);
  MlpModel model = makeMlp({3, 2}, 0.0, 1);
  model.params[0] = std::nan("");
  CHECK_THROWS_AS(model.validate(), NumericError);
  model = makeMlp({3, 2}, 0.0, 1);
  model.params.pop_back();
  CHECK_THROWS_AS(model.validate(), ConfigError);
}

TEST_CASE("forward computes a hand-checked softmax") {
  // No hidden layer: probs = softmax(Wx + b).
  MlpModel model = makeMlp({2, 2}, 0.0, 1);
  model.params = {1.0, 0.0,   // W row 0
                  0.0, 1.0,   // W row 1
                  0.5, -0.5}; // b
  const std::vector<double> x = {2.0, 1.0};
  ForwardCache cache;
  forward(model, x, ForwardMode::Eval, 0, cache);
  // Logits: (2.5, 0.5); softmax = e^2 / (e^2 + 1) on class 0.
  const double z = std::exp(2.0);
  CHECK(cache.probs[0] == doctest::Approx(z / (z + 1)).epsilon(1e-12));
  CHECK(cache.probs[1] == doctest::Approx(1 / (z + 1)).epsilon(1e-12));
  CHECK(cache.probs[0] + cache.probs[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("forward is deterministic and dropout-seeded") {
  const MlpModel model = oracle::randomModel({6, 5, 3}, 21, 0.8, 0.5);
  const std::vector<double> x = oracle::randomVector(6, 22, 0.0, 1.0);
  ForwardCache a, b, c, d;
  forward(model, x, ForwardMode::Eval, 1, a);
  forward(model, x, ForwardMode::Eval, 2, b);
  CHECK(a.probs == b.probs);  // eval ignores the seed
  forward(model, x, ForwardMode::Train, 7, c);
  forward(model, x, ForwardMode::Train, 7, d);
  CHECK(c.probs == d.probs);  // train replays by seed
  // Inverted dropout masks are 0 or 1/(1-rate).
  REQUIRE_FALSE(c.mask.empty());
  bool sawZero = false;
  for (double v : c.mask[0]) {
    const bool zero = v == 0.0;
    const bool kept = std::abs(v - 2.0) < 1e-12;
    CHECK((zero || kept));
    sawZero = sawZero || zero;
  }
  forward(model, x, ForwardMode::Train, 8, d);
  CHECK(c.probs != d.probs);  // different mask, different output
  CHECK(sawZero);
}

TEST_CASE("paramGrad matches finite differences") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const MlpModel model = oracle::randomModel({7, 6, 4, 3}, seed);
    const std::vector<double> x = oracle::randomVector(7, seed + 50, -1.0, 1.0);
    const int target = static_cast<int>(seed % 3);

    ForwardCache cache;
    forward(model, x, ForwardMode::Eval, 0, cache);
    std::vector<double> outputGrad(3, 0.0);
    outputGrad[static_cast<std::size_t>(target)] =
        -1.0 / std::max(cache.probs[static_cast<std::size_t>(target)], 1e-12);
    std::vector<double> grad(model.paramCount(), 0.0);
    paramGrad(model, cache, outputGrad, grad);

    const std::vector<double> fd = oracle::fdParamGrad(
        model, [&](const MlpModel& probe) { return ceLossAt(probe, x, target); });
    CHECK(oracle::maxRelError(grad, fd) < 1e-4);
  }
}

TEST_CASE("paramGrad accumulates rather than overwriting") {
  const MlpModel model = oracle::randomModel({4, 3, 2}, 9);
  const std::vector<double> x = oracle::randomVector(4, 10, -1.0, 1.0);
  ForwardCache cache;
  forward(model, x, ForwardMode::Eval, 0, cache);
  const std::vector<double> outputGrad = {0.3, -0.7};
  std::vector<double> once(model.paramCount(), 0.0);
  paramGrad(model, cache, outputGrad, once);
  std::vector<double> twice(model.paramCount(), 0.0);
  paramGrad(model, cache, outputGrad, twice);
  paramGrad(model, cache, outputGrad, twice);
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(twice[i] == doctest::Approx(2.0 * once[i]).epsilon(1e-12));
  }
}

TEST_CASE("inputGrad matches finite differences") {
  const MlpModel model = oracle::randomModel({6, 5, 3}, 31);
  const std::vector<double> x = oracle::randomVector(6, 32, -1.0, 1.0);
  ForwardCache cache;
  forward(model, x, ForwardMode::Eval, 0, cache);
  for (int cls = 0; cls < 3; ++cls) {
    std::vector<double> grad(6);
    inputGrad(model, cache, cls, grad);
    for (int j = 0; j < 6; ++j) {
      const auto f = [&](double v) {
        std::vector<double> probe = x;
        probe[static_cast<std::size_t>(j)] = v;
        ForwardCache pc;
        forward(model, probe, ForwardMode::Eval, 0, pc);
        return pc.probs[static_cast<std::size_t>(cls)];
      };
      const double fd = oracle::centralDiff(f, x[static_cast<std::size_t>(j)]);
      CHECK(grad[static_cast<std::size_t>(j)] == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("inputGrad matches the linear-softmax closed form") {
  const MlpModel model = oracle::randomModel({5, 3}, 37);
  const std::vector<double> x = oracle::randomVector(5, 38, 0.0, 1.0);
  ForwardCache cache;
  forward(model, x, ForwardMode::Eval, 0, cache);
  for (int cls = 0; cls < 3; ++cls) {
    std::vector<double> grad(5);
    inputGrad(model, cache, cls, grad);
    for (int j = 0; j < 5; ++j) {
      const double expect = oracle::linearSoftmaxInputGrad(model, cache.probs, cls, j);
      CHECK(grad[static_cast<std::size_t>(j)] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("penaltyParamGrad matches finite differences") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const MlpModel model = oracle::randomModel({5, 4, 3}, seed * 100);
    const std::vector<double> x = oracle::randomVector(5, seed * 100 + 1, 0.0, 1.0);
    const std::vector<PenaltyResidual> residuals = {{0, 1, -0.8}, {3, 0, 0.5}, {4, 2, -1.1}};

    ForwardCache cache;
    forward(model, x, ForwardMode::Eval, 0, cache);
    std::vector<double> grad(model.paramCount(), 0.0);
    penaltyParamGrad(model, cache, residuals, grad);

    // Oracle: differentiate sum_r w_r dprobs[y_r]/dx[j_r] over the params.
    const auto scalarOf = [&](const MlpModel& probe) {
      ForwardCache pc;
      forward(probe, x, ForwardMode::Eval, 0, pc);
      std::vector<double> ig(5);
      double total = 0.0;
      for (const PenaltyResidual& r : residuals) {
        inputGrad(probe, pc, r.classIndex, ig);
        total += r.weight * ig[r.featureIndex];
      }
      return total;
    };
    const std::vector<double> fd = oracle::fdParamGrad(model, scalarOf, 1e-5);
    CHECK(oracle::maxRelError(grad, fd) < 1e-3);
  }
}

TEST_CASE("adamStep applies decoupled weight decay then the update") {
  MlpModel model = makeMlp({1, 2}, 0.0, 1);
  model.params = {0.5, -0.25, 0.125, 0.0};
  OptimizerState state = makeOptimizer(model, 0.1, 0.01);
  const std::vector<double> grad = {1.0, -2.0, 0.5, 0.0};
  adamStep(model, state, grad);
  CHECK(state.step == 1);
  // After one step: m_hat = g, v_hat = g^2, delta = lr * g/(|g|+eps) = lr*sign(g).
  for (std::size_t i = 0; i < 4; ++i) {
    const double decayed = (i == 0 ? 0.5 : i == 1 ? -0.25 : i == 2 ? 0.125 : 0.0) *
                           (1.0 - 0.1 * 0.01);
    const double sign = grad[i] > 0 ? 1.0 : grad[i] < 0 ? -1.0 : 0.0;
    const double expect = grad[i] == 0.0
                              ? decayed
                              : decayed - 0.1 * grad[i] / (std::abs(grad[i]) + 1e-8);
    CHECK(model.params[i] == doctest::Approx(expect).epsilon(1e-9));
    CHECK(std::abs(model.params[i] - decayed + 0.1 * sign) < 1e-6);
  }
}

TEST_CASE("adam converges on a toy quadratic") {
  // Minimize (theta - 3)^2 over a single parameter.
  MlpModel model = makeMlp({1, 1}, 0.0, 1);
  model.params = {0.0, 0.0};
  OptimizerState state = makeOptimizer(model, 0.05, 0.0);
  for (int step = 0; step < 2000; ++step) {
    const std::vector<double> grad = {2.0 * (model.params[0] - 3.0), 0.0};
    adamStep(model, state, grad);
  }
  CHECK(model.params[0] == doctest::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("checkpoints round-trip exactly") {
  TempDir tmp("ckpt");
  Checkpoint ckpt;
  ckpt.model = oracle::randomModel({4, 3, 2}, 77, 0.9, 0.35);
  ckpt.rngSeed = 0xDEADBEEFull;
  ckpt.epoch = 12;
  saveCheckpoint(ckpt, tmp.file("model.bin"));
  const Checkpoint back = loadCheckpoint(tmp.file("model.bin"));
  CHECK(back.model.layerSizes == ckpt.model.layerSizes);
  CHECK(back.model.dropoutRate == ckpt.model.dropoutRate);
  CHECK(back.model.params == ckpt.model.params);  // bitwise
  CHECK(back.rngSeed == ckpt.rngSeed);
  CHECK(back.epoch == 12);
  // An unopenable path is a configuration mistake; corrupt content is DataError.
  CHECK_THROWS_AS(loadCheckpoint(tmp.file("missing.bin")), ConfigError);
}
