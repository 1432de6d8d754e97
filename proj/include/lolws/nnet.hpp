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

#ifndef LOLWS_NNET_HPP_
#define LOLWS_NNET_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lolws {

/// Fully connected rectifier network with a softmax head. Parameters live in
/// one flat array: per layer, the weight matrix (row-major, out x in) then
/// the bias vector.
struct MlpModel {
  std::vector<int> layerSizes;  // [d, hidden..., k]
  double dropoutRate = 0.2;
  std::vector<double> params;

  std::size_t numLayers() const { return layerSizes.size() - 1; }
  int inputDim() const { return layerSizes.front(); }
  int numClasses() const { return layerSizes.back(); }
  std::size_t weightOffset(std::size_t layer) const;
  std::size_t biasOffset(std::size_t layer) const;
  std::size_t paramCount() const;

  /// Throws ConfigError on shape problems, NumericError on non-finite values.
  void validate() const;
};

/// He-style uniform init, U(-sqrt(6/fanIn), sqrt(6/fanIn)); biases zero.
MlpModel makeMlp(std::vector<int> layerSizes, double dropoutRate, std::uint64_t initSeed);

enum class ForwardMode { Train, Eval };

/// Intermediate state of one forward pass, reusable across examples.
struct ForwardCache {
  std::vector<std::vector<double>> act;    // act[0] = x, act[l] = input to layer l
  std::vector<std::vector<double>> preact; // preact[l] = W_l act[l] + b_l
  std::vector<std::vector<double>> mask;   // inverted-dropout factors per hidden layer
  std::vector<double> probs;               // softmax output
  ForwardMode mode = ForwardMode::Eval;
  std::size_t shapeTag = 0;                // paramCount of the model that filled it
};

/// Runs the network on x and fills the cache. Train mode draws the dropout
/// masks from dropoutSeed; eval mode is deterministic and ignores the seed.
void forward(const MlpModel& model, std::span<const double> x, ForwardMode mode,
             std::uint64_t dropoutSeed, ForwardCache& cache);

/// Accumulates d(loss)/d(theta) into grad (length paramCount), given
/// d(loss)/d(probs) at the cached forward pass.
void paramGrad(const MlpModel& model, const ForwardCache& cache,
               std::span<const double> outputGrad, std::span<double> grad);

/// Writes d(probs[classIndex])/dx through the cached pass into out (length d).
void inputGrad(const MlpModel& model, const ForwardCache& cache, int classIndex,
               std::span<double> out);

/// One term of a penalty functional that is linear in model input gradients:
/// weight = d(penalty)/d(dprobs[classIndex]/dx[featureIndex]).
struct PenaltyResidual {
  std::uint32_t featureIndex = 0;
  int classIndex = 0;
  double weight = 0.0;
};

/// Accumulates into grad the exact parameter gradient of
///   sum_r weight_r * d(probs[y_r])/dx[j_r]
/// at the cached eval-mode pass, by differentiating the directional
/// derivative of the forward pass (forward-over-reverse).
void penaltyParamGrad(const MlpModel& model, const ForwardCache& cache,
                      std::span<const PenaltyResidual> residuals, std::span<double> grad);

struct OptimizerState {
  std::vector<double> m;  // first moments
  std::vector<double> v;  // second moments
  std::int64_t step = 0;
  double learningRate = 1e-3;
  double weightDecay = 0.0;
};

OptimizerState makeOptimizer(const MlpModel& model, double learningRate, double weightDecay);

/// Adam with beta1=0.9, beta2=0.999, eps=1e-8, bias correction; decoupled
/// weight decay theta <- theta * (1 - lr*wd) applied before the Adam delta.
void adamStep(MlpModel& model, OptimizerState& state, std::span<const double> grad);

struct Checkpoint {
  MlpModel model;
  std::uint64_t rngSeed = 0;
  int epoch = 0;
};

void saveCheckpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint loadCheckpoint(const std::string& path);

}  // namespace lolws

#endif  // LOLWS_NNET_HPP_
