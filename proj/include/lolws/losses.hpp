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

#ifndef LOLWS_LOSSES_HPP_
#define LOLWS_LOSSES_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lolws/data.hpp"
#include "lolws/labelers.hpp"
#include "lolws/labelmodels.hpp"
#include "lolws/nnet.hpp"

namespace lolws {

enum class PenaltyKind { None, Square, Linear, Exponential };
enum class WeightKind { Uniform, Coverage, Accuracy };

const char* penaltyKindName(PenaltyKind kind);
PenaltyKind penaltyKindFromName(const std::string& name);
const char* weightKindName(WeightKind kind);
WeightKind weightKindFromName(const std::string& name);

struct LossConfig {
  PenaltyKind penaltyKind = PenaltyKind::None;
  double alpha = 0.0;          // penalty weight
  double threshold = 1.0;      // hinge threshold c
  int smoothingSamples = 1;    // t
  double smoothingEpsilon = 0.0;
  std::optional<int> topK;     // gradient mask for differentiable labelers
  WeightKind weighting = WeightKind::Uniform;

  void validate() const;
};

/// Cross-entropy of the probability vector against a single vote, with a
/// 1e-12 probability floor. The output gradient is nonzero only at the voted
/// class; its value is returned in outputGradEntry.
struct SimpleLossResult {
  double value = 0.0;
  int voteClass = 0;
  double outputGradEntry = 0.0;
};
SimpleLossResult simpleLoss(std::span<const double> probs, int vote);

/// One hinged coordinate of a penalty term.
struct HingeEntry {
  std::uint32_t featureIndex = 0;
  int classIndex = 0;
  double residual = 0.0;    // [c * gLabeler - gModel]_+
  double gradWeight = 0.0;  // d(penalty)/d(gModel), <= 0
};
struct HingeResult {
  double value = 0.0;
  std::vector<HingeEntry> entries;
};

/// Penalty over the labeler's gradient entries. modelGradValues is aligned
/// with labelerGrad.entries. square: sum r^2; linear: sum r; exponential:
/// sum (e^r - 1), shifted so inactive hinges contribute zero.
HingeResult hingePenalty(std::span<const double> modelGradValues,
                         const SmoothedLabelerGradient& labelerGrad, double threshold,
                         PenaltyKind kind);

struct GradQuery {
  std::uint32_t featureIndex = 0;
  int classIndex = 0;
};

/// Bernoulli-smoothed model input gradient at the queried (feature, class)
/// entries: phi = (1-eps) x + eps/2, t seeded samples z ~ Ber(phi), mean of
/// inputGrad over samples. eps=0 degenerates to the exact gradient at x.
/// When sampledInputs is given it receives the drawn samples.
std::vector<double> modelSmoothedGrad(const MlpModel& model, std::span<const double> xBinary,
                                      std::span<const GradQuery> queries, int samples,
                                      double epsilon, std::uint64_t seed,
                                      std::vector<std::vector<double>>* sampledInputs = nullptr);

/// Keeps the topK largest-magnitude entries (ties: lower feature index wins).
void applyTopKMask(SmoothedLabelerGradient& grad, int topK);

struct WeightScheme {
  std::vector<double> perLabelerWeight;
  WeightKind kind = WeightKind::Uniform;
};

/// uniform: 1 each; coverage: 1/p_i with p_i the vote count of labeler i;
/// accuracy: w_i / (z p_i), z = sum of accuracies. Never-voting labelers get
/// weight 0 with a logged warning.
WeightScheme buildWeightScheme(WeightKind kind, const VoteMatrix& vm,
                               const std::optional<AccuracyEstimate>& acc);

struct PerExampleLoss {
  double value = 0.0;               // classificationPart + alpha * penaltyPart
  double classificationPart = 0.0;
  double penaltyPart = 0.0;
  std::vector<int> contributingLabelers;
};

/// Reusable per-thread buffers for objective evaluation.
struct LossScratch {
  ForwardCache trainCache;
  std::vector<ForwardCache> evalCaches;
  std::vector<std::vector<double>> smoothSamples;
  std::vector<double> xDense;
  std::vector<double> xBinary;
  std::vector<double> outputGrad;
  std::vector<double> denseGrad;
  std::vector<PenaltyResidual> residuals;
};

/// Loss and full parameter gradient of one example:
///   sum over non-abstaining labelers i of
///     u_i * (simpleLoss(h(x), vote_i) + alpha * hingePenalty_i),
///   u_i = perLabelerWeight[i] / m(x).
/// The classification term runs the dropout forward pass; penalty gradients
/// use a deterministic eval-mode subgraph on the binarized input. Gradient
/// is accumulated into grad. Rows with m(x)=0 contribute nothing.
PerExampleLoss exampleObjective(const MlpModel& model, const Dataset& ds,
                                std::size_t exampleIndex, const VoteMatrix& vm,
                                const std::vector<SmoothedLabelerGradient>& gradients,
                                const LossConfig& cfg, const WeightScheme& weights,
                                std::uint64_t dropoutSeed, std::uint64_t smoothingSeed,
                                std::span<double> grad, LossScratch& scratch);

/// Reference labeler gradients for the penalty, taken at phi = (1/2,...,1/2)
/// so they do not depend on the example. topK masking (when configured)
/// applies to linear labelers only.
std::vector<SmoothedLabelerGradient> referenceLabelerGradients(
    const std::vector<LabelerSpec>& specs, const TaskSchema& schema, const LossConfig& cfg);

/// Binary squared-loss identity pieces (test support): the aggregation of
/// per-vote squared losses versus the squared loss against the soft majority
/// vote target, which differ by ap/m - (ap/m)^2, constant in h.
double squaredLossAggregation(double h1, int ap, int an);
double squaredLossAggregationGrad(double h1, int ap, int an);
double softMajorityVoteSquaredLoss(double h1, int ap, int an);
double softMajorityVoteSquaredLossGrad(double h1, int ap, int an);

}  // namespace lolws

#endif  // LOLWS_LOSSES_HPP_
