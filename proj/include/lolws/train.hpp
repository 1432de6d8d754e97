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

#ifndef LOLWS_TRAIN_HPP_
#define LOLWS_TRAIN_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lolws/data.hpp"
#include "lolws/labelers.hpp"
#include "lolws/labelmodels.hpp"
#include "lolws/losses.hpp"
#include "lolws/nnet.hpp"

namespace lolws {

/// Training methods. The LoL family optimizes the per-labeler objective
/// directly; the rest train cross-entropy against aggregated pseudolabels.
enum class Method {
  LoL,            // per-labeler loss + gradient penalty, uniform weights
  LoLSimple,      // per-labeler loss only
  LoLCoverage,    // penalty + coverage weighting
  LoLAccuracy,    // penalty + estimated-accuracy weighting
  MajorityVote,   // hard majority-vote pseudolabels
  SoftMajorityVote,
  TripletMean,    // triplet-estimated posteriors, mean aggregation
  TripletMedian,  // triplet-estimated posteriors, median aggregation
};

const char* methodName(Method method);
Method methodFromName(const std::string& name);

/// True for methods whose loss is a sum over individual labeler votes.
bool methodIsLossBased(Method method);
/// True for methods that add the input-gradient penalty.
bool methodUsesPenalty(Method method);

struct RunConfig {
  Method method = Method::LoL;
  LossConfig loss;
  double learningRate = 1e-3;
  double weightDecay = 0.0;
  int epochs = 30;
  int batchSize = 128;
  std::uint64_t seed = 0;
  std::optional<std::size_t> maxTrainExamples;
  std::vector<int> hiddenSizes = {64, 16};
  double dropoutRate = 0.2;
  int tripletMinOverlap = 10;  // 0 disables the overlap guard
  int jobs = 0;                // 0 = OpenMP default; never affects results

  void validate(int numClasses) const;

  /// Loss config with the method's conventions folded in: the method fixes
  /// the weighting, non-penalty methods drop the penalty, and penalty
  /// methods default to the square hinge when no kind is set.
  LossConfig effectiveLoss() const;
};

struct EpochMetrics {
  int epoch = 0;  // 1-based
  double trainLoss = 0.0;
  double classificationLoss = 0.0;
  double penaltyLoss = 0.0;
  double validationAccuracy = 0.0;
};

struct TrainReport {
  std::string method;
  RunConfig config;
  std::vector<EpochMetrics> epochHistory;
  int selectedEpoch = 0;  // 1-based epoch with the best validation accuracy
  double selectedValidationAccuracy = 0.0;
  double testAccuracy = 0.0;
  std::size_t trainExamplesUsed = 0;
  double wallTimeSeconds = 0.0;  // volatile; kept out of stable report files
};

struct TrainResult {
  MlpModel model;
  TrainReport report;
};

struct EvalResult {
  double accuracy = 0.0;
  std::vector<std::vector<int>> confusion;  // [gold][predicted]
};

/// 0-1 accuracy and confusion counts; argmax ties go to the lowest class.
EvalResult evaluate(const MlpModel& model, const Dataset& ds);

/// Everything trainOnce needs besides the splits: the (possibly truncated)
/// training set, its vote matrix, and the method's targets and weights.
struct TrainingInputs {
  Dataset train;
  VoteMatrix votes;
  std::vector<SmoothedLabelerGradient> gradients;  // penalty methods only
  WeightScheme weights;
  std::vector<int> hardTargets;         // MajorityVote
  std::vector<SoftLabel> softTargets;   // SoftMajorityVote, Triplet*
  std::optional<AccuracyEstimate> accuracies;
};

TrainingInputs prepareTrainingInputs(const RunConfig& cfg, const DatasetSplits& splits,
                                     const std::vector<LabelerSpec>& specs);

/// Mini-batch Adam for cfg.epochs, validation accuracy after every epoch,
/// returns the parameters from the best epoch (ties: earliest). Fully
/// deterministic given cfg.seed, for any jobs value. When metricsStream is
/// set, one JSON object per epoch is written to it.
TrainResult trainOnce(const RunConfig& cfg, const TrainingInputs& inputs,
                      const DatasetSplits& splits, std::ostream* metricsStream = nullptr);

/// Convenience overload: prepares the inputs from the labeler specs first.
TrainResult trainOnce(const RunConfig& cfg, const DatasetSplits& splits,
                      const std::vector<LabelerSpec>& specs,
                      std::ostream* metricsStream = nullptr);

struct SweepSpec {
  std::vector<double> learningRates = {0.1, 0.01, 0.001, 0.0001};
  std::vector<double> weightDecays = {0.0, 0.01, 0.001};
  std::vector<double> thresholds = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> alphas = {0.1, 0.01, 0.001, 0.0001, 0.00001};
  std::optional<int> budget;  // absent = full grid
  std::uint64_t seed = 0;     // budgeted subset sampling only

  void validate() const;
};

struct SweepTrial {
  RunConfig config;
  TrainReport report;
};

struct SweepResult {
  RunConfig best;
  TrainReport bestReport;
  std::vector<SweepTrial> trials;  // grid order
};

/// Grid (or seeded budgeted subset) over learning rate and weight decay,
/// plus alpha and threshold for penalty methods. Selection by validation
/// accuracy; ties by earlier selected epoch, lower alpha, lower learning
/// rate, then grid position. Trials run in parallel; results are keyed by
/// grid position, so the outcome is schedule-independent.
SweepResult sweep(const SweepSpec& sp, const RunConfig& base, const DatasetSplits& splits,
                  const std::vector<LabelerSpec>& specs);

struct AblationSpec {
  std::vector<Method> methods;
  std::vector<std::uint64_t> seeds;       // >= 2
  std::optional<SweepSpec> sweep;         // absent = train base config as-is
  bool sweepPerSeed = false;              // true: re-search per seed
};

struct AblationRow {
  Method method = Method::LoL;
  RunConfig config;  // the config behind meanTestAccuracy (first seed's when per-seed)
  std::vector<double> perSeedTestAccuracy;
  double meanTestAccuracy = 0.0;
  double stdTestAccuracy = 0.0;  // n-1 denominator
};

struct AblationResult {
  std::vector<std::uint64_t> seeds;
  std::vector<AblationRow> rows;  // one per method, input order
};

/// Runs each method across the seeds and aggregates mean and standard
/// deviation of test accuracy. With a sweep spec, hyperparameters are
/// searched once on the first seed and the winner retrained on every seed;
/// sweepPerSeed repeats the search for each seed instead.
AblationResult ablationSuite(const RunConfig& base, const AblationSpec& spec,
                             const DatasetSplits& splits,
                             const std::vector<LabelerSpec>& specs);

}  // namespace lolws

#endif  // LOLWS_TRAIN_HPP_
