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

#include "lolws/train.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "lolws/batch.hpp"
#include "lolws/common.hpp"
#include "lolws/rng.hpp"

namespace lolws {

const char* methodName(Method method) {
  switch (method) {
    case Method::LoL: return "LoL";
    case Method::LoLSimple: return "LoL-simple";
    case Method::LoLCoverage: return "LoL-c";
    case Method::LoLAccuracy: return "LoL-a";
    case Method::MajorityVote: return "MV";
    case Method::SoftMajorityVote: return "SoftMV";
    case Method::TripletMean: return "T-Mean";
    case Method::TripletMedian: return "T-Median";
  }
  throw ConfigError("unknown method enum value");
}

Method methodFromName(const std::string& name) {
  static constexpr Method kAll[] = {
      Method::LoL,          Method::LoLSimple,        Method::LoLCoverage,
      Method::LoLAccuracy,  Method::MajorityVote,     Method::SoftMajorityVote,
      Method::TripletMean,  Method::TripletMedian,
  };
  for (Method m : kAll) {
    if (name == methodName(m)) return m;
  }
  throw ConfigError("unknown method '" + name +
                    "'; expected one of LoL, LoL-simple, LoL-c, LoL-a, MV, SoftMV, "
                    "T-Mean, T-Median");
}

bool methodIsLossBased(Method method) {
  switch (method) {
    case Method::LoL:
    case Method::LoLSimple:
    case Method::LoLCoverage:
    case Method::LoLAccuracy:
      return true;
    default:
      return false;
  }
}

bool methodUsesPenalty(Method method) {
  return method == Method::LoL || method == Method::LoLCoverage ||
         method == Method::LoLAccuracy;
}

void RunConfig::validate(int numClasses) const {
  if (!(learningRate > 0.0) || !std::isfinite(learningRate)) {
    throw ConfigError("learningRate must be positive and finite");
  }
  if (weightDecay < 0.0 || !std::isfinite(weightDecay)) {
    throw ConfigError("weightDecay must be non-negative and finite");
  }
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (batchSize < 1) throw ConfigError("batchSize must be at least 1");
  for (int h : hiddenSizes) {
    if (h < 1) throw ConfigError("hidden layer sizes must be positive");
  }
  if (dropoutRate < 0.0 || dropoutRate >= 1.0) {
    throw ConfigError("dropoutRate must be in [0, 1)");
  }
  if (tripletMinOverlap < 0) throw ConfigError("tripletMinOverlap must be non-negative");
  if (maxTrainExamples && *maxTrainExamples == 0) {
    throw ConfigError("maxTrainExamples must be positive when set");
  }
  if ((method == Method::TripletMean || method == Method::TripletMedian) &&
      numClasses != 2) {
    throw ConfigError(std::string(methodName(method)) +
                      " is defined for binary tasks only; this task has " +
                      std::to_string(numClasses) + " classes");
  }
  effectiveLoss().validate();
}

LossConfig RunConfig::effectiveLoss() const {
  LossConfig out = loss;
  switch (method) {
    case Method::LoL:
      out.weighting = WeightKind::Uniform;
      break;
    case Method::LoLSimple:
      out.weighting = WeightKind::Uniform;
      out.penaltyKind = PenaltyKind::None;
      out.alpha = 0.0;
      break;
    case Method::LoLCoverage:
      out.weighting = WeightKind::Coverage;
      break;
    case Method::LoLAccuracy:
      out.weighting = WeightKind::Accuracy;
      break;
    default:  // pseudolabel methods carry no per-labeler loss terms
      out.weighting = WeightKind::Uniform;
      out.penaltyKind = PenaltyKind::None;
      out.alpha = 0.0;
      break;
  }
  if (methodUsesPenalty(method) && out.penaltyKind == PenaltyKind::None) {
    out.penaltyKind = PenaltyKind::Square;
  }
  return out;
}

EvalResult evaluate(const MlpModel& model, const Dataset& ds) {
  if (ds.size() == 0) throw ConfigError("cannot evaluate on an empty dataset");
  const int d = model.inputDim();
  const int k = model.numClasses();
  if (ds.schema().featureDim != d || ds.schema().numClasses != k) {
    throw ConfigError("model and dataset shapes disagree");
  }
  EvalResult out;
  out.confusion.assign(static_cast<std::size_t>(k), std::vector<int>(k, 0));
  std::vector<double> x(static_cast<std::size_t>(d));
  ForwardCache cache;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    ds.densify(i, x);
    forward(model, x, ForwardMode::Eval, 0, cache);
    int pred = 0;
    for (int y = 1; y < k; ++y) {
      if (cache.probs[static_cast<std::size_t>(y)] >
          cache.probs[static_cast<std::size_t>(pred)]) {
        pred = y;
      }
    }
    const int gold = ds.label(i);
    out.confusion[static_cast<std::size_t>(gold)][static_cast<std::size_t>(pred)] += 1;
    if (pred == gold) ++correct;
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(ds.size());
  return out;
}

TrainingInputs prepareTrainingInputs(const RunConfig& cfg, const DatasetSplits& splits,
                                     const std::vector<LabelerSpec>& specs) {
  const int k = splits.train.schema().numClasses;
  cfg.validate(k);
  const LossConfig lossCfg = cfg.effectiveLoss();

  Dataset train = splits.train;
  if (cfg.maxTrainExamples) {
    if (*cfg.maxTrainExamples > train.size()) {
      throw ConfigError("maxTrainExamples (" + std::to_string(*cfg.maxTrainExamples) +
                        ") exceeds the training split (" + std::to_string(train.size()) +
                        " rows)");
    }
    train = train.truncated(*cfg.maxTrainExamples);
  }
  if (train.size() == 0) throw ConfigError("training split is empty");

  TrainingInputs in{std::move(train), VoteMatrix{}, {}, {}, {}, {}, std::nullopt};
  in.votes = applyLabelers(specs, in.train);

  bool anyVote = false;
  for (std::size_t i = 0; i < in.votes.numExamples && !anyVote; ++i) {
    anyVote = nonAbstainCount(in.votes, i) > 0;
  }
  if (!anyVote) {
    throw DataError("every training row abstained; there is nothing to train on");
  }

  switch (cfg.method) {
    case Method::MajorityVote:
      in.hardTargets = majorityVoteHard(in.votes, k, cfg.seed);
      in.weights = buildWeightScheme(WeightKind::Uniform, in.votes, std::nullopt);
      break;
    case Method::SoftMajorityVote:
      in.softTargets = majorityVoteSoft(in.votes, k);
      in.weights = buildWeightScheme(WeightKind::Uniform, in.votes, std::nullopt);
      break;
    case Method::TripletMean:
    case Method::TripletMedian: {
      const TripletAggregation agg = cfg.method == Method::TripletMean
                                         ? TripletAggregation::Mean
                                         : TripletAggregation::Median;
      in.accuracies = tripletAccuracies(in.votes, k, agg, cfg.tripletMinOverlap);
      in.softTargets = tripletSoftLabels(in.votes, *in.accuracies);
      in.weights = buildWeightScheme(WeightKind::Uniform, in.votes, std::nullopt);
      break;
    }
    default: {
      WeightKind wk = lossCfg.weighting;
      std::optional<AccuracyEstimate> acc;
      if (wk == WeightKind::Accuracy) {
        if (k == 2) {
          acc = tripletAccuracies(in.votes, k, TripletAggregation::Mean,
                                  cfg.tripletMinOverlap);
        } else {
          logWarn("accuracy weighting needs a binary task; using uniform weights");
          wk = WeightKind::Uniform;
        }
      }
      in.weights = buildWeightScheme(wk, in.votes, acc);
      in.accuracies = std::move(acc);
      if (methodUsesPenalty(cfg.method)) {
        in.gradients = referenceLabelerGradients(specs, in.train.schema(), lossCfg);
      }
      break;
    }
  }
  return in;
}

namespace {

// Soft-target cross-entropy through simpleLoss so the probability floor is
// shared with the per-vote path; fills outputGrad (length k).
double softTargetLoss(std::span<const double> probs, const SoftLabel& target,
                      std::vector<double>& outputGrad) {
  const int k = static_cast<int>(probs.size());
  outputGrad.assign(static_cast<std::size_t>(k), 0.0);
  double loss = 0.0;
  for (int y = 0; y < k; ++y) {
    const double q = target.distribution[static_cast<std::size_t>(y)];
    if (q <= 0.0) continue;
    const SimpleLossResult r = simpleLoss(probs, y);
    loss += q * r.value;
    outputGrad[static_cast<std::size_t>(y)] = q * r.outputGradEntry;
  }
  return loss;
}

void checkInputs(const RunConfig& cfg, const TrainingInputs& inputs) {
  if (inputs.votes.numExamples != inputs.train.size()) {
    throw ConfigError("vote matrix and training set are misaligned");
  }
  if (cfg.maxTrainExamples && inputs.train.size() != *cfg.maxTrainExamples) {
    throw ConfigError("training inputs were prepared with a different maxTrainExamples");
  }
  const std::size_t m = inputs.votes.numLabelers();
  if (methodIsLossBased(cfg.method)) {
    if (inputs.weights.perLabelerWeight.size() != m) {
      throw ConfigError("weight scheme does not cover every labeler");
    }
    const LossConfig lossCfg = cfg.effectiveLoss();
    if (lossCfg.penaltyKind != PenaltyKind::None && lossCfg.alpha > 0.0 &&
        inputs.gradients.size() != m) {
      throw ConfigError("penalty configured but labeler gradients are missing");
    }
  } else if (cfg.method == Method::MajorityVote) {
    if (inputs.hardTargets.size() != inputs.train.size()) {
      throw ConfigError("hard targets and training set are misaligned");
    }
  } else if (inputs.softTargets.size() != inputs.train.size()) {
    throw ConfigError("soft targets and training set are misaligned");
  }
}

}  // namespace

TrainResult trainOnce(const RunConfig& cfg, const TrainingInputs& inputs,
                      const DatasetSplits& splits, std::ostream* metricsStream) {
  const auto t0 = std::chrono::steady_clock::now();
  const int k = inputs.train.schema().numClasses;
  const int d = inputs.train.schema().featureDim;
  cfg.validate(k);
  checkInputs(cfg, inputs);
  const LossConfig lossCfg = cfg.effectiveLoss();
  const std::size_t n = inputs.train.size();

  std::vector<int> layers;
  layers.reserve(cfg.hiddenSizes.size() + 2);
  layers.push_back(d);
  layers.insert(layers.end(), cfg.hiddenSizes.begin(), cfg.hiddenSizes.end());
  layers.push_back(k);
  MlpModel model = makeMlp(layers, cfg.dropoutRate, cfg.seed);
  OptimizerState opt = makeOptimizer(model, cfg.learningRate, cfg.weightDecay);
  const std::size_t paramCount = model.paramCount();

  std::vector<double> grad(paramCount);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  TrainReport& report = result.report;
  report.method = methodName(cfg.method);
  report.config = cfg;
  report.trainExamplesUsed = n;

  std::vector<double> bestParams = model.params;
  double bestVal = -1.0;
  int bestEpoch = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng shuffleRng(deriveSeed(cfg.seed, Stream::Batching, static_cast<std::uint64_t>(epoch)));
    shuffleRng.shuffle(order);

    // Per-example dropout and smoothing seeds are keyed to the global row
    // index, so batch composition never changes an example's randomness.
    ExampleTerm term;
    if (methodIsLossBased(cfg.method)) {
      term = [&, epoch](std::size_t row, std::span<double> g, LossScratch& scratch) {
        return exampleObjective(
            model, inputs.train, row, inputs.votes, inputs.gradients, lossCfg,
            inputs.weights,
            deriveSeed(cfg.seed, Stream::Dropout, static_cast<std::uint64_t>(epoch), row),
            deriveSeed(cfg.seed, Stream::Smoothing, static_cast<std::uint64_t>(epoch), row),
            g, scratch);
      };
    } else if (cfg.method == Method::MajorityVote) {
      term = [&, epoch](std::size_t row, std::span<double> g, LossScratch& scratch) {
        PerExampleLoss out;
        if (nonAbstainCount(inputs.votes, row) == 0) return out;  // uncovered row
        scratch.xDense.resize(static_cast<std::size_t>(d));
        inputs.train.densify(row, scratch.xDense);
        forward(model, scratch.xDense, ForwardMode::Train,
                deriveSeed(cfg.seed, Stream::Dropout, static_cast<std::uint64_t>(epoch), row),
                scratch.trainCache);
        const SimpleLossResult sl =
            simpleLoss(scratch.trainCache.probs, inputs.hardTargets[row]);
        scratch.outputGrad.assign(static_cast<std::size_t>(k), 0.0);
        scratch.outputGrad[static_cast<std::size_t>(sl.voteClass)] = sl.outputGradEntry;
        paramGrad(model, scratch.trainCache, scratch.outputGrad, g);
        out.value = sl.value;
        out.classificationPart = sl.value;
        return out;
      };
    } else {
      term = [&, epoch](std::size_t row, std::span<double> g, LossScratch& scratch) {
        PerExampleLoss out;
        if (nonAbstainCount(inputs.votes, row) == 0) return out;  // uncovered row
        scratch.xDense.resize(static_cast<std::size_t>(d));
        inputs.train.densify(row, scratch.xDense);
        forward(model, scratch.xDense, ForwardMode::Train,
                deriveSeed(cfg.seed, Stream::Dropout, static_cast<std::uint64_t>(epoch), row),
                scratch.trainCache);
        out.value = softTargetLoss(scratch.trainCache.probs, inputs.softTargets[row],
                                   scratch.outputGrad);
        paramGrad(model, scratch.trainCache, scratch.outputGrad, g);
        out.classificationPart = out.value;
        return out;
      };
    }

    double sumLoss = 0.0;
    double sumCls = 0.0;
    double sumPen = 0.0;
    int batchIndex = 0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batchSize)) {
      const std::size_t len = std::min(static_cast<std::size_t>(cfg.batchSize), n - start);
      const std::span<const std::size_t> rows(order.data() + start, len);
      const BatchResult res = batchReduce(paramCount, rows, term, grad, cfg.jobs);
      if (!std::isfinite(res.loss)) {
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(batchIndex));
      }
      adamStep(model, opt, grad);
      sumLoss += res.loss * static_cast<double>(len);
      sumCls += res.classificationPart * static_cast<double>(len);
      sumPen += res.penaltyPart * static_cast<double>(len);
      ++batchIndex;
    }

    EpochMetrics metrics;
    metrics.epoch = epoch;
    metrics.trainLoss = sumLoss / static_cast<double>(n);
    metrics.classificationLoss = sumCls / static_cast<double>(n);
    metrics.penaltyLoss = sumPen / static_cast<double>(n);
    metrics.validationAccuracy = evaluate(model, splits.validation).accuracy;
    report.epochHistory.push_back(metrics);
    if (metricsStream) {
      nlohmann::ordered_json line;
      line["epoch"] = metrics.epoch;
      line["trainLoss"] = metrics.trainLoss;
      line["classificationLoss"] = metrics.classificationLoss;
      line["penaltyLoss"] = metrics.penaltyLoss;
      line["validationAccuracy"] = metrics.validationAccuracy;
      *metricsStream << line.dump() << "\n";
    }
    if (metrics.validationAccuracy > bestVal) {
      bestVal = metrics.validationAccuracy;
      bestEpoch = epoch;
      bestParams = model.params;
    }
  }

  model.params = std::move(bestParams);
  report.selectedEpoch = bestEpoch;
  report.selectedValidationAccuracy = bestVal;
  report.testAccuracy = evaluate(model, splits.test).accuracy;
  report.wallTimeSeconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  result.model = std::move(model);
  return result;
}

TrainResult trainOnce(const RunConfig& cfg, const DatasetSplits& splits,
                      const std::vector<LabelerSpec>& specs, std::ostream* metricsStream) {
  const TrainingInputs inputs = prepareTrainingInputs(cfg, splits, specs);
  return trainOnce(cfg, inputs, splits, metricsStream);
}

void SweepSpec::validate() const {
  if (learningRates.empty()) throw ConfigError("sweep learning-rate grid is empty");
  if (weightDecays.empty()) throw ConfigError("sweep weight-decay grid is empty");
  if (thresholds.empty()) throw ConfigError("sweep threshold grid is empty");
  if (alphas.empty()) throw ConfigError("sweep alpha grid is empty");
  if (budget && *budget < 1) throw ConfigError("sweep budget must be at least 1");
}

namespace {

// Strict "a beats b" ordering for sweep selection.
bool beats(const SweepTrial& a, const SweepTrial& b) {
  if (a.report.selectedValidationAccuracy != b.report.selectedValidationAccuracy) {
    return a.report.selectedValidationAccuracy > b.report.selectedValidationAccuracy;
  }
  if (a.report.selectedEpoch != b.report.selectedEpoch) {
    return a.report.selectedEpoch < b.report.selectedEpoch;
  }
  if (a.config.loss.alpha != b.config.loss.alpha) {
    return a.config.loss.alpha < b.config.loss.alpha;
  }
  return a.config.learningRate < b.config.learningRate;
}

}  // namespace

SweepResult sweep(const SweepSpec& sp, const RunConfig& base, const DatasetSplits& splits,
                  const std::vector<LabelerSpec>& specs) {
  sp.validate();
  base.validate(splits.train.schema().numClasses);
  const bool penalty = methodUsesPenalty(base.method);

  std::vector<RunConfig> combos;
  for (double lr : sp.learningRates) {
    for (double wd : sp.weightDecays) {
      RunConfig cfg = base;
      cfg.learningRate = lr;
      cfg.weightDecay = wd;
      if (!penalty) {
        combos.push_back(cfg);
        continue;
      }
      for (double alpha : sp.alphas) {
        for (double threshold : sp.thresholds) {
          cfg.loss.alpha = alpha;
          cfg.loss.threshold = threshold;
          combos.push_back(cfg);
        }
      }
    }
  }
  if (sp.budget && static_cast<std::size_t>(*sp.budget) < combos.size()) {
    std::vector<std::size_t> picks(combos.size());
    std::iota(picks.begin(), picks.end(), std::size_t{0});
    Rng rng(deriveSeed(sp.seed, Stream::Sweep));
    rng.shuffle(picks);
    picks.resize(static_cast<std::size_t>(*sp.budget));
    std::sort(picks.begin(), picks.end());
    std::vector<RunConfig> kept;
    kept.reserve(picks.size());
    for (std::size_t p : picks) kept.push_back(combos[p]);
    combos = std::move(kept);
  }

  const TrainingInputs inputs = prepareTrainingInputs(base, splits, specs);

  SweepResult out;
  out.trials.resize(combos.size());
  std::vector<std::exception_ptr> trialError(combos.size());

#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(combos.size()); ++idx) {
    const auto i = static_cast<std::size_t>(idx);
    try {
      out.trials[i].config = combos[i];
      out.trials[i].report = trainOnce(combos[i], inputs, splits).report;
    } catch (...) {
      trialError[i] = std::current_exception();
    }
  }
  for (const auto& err : trialError) {
    if (err) std::rethrow_exception(err);
  }

  std::size_t bestIdx = 0;
  for (std::size_t i = 1; i < out.trials.size(); ++i) {
    if (beats(out.trials[i], out.trials[bestIdx])) bestIdx = i;
  }
  out.best = out.trials[bestIdx].config;
  out.bestReport = out.trials[bestIdx].report;
  return out;
}

AblationResult ablationSuite(const RunConfig& base, const AblationSpec& spec,
                             const DatasetSplits& splits,
                             const std::vector<LabelerSpec>& specs) {
  if (spec.methods.empty()) throw ConfigError("ablation needs at least one method");
  if (spec.seeds.size() < 2) throw ConfigError("ablation needs at least 2 seeds");

  AblationResult out;
  out.seeds = spec.seeds;
  for (Method method : spec.methods) {
    AblationRow row;
    row.method = method;
    RunConfig cfg = base;
    cfg.method = method;
    if (spec.sweep && !spec.sweepPerSeed) {
      cfg.seed = spec.seeds.front();
      cfg = sweep(*spec.sweep, cfg, splits, specs).best;
    }
    row.config = cfg;
    for (std::uint64_t seed : spec.seeds) {
      double acc = 0.0;
      if (spec.sweep && spec.sweepPerSeed) {
        RunConfig perSeed = base;
        perSeed.method = method;
        perSeed.seed = seed;
        SweepSpec perSeedSpec = *spec.sweep;
        perSeedSpec.seed = seed;
        const SweepResult sr = sweep(perSeedSpec, perSeed, splits, specs);
        acc = sr.bestReport.testAccuracy;
        if (seed == spec.seeds.front()) row.config = sr.best;
      } else {
        cfg.seed = seed;
        acc = trainOnce(cfg, splits, specs).report.testAccuracy;
      }
      row.perSeedTestAccuracy.push_back(acc);
    }
    const double n = static_cast<double>(row.perSeedTestAccuracy.size());
    double mean = 0.0;
    for (double a : row.perSeedTestAccuracy) mean += a;
    mean /= n;
    double var = 0.0;
    for (double a : row.perSeedTestAccuracy) var += (a - mean) * (a - mean);
    row.meanTestAccuracy = mean;
    row.stdTestAccuracy = n > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace lolws
