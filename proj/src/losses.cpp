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

#include "lolws/losses.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "lolws/common.hpp"
#include "lolws/rng.hpp"

namespace lolws {

namespace {

constexpr double kProbFloor = 1e-12;

}  // namespace

const char* penaltyKindName(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::None: return "none";
    case PenaltyKind::Square: return "square";
    case PenaltyKind::Linear: return "linear";
    case PenaltyKind::Exponential: return "exponential";
  }
  throw ConfigError("unknown penalty kind");
}

PenaltyKind penaltyKindFromName(const std::string& name) {
  if (name == "none") return PenaltyKind::None;
  if (name == "square") return PenaltyKind::Square;
  if (name == "linear") return PenaltyKind::Linear;
  if (name == "exponential") return PenaltyKind::Exponential;
  throw ConfigError("unknown penalty kind: " + name);
}

const char* weightKindName(WeightKind kind) {
  switch (kind) {
    case WeightKind::Uniform: return "uniform";
    case WeightKind::Coverage: return "coverage";
    case WeightKind::Accuracy: return "accuracy";
  }
  throw ConfigError("unknown weighting kind");
}

WeightKind weightKindFromName(const std::string& name) {
  if (name == "uniform") return WeightKind::Uniform;
  if (name == "coverage") return WeightKind::Coverage;
  if (name == "accuracy") return WeightKind::Accuracy;
  throw ConfigError("unknown weighting kind: " + name);
}

void LossConfig::validate() const {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be non-negative");
  if (!(threshold >= 0.0)) throw ConfigError("threshold must be non-negative");
  if (smoothingSamples < 1) throw ConfigError("smoothingSamples must be >= 1");
  if (!(smoothingEpsilon >= 0.0 && smoothingEpsilon < 1.0)) {
    throw ConfigError("smoothingEpsilon must be in [0,1)");
  }
  if (topK && *topK < 1) throw ConfigError("topK must be positive");
}

SimpleLossResult simpleLoss(std::span<const double> probs, int vote) {
  if (vote < 0 || static_cast<std::size_t>(vote) >= probs.size()) {
    throw ConfigError("simpleLoss needs a concrete vote; abstentions must be filtered");
  }
  const double p = std::max(probs[static_cast<std::size_t>(vote)], kProbFloor);
  return SimpleLossResult{-std::log(p), vote, -1.0 / p};
}

HingeResult hingePenalty(std::span<const double> modelGradValues,
                         const SmoothedLabelerGradient& labelerGrad, double threshold,
                         PenaltyKind kind) {
  if (kind == PenaltyKind::None) throw ConfigError("hingePenalty called with penaltyKind=none");
  if (modelGradValues.size() != labelerGrad.entries.size()) {
    throw ConfigError("model gradient values not aligned with labeler gradient");
  }
  HingeResult out;
  out.entries.reserve(labelerGrad.entries.size());
  for (std::size_t i = 0; i < labelerGrad.entries.size(); ++i) {
    const auto& e = labelerGrad.entries[i];
    const double r = std::max(threshold * e.value - modelGradValues[i], 0.0);
    double value = 0.0;
    double dPenaltyDResidual = 0.0;
    switch (kind) {
      case PenaltyKind::Square:
        value = r * r;
        dPenaltyDResidual = 2.0 * r;
        break;
      case PenaltyKind::Linear:
        value = r;
        dPenaltyDResidual = r > 0.0 ? 1.0 : 0.0;
        break;
      case PenaltyKind::Exponential:
        value = std::expm1(r);
        dPenaltyDResidual = r > 0.0 ? std::exp(r) : 0.0;
        break;
      case PenaltyKind::None:
        break;
    }
    out.value += value;
    // r = [c gL - gM]_+ falls with gM, so the penalty is non-increasing in it.
    out.entries.push_back({e.featureIndex, e.classIndex, r, -dPenaltyDResidual});
  }
  return out;
}

namespace {

// Mean input gradient over the smoothing samples, restricted to the queried
// entries; fills one eval-mode cache per drawn sample for the second-order
// penalty pass. eps=0 collapses every sample onto x.
std::vector<double> smoothedQueryGrads(const MlpModel& model, std::span<const double> xBinary,
                                       std::span<const GradQuery> queries, int samples,
                                       double epsilon, std::uint64_t seed,
                                       std::vector<ForwardCache>& caches,
                                       std::vector<std::vector<double>>& drawn,
                                       std::vector<double>& denseBuf) {
  const std::size_t d = xBinary.size();
  std::set<int> classes;
  for (const auto& q : queries) classes.insert(q.classIndex);

  const int effectiveSamples = epsilon == 0.0 ? 1 : samples;
  drawn.resize(static_cast<std::size_t>(effectiveSamples));
  if (caches.size() < static_cast<std::size_t>(effectiveSamples)) {
    caches.resize(static_cast<std::size_t>(effectiveSamples));
  }
  Rng rng(seed);
  std::vector<double> values(queries.size(), 0.0);
  denseBuf.resize(d);
  for (int s = 0; s < effectiveSamples; ++s) {
    auto& z = drawn[static_cast<std::size_t>(s)];
    if (epsilon == 0.0) {
      z.assign(xBinary.begin(), xBinary.end());
    } else {
      z.resize(d);
      for (std::size_t j = 0; j < d; ++j) {
        const double phi = (1.0 - epsilon) * xBinary[j] + epsilon / 2.0;
        z[j] = rng.bernoulli(phi) ? 1.0 : 0.0;
      }
    }
    forward(model, z, ForwardMode::Eval, 0, caches[static_cast<std::size_t>(s)]);
    for (int y : classes) {
      inputGrad(model, caches[static_cast<std::size_t>(s)], y, denseBuf);
      for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        if (queries[qi].classIndex == y) values[qi] += denseBuf[queries[qi].featureIndex];
      }
    }
  }
  for (double& v : values) v /= static_cast<double>(effectiveSamples);
  return values;
}

}  // namespace

std::vector<double> modelSmoothedGrad(const MlpModel& model, std::span<const double> xBinary,
                                      std::span<const GradQuery> queries, int samples,
                                      double epsilon, std::uint64_t seed,
                                      std::vector<std::vector<double>>* sampledInputs) {
  if (samples < 1) throw ConfigError("smoothingSamples must be >= 1");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ConfigError("smoothingEpsilon must be in [0,1)");
  std::vector<ForwardCache> caches;
  std::vector<std::vector<double>> drawn;
  std::vector<double> denseBuf;
  auto values =
      smoothedQueryGrads(model, xBinary, queries, samples, epsilon, seed, caches, drawn, denseBuf);
  if (sampledInputs) *sampledInputs = std::move(drawn);
  return values;
}

void applyTopKMask(SmoothedLabelerGradient& grad, int topK) {
  if (topK < 1) throw ConfigError("topK must be positive");
  if (grad.entries.size() <= static_cast<std::size_t>(topK)) return;
  std::vector<std::size_t> order(grad.entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ma = std::abs(grad.entries[a].value);
    const double mb = std::abs(grad.entries[b].value);
    if (ma != mb) return ma > mb;
    if (grad.entries[a].featureIndex != grad.entries[b].featureIndex) {
      return grad.entries[a].featureIndex < grad.entries[b].featureIndex;
    }
    return grad.entries[a].classIndex < grad.entries[b].classIndex;
  });
  order.resize(static_cast<std::size_t>(topK));
  std::sort(order.begin(), order.end());
  std::vector<SmoothedLabelerGradient::Entry> kept;
  kept.reserve(order.size());
  for (std::size_t idx : order) kept.push_back(grad.entries[idx]);
  grad.entries = std::move(kept);
}

WeightScheme buildWeightScheme(WeightKind kind, const VoteMatrix& vm,
                               const std::optional<AccuracyEstimate>& acc) {
  const std::size_t m = vm.numLabelers();
  WeightScheme scheme;
  scheme.kind = kind;
  scheme.perLabelerWeight.assign(m, 1.0);
  if (kind == WeightKind::Uniform) return scheme;

  std::vector<std::int64_t> voteCount(m, 0);
  for (std::size_t i = 0; i < vm.numExamples; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (vm.vote(i, j) != kAbstain) ++voteCount[j];
    }
  }
  double z = 0.0;
  if (kind == WeightKind::Accuracy) {
    if (!acc) throw ConfigError("accuracy weighting requires an accuracy estimate");
    if (acc->perLabelerAccuracy.size() != m) {
      throw ConfigError("accuracy estimate does not match vote matrix");
    }
    z = std::accumulate(acc->perLabelerAccuracy.begin(), acc->perLabelerAccuracy.end(), 0.0);
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (voteCount[j] == 0) {
      logWarn("labeler " + vm.labelerNames[j] + " never votes; weight set to 0");
      scheme.perLabelerWeight[j] = 0.0;
      continue;
    }
    if (kind == WeightKind::Coverage) {
      scheme.perLabelerWeight[j] = 1.0 / static_cast<double>(voteCount[j]);
    } else {
      scheme.perLabelerWeight[j] =
          acc->perLabelerAccuracy[j] / (z * static_cast<double>(voteCount[j]));
    }
  }
  return scheme;
}

PerExampleLoss exampleObjective(const MlpModel& model, const Dataset& ds,
                                std::size_t exampleIndex, const VoteMatrix& vm,
                                const std::vector<SmoothedLabelerGradient>& gradients,
                                const LossConfig& cfg, const WeightScheme& weights,
                                std::uint64_t dropoutSeed, std::uint64_t smoothingSeed,
                                std::span<double> grad, LossScratch& scratch) {
  const std::size_t m = vm.numLabelers();
  if (weights.perLabelerWeight.size() != m) throw ConfigError("weight scheme length mismatch");
  const bool penaltyOn = cfg.penaltyKind != PenaltyKind::None && cfg.alpha > 0.0;
  if (penaltyOn && gradients.size() != m) {
    throw ConfigError("labeler gradient list length mismatch");
  }

  PerExampleLoss out;
  const int mx = nonAbstainCount(vm, exampleIndex);
  if (mx == 0) return out;

  const auto d = static_cast<std::size_t>(ds.schema().featureDim);
  const auto k = static_cast<std::size_t>(ds.schema().numClasses);
  scratch.xDense.resize(d);
  ds.densify(exampleIndex, scratch.xDense);
  forward(model, scratch.xDense, ForwardMode::Train, dropoutSeed, scratch.trainCache);

  scratch.outputGrad.assign(k, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const int vote = vm.vote(exampleIndex, j);
    if (vote == kAbstain) continue;
    const double u = weights.perLabelerWeight[j] / static_cast<double>(mx);
    const SimpleLossResult sl = simpleLoss(scratch.trainCache.probs, vote);
    if (!std::isfinite(sl.value)) {
      throw NumericError("non-finite loss at example " + std::to_string(exampleIndex) +
                         ", labeler " + vm.labelerNames[j]);
    }
    out.classificationPart += u * sl.value;
    scratch.outputGrad[static_cast<std::size_t>(sl.voteClass)] += u * sl.outputGradEntry;
    out.contributingLabelers.push_back(static_cast<int>(j));
  }
  paramGrad(model, scratch.trainCache, scratch.outputGrad, grad);

  if (penaltyOn) {
    // Union of (feature, class) entries the firing labelers read.
    std::map<std::pair<std::uint32_t, int>, std::size_t> slot;
    std::vector<GradQuery> queries;
    for (std::size_t j = 0; j < m; ++j) {
      if (vm.vote(exampleIndex, j) == kAbstain) continue;
      for (const auto& e : gradients[j].entries) {
        const auto key = std::make_pair(e.featureIndex, e.classIndex);
        if (slot.emplace(key, queries.size()).second) {
          queries.push_back({e.featureIndex, e.classIndex});
        }
      }
    }
    if (!queries.empty()) {
      scratch.xBinary.resize(d);
      ds.densifyBinary(exampleIndex, scratch.xBinary);
      const auto values = smoothedQueryGrads(model, scratch.xBinary, queries,
                                             cfg.smoothingSamples, cfg.smoothingEpsilon,
                                             smoothingSeed, scratch.evalCaches,
                                             scratch.smoothSamples, scratch.denseGrad);
      std::vector<double> residualWeight(queries.size(), 0.0);
      std::vector<double> labelerValues;
      for (std::size_t j = 0; j < m; ++j) {
        if (vm.vote(exampleIndex, j) == kAbstain || gradients[j].entries.empty()) continue;
        const double u = weights.perLabelerWeight[j] / static_cast<double>(mx);
        labelerValues.clear();
        for (const auto& e : gradients[j].entries) {
          labelerValues.push_back(values[slot.at({e.featureIndex, e.classIndex})]);
        }
        const HingeResult hr =
            hingePenalty(labelerValues, gradients[j], cfg.threshold, cfg.penaltyKind);
        if (!std::isfinite(hr.value)) {
          throw NumericError("non-finite penalty at example " + std::to_string(exampleIndex) +
                             ", labeler " + vm.labelerNames[j]);
        }
        out.penaltyPart += u * hr.value;
        for (const auto& e : hr.entries) {
          residualWeight[slot.at({e.featureIndex, e.classIndex})] +=
              u * cfg.alpha * e.gradWeight;
        }
      }
      const auto numSamples = scratch.smoothSamples.size();
      scratch.residuals.clear();
      for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        if (residualWeight[qi] == 0.0) continue;
        scratch.residuals.push_back({queries[qi].featureIndex, queries[qi].classIndex,
                                     residualWeight[qi] / static_cast<double>(numSamples)});
      }
      if (!scratch.residuals.empty()) {
        for (std::size_t s = 0; s < numSamples; ++s) {
          penaltyParamGrad(model, scratch.evalCaches[s], scratch.residuals, grad);
        }
      }
    }
  }

  out.value = out.classificationPart + cfg.alpha * out.penaltyPart;
  if (!std::isfinite(out.value)) {
    throw NumericError("non-finite loss at example " + std::to_string(exampleIndex));
  }
  return out;
}

std::vector<SmoothedLabelerGradient> referenceLabelerGradients(
    const std::vector<LabelerSpec>& specs, const TaskSchema& schema, const LossConfig& cfg) {
  const std::vector<double> phi(static_cast<std::size_t>(schema.featureDim), 0.5);
  std::vector<SmoothedLabelerGradient> out;
  out.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    SmoothedLabelerGradient g = smoothedGradient(specs[i], phi, i);
    if (cfg.topK && specs[i].kind == LabelerKind::Linear) applyTopKMask(g, *cfg.topK);
    out.push_back(std::move(g));
  }
  return out;
}

double squaredLossAggregation(double h1, int ap, int an) {
  const int m = ap + an;
  if (m <= 0) throw ConfigError("squared-loss aggregation needs at least one vote");
  return (ap * (h1 - 1.0) * (h1 - 1.0) + an * h1 * h1) / static_cast<double>(m);
}

double squaredLossAggregationGrad(double h1, int ap, int an) {
  const int m = ap + an;
  if (m <= 0) throw ConfigError("squared-loss aggregation needs at least one vote");
  return (2.0 * ap * (h1 - 1.0) + 2.0 * an * h1) / static_cast<double>(m);
}

double softMajorityVoteSquaredLoss(double h1, int ap, int an) {
  const int m = ap + an;
  if (m <= 0) throw ConfigError("squared-loss aggregation needs at least one vote");
  const double q = static_cast<double>(ap) / m;
  return (h1 - q) * (h1 - q);
}

double softMajorityVoteSquaredLossGrad(double h1, int ap, int an) {
  const int m = ap + an;
  if (m <= 0) throw ConfigError("squared-loss aggregation needs at least one vote");
  const double q = static_cast<double>(ap) / m;
  return 2.0 * (h1 - q);
}

}  // namespace lolws
