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

#include "lolws/synthetic.hpp"

#include <cmath>
#include <string>

#include "lolws/common.hpp"
#include "lolws/rng.hpp"

namespace lolws {

namespace {

constexpr double kBackgroundRate = 0.05;

// Fire rate on examples of classes the rule does not vote: fixing accuracy a
// over non-abstentions under a uniform prior gives
//   a = c / (c + (k-1) * wrongRate)  =>  wrongRate = c (1-a) / (a (k-1)).
double wrongClassRate(double accuracy, double coverage, int numClasses) {
  return coverage * (1.0 - accuracy) / (accuracy * (numClasses - 1));
}

// Two keywords firing independently at rate q give 1-(1-q)^2 = target.
double perKeywordRate(double targetFireRate) {
  return 1.0 - std::sqrt(1.0 - targetFireRate);
}

// Class owning each keyword feature; keyword features precede noise features.
struct KeywordLayout {
  std::vector<int> ownerClass;
  int count() const { return static_cast<int>(ownerClass.size()); }
};

Dataset drawSplit(const SyntheticTaskConfig& cfg, Split split, int numExamples,
                  const TaskSchema& schema, const KeywordLayout& layout,
                  std::uint64_t splitSeed) {
  Rng rng(splitSeed);
  const int k = cfg.numClasses;
  const double wrong = wrongClassRate(cfg.perLabelerAccuracy, cfg.perLabelerCoverage, k);
  const double qRight = perKeywordRate(cfg.perLabelerCoverage);
  const double qWrong = perKeywordRate(wrong);

  std::vector<int> labels(numExamples);
  for (int i = 0; i < numExamples; ++i) labels[i] = i % k;
  rng.shuffle(labels);

  std::vector<Example> examples;
  examples.reserve(numExamples);
  for (int i = 0; i < numExamples; ++i) {
    const int y = labels[i];
    Example ex;
    ex.goldLabel = y;
    for (int f = 0; f < cfg.featureDim; ++f) {
      double p;
      if (f < layout.count()) {
        p = (layout.ownerClass[static_cast<std::size_t>(f)] == y) ? qRight : qWrong;
      } else {
        const int featureClass = (f - layout.count()) % k;
        p = kBackgroundRate + (featureClass == y ? cfg.featureSignalStrength : 0.0);
      }
      if (rng.bernoulli(p)) ex.features.emplace_back(static_cast<std::uint32_t>(f), 1.0);
    }
    examples.push_back(std::move(ex));
  }
  return Dataset(schema, std::move(examples), split);
}

}  // namespace

void SyntheticTaskConfig::validate() const {
  if (numClasses < 2) throw ConfigError("synthetic: numClasses must be >= 2");
  if (numLabelers < 1) throw ConfigError("synthetic: numLabelers must be >= 1");
  if (featureDim < 2 * numLabelers) {
    throw ConfigError("synthetic: featureDim must be >= 2 * numLabelers");
  }
  if (numTrain < 1 || numValidation < 1 || numTest < 1) {
    throw ConfigError("synthetic: split sizes must be positive");
  }
  if (!(perLabelerAccuracy > 0.0 && perLabelerAccuracy <= 1.0)) {
    throw ConfigError("synthetic: accuracy must be in (0,1]");
  }
  if (!(perLabelerCoverage > 0.0 && perLabelerCoverage <= 1.0)) {
    throw ConfigError("synthetic: coverage must be in (0,1]");
  }
  if (wrongClassRate(perLabelerAccuracy, perLabelerCoverage, numClasses) > 1.0) {
    throw ConfigError("synthetic: accuracy too low for the requested coverage");
  }
  if (!(featureSignalStrength >= 0.0 && featureSignalStrength + kBackgroundRate <= 1.0)) {
    throw ConfigError("synthetic: featureSignalStrength out of range");
  }
}

SyntheticTask generateSynthetic(const SyntheticTaskConfig& cfg) {
  cfg.validate();

  TaskSchema schema;
  schema.numClasses = cfg.numClasses;
  for (int c = 0; c < cfg.numClasses; ++c) schema.classNames.push_back("class" + std::to_string(c));
  schema.featureDim = cfg.featureDim;

  // Labelers voting class 0 are redundant variants of one shared keyword
  // pair, the way hand-written rule sets pile onto a class's dominant
  // phrasing; every other labeler gets a private pair. Redundant votes
  // re-report the same evidence, so this is the regime that separates
  // aggregation rules, while each labeler keeps the configured marginal
  // accuracy and coverage.
  std::vector<LabelerSpec> labelers;
  KeywordLayout layout;
  layout.ownerClass = {0, 0};
  for (int i = 0; i < cfg.numLabelers; ++i) {
    LabelerSpec spec;
    spec.name = "kw" + std::to_string(i);
    spec.kind = LabelerKind::KeywordAny;
    spec.votedClass = i % cfg.numClasses;
    if (spec.votedClass == 0) {
      spec.keywordIndices = {0, 1};
    } else {
      const auto base = static_cast<std::uint32_t>(layout.count());
      spec.keywordIndices = {base, base + 1};
      layout.ownerClass.push_back(spec.votedClass);
      layout.ownerClass.push_back(spec.votedClass);
    }
    labelers.push_back(std::move(spec));
  }

  SyntheticTask task{
      drawSplit(cfg, Split::Train, cfg.numTrain, schema, layout,
                deriveSeed(cfg.rngSeed, Stream::Synthetic, 0)),
      drawSplit(cfg, Split::Validation, cfg.numValidation, schema, layout,
                deriveSeed(cfg.rngSeed, Stream::Synthetic, 1)),
      drawSplit(cfg, Split::Test, cfg.numTest, schema, layout,
                deriveSeed(cfg.rngSeed, Stream::Synthetic, 2)),
      std::move(labelers)};
  return task;
}

}  // namespace lolws
