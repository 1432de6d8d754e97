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

#ifndef LOLWS_SYNTHETIC_HPP_
#define LOLWS_SYNTHETIC_HPP_

#include <cstdint>
#include <vector>

#include "lolws/data.hpp"
#include "lolws/labelers.hpp"

namespace lolws {

/// Class-conditional sparse binary task with planted keyword labelers.
///
/// Labeler i votes class i mod k. Labelers voting class 0 are redundant
/// variants of one shared keyword pair; every other labeler owns a private
/// pair. Keyword fire rates are chosen so that, on examples of the voted
/// class, each rule fires with probability perLabelerCoverage, and its
/// accuracy over non-abstentions is perLabelerAccuracy (uniform class
/// prior). Coverage is conditional on the voted class: a rule voting y
/// cannot fire on all examples of other classes without destroying its
/// accuracy.
struct SyntheticTaskConfig {
  int numClasses = 2;
  int featureDim = 200;
  int numTrain = 2000;
  int numValidation = 250;
  int numTest = 2000;
  int numLabelers = 8;
  double perLabelerAccuracy = 0.75;
  double perLabelerCoverage = 0.4;
  /// Extra (non-keyword) features fire at a 0.05 background rate, plus this
  /// boost on examples of the class the feature is assigned to.
  double featureSignalStrength = 0.0;
  std::uint64_t rngSeed = 0;

  void validate() const;
};

struct SyntheticTask {
  Dataset train;
  Dataset validation;
  Dataset test;
  std::vector<LabelerSpec> labelers;
};

/// Deterministic in rngSeed. Gold labels are present on every split; the
/// train split keeps them behind the oracle accessor only.
SyntheticTask generateSynthetic(const SyntheticTaskConfig& cfg);

}  // namespace lolws

#endif  // LOLWS_SYNTHETIC_HPP_
