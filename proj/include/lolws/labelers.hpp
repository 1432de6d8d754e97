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

#ifndef LOLWS_LABELERS_HPP_
#define LOLWS_LABELERS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lolws/data.hpp"

namespace lolws {

/// Abstain sentinel in vote matrices. Class indices are >= 0.
inline constexpr int kAbstain = -1;

enum class LabelerKind { KeywordAny, Linear };

const char* labelerKindName(LabelerKind kind);

struct LabelerSpec {
  std::string name;
  LabelerKind kind = LabelerKind::KeywordAny;

  // keywordAny: vote votedClass iff any keyword feature is present.
  std::vector<std::uint32_t> keywordIndices;  // strictly increasing
  int votedClass = 0;

  // linear: vote by sign of w.x + b; abstain when |w.x + b| <= abstainBand.
  std::vector<double> weightVector;
  double biasTerm = 0.0;
  int positiveClass = 1;
  int negativeClass = 0;
  double abstainBand = 0.0;

  /// Throws ConfigError when the spec is inconsistent with the schema.
  void validate(const TaskSchema& schema) const;
};

struct VoteMatrix {
  std::size_t numExamples = 0;
  std::vector<std::string> labelerNames;
  /// Row-major n x m, entries in {0..k-1} or kAbstain.
  std::vector<int> votes;

  std::size_t numLabelers() const { return labelerNames.size(); }
  int vote(std::size_t i, std::size_t j) const { return votes[i * labelerNames.size() + j]; }
};

struct SmoothedLabelerGradient {
  struct Entry {
    std::uint32_t featureIndex = 0;
    int classIndex = 0;
    double value = 0.0;
  };
  std::size_t labelerIndex = 0;
  /// d(smoothed mass on classIndex)/d(phi[featureIndex]) restricted to real
  /// classes; the abstain component is dropped. Only features the labeler
  /// reads appear.
  std::vector<Entry> entries;
};

/// Vote of one labeler on one sparse example.
int evaluateLabeler(const LabelerSpec& spec, const Example& ex);

/// Evaluates every labeler on every example. Row-parallel; the result is
/// independent of the parallel schedule.
VoteMatrix applyLabelers(const std::vector<LabelerSpec>& specs, const Dataset& ds);

/// Expected vote distribution under x ~ Bernoulli(phi), closed form.
/// Returns length k+1: classes 0..k-1, abstain mass at index k.
std::vector<double> smoothedValue(const LabelerSpec& spec, std::span<const double> phi,
                                  int numClasses);

/// Analytic gradient of smoothedValue along the non-abstain dimensions.
SmoothedLabelerGradient smoothedGradient(const LabelerSpec& spec, std::span<const double> phi,
                                         std::size_t labelerIndex);

int nonAbstainCount(const VoteMatrix& vm, std::size_t exampleIndex);

/// Per-labeler coverage p_i = (1/n) sum_x 1{vote != abstain}.
std::vector<double> labelerCoverage(const VoteMatrix& vm);

/// JSON array of {name, kind, keywords|indices, class, ...}. Keyword rules
/// may name vocabulary words (resolved through schema.featureNames) or give
/// raw feature indices.
std::vector<LabelerSpec> loadLabelerSpecs(const std::string& path, const TaskSchema& schema);
void saveLabelerSpecs(const std::vector<LabelerSpec>& specs, const TaskSchema& schema,
                      const std::string& path);

}  // namespace lolws

#endif  // LOLWS_LABELERS_HPP_
