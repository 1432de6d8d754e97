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

#ifndef LOLWS_LABELMODELS_HPP_
#define LOLWS_LABELMODELS_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "lolws/labelers.hpp"

namespace lolws {

struct SoftLabel {
  std::vector<double> distribution;  // length k, entries >= 0, sums to 1
};

struct VoteCounts {
  std::vector<int> perClassCounts;
  int abstainCount = 0;
};

VoteCounts voteCounts(const VoteMatrix& vm, std::size_t exampleIndex, int numClasses);

enum class AccuracyMethod { TripletMean, TripletMedian, Oracle };

struct AccuracyEstimate {
  std::vector<double> perLabelerAccuracy;  // length m
  AccuracyMethod method = AccuracyMethod::TripletMean;
};

/// Per-row argmax of class vote counts; ties and all-abstain rows resolved by
/// a per-row seeded draw, so the result is independent of evaluation order.
std::vector<int> majorityVoteHard(const VoteMatrix& vm, int numClasses, std::uint64_t seed);

/// Per-row distribution proportional to class vote counts; uniform when every
/// labeler abstains.
std::vector<SoftLabel> majorityVoteSoft(const VoteMatrix& vm, int numClasses);

enum class TripletAggregation { Mean, Median };

/// Closed-form accuracy estimates for binary tasks: with votes mapped to +/-1
/// and conditional independence given Y,
///   |E[li Y]| = sqrt(|E[li lj] E[li ll] / E[lj ll]|),
/// estimated over every triplet and combined by mean or median, then mapped
/// through w = (1 + |E[li Y]|) / 2 and clamped to [0.5+1e-3, 1-1e-3].
AccuracyEstimate tripletAccuracies(const VoteMatrix& vm, int numClasses,
                                   TripletAggregation aggregation, int minOverlap = 10);

/// True accuracies over non-abstentions, for oracle weighting and tests.
AccuracyEstimate oracleAccuracies(const VoteMatrix& vm, const std::vector<int>& goldLabels);

/// Naive-Bayes posterior with uniform prior from per-labeler accuracies.
std::vector<SoftLabel> tripletSoftLabels(const VoteMatrix& vm, const AccuracyEstimate& acc);

/// Accuracies normalized to sum 1.
std::vector<double> accuracyWeights(const AccuracyEstimate& acc);

}  // namespace lolws

#endif  // LOLWS_LABELMODELS_HPP_
