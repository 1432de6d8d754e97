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

#include "lolws/labelmodels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lolws/common.hpp"
#include "lolws/rng.hpp"

namespace lolws {

namespace {

constexpr double kAccuracyClampMargin = 1e-3;
constexpr double kDenominatorFloor = 1e-6;

}  // namespace

VoteCounts voteCounts(const VoteMatrix& vm, std::size_t exampleIndex, int numClasses) {
  VoteCounts counts;
  counts.perClassCounts.assign(static_cast<std::size_t>(numClasses), 0);
  const std::size_t m = vm.numLabelers();
  for (std::size_t j = 0; j < m; ++j) {
    const int v = vm.vote(exampleIndex, j);
    if (v == kAbstain) {
      ++counts.abstainCount;
    } else {
      ++counts.perClassCounts[static_cast<std::size_t>(v)];
    }
  }
  return counts;
}

std::vector<int> majorityVoteHard(const VoteMatrix& vm, int numClasses, std::uint64_t seed) {
  std::vector<int> labels(vm.numExamples, 0);
  for (std::size_t i = 0; i < vm.numExamples; ++i) {
    const VoteCounts counts = voteCounts(vm, i, numClasses);
    const int best = *std::max_element(counts.perClassCounts.begin(), counts.perClassCounts.end());
    Rng rng(deriveSeed(seed, Stream::TieBreak, i));
    if (best == 0) {
      labels[i] = static_cast<int>(rng.uniformInt(static_cast<std::uint64_t>(numClasses)));
      continue;
    }
    std::vector<int> argmax;
    for (int c = 0; c < numClasses; ++c) {
      if (counts.perClassCounts[static_cast<std::size_t>(c)] == best) argmax.push_back(c);
    }
    labels[i] = argmax[rng.uniformInt(argmax.size())];
  }
  return labels;
}

std::vector<SoftLabel> majorityVoteSoft(const VoteMatrix& vm, int numClasses) {
  std::vector<SoftLabel> soft(vm.numExamples);
  for (std::size_t i = 0; i < vm.numExamples; ++i) {
    const VoteCounts counts = voteCounts(vm, i, numClasses);
    int total = 0;
    for (int c : counts.perClassCounts) total += c;
    auto& dist = soft[i].distribution;
    dist.assign(static_cast<std::size_t>(numClasses), 0.0);
    if (total == 0) {
      std::fill(dist.begin(), dist.end(), 1.0 / numClasses);
    } else {
      for (int c = 0; c < numClasses; ++c) {
        dist[static_cast<std::size_t>(c)] =
            static_cast<double>(counts.perClassCounts[static_cast<std::size_t>(c)]) / total;
      }
    }
  }
  return soft;
}

AccuracyEstimate tripletAccuracies(const VoteMatrix& vm, int numClasses,
                                   TripletAggregation aggregation, int minOverlap) {
  if (numClasses != 2) {
    throw ConfigError("triplet accuracy estimation is defined for binary tasks only");
  }
  const std::size_t m = vm.numLabelers();
  if (m < 3) throw ConfigError("triplet accuracy estimation needs at least 3 labelers");
  if (minOverlap < 0) throw ConfigError("minOverlap must be non-negative");

  // Pairwise second moments over jointly non-abstaining rows, votes as +/-1.
  std::vector<double> moment(m * m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      std::int64_t overlap = 0;
      double sum = 0.0;
      for (std::size_t i = 0; i < vm.numExamples; ++i) {
        const int va = vm.vote(i, a);
        const int vb = vm.vote(i, b);
        if (va == kAbstain || vb == kAbstain) continue;
        ++overlap;
        sum += (va == 1 ? 1.0 : -1.0) * (vb == 1 ? 1.0 : -1.0);
      }
      if (overlap < minOverlap) {
        throw DataError("labelers " + vm.labelerNames[a] + " and " + vm.labelerNames[b] +
                        " share only " + std::to_string(overlap) +
                        " non-abstaining examples (need " + std::to_string(minOverlap) + ")");
      }
      // minOverlap 0 disables the guard for limited-data regimes; a pair with
      // no joint votes carries no correlation evidence and stays at 0.
      moment[a * m + b] = moment[b * m + a] =
          overlap == 0 ? 0.0 : sum / static_cast<double>(overlap);
    }
  }

  AccuracyEstimate est;
  est.method = aggregation == TripletAggregation::Mean ? AccuracyMethod::TripletMean
                                                       : AccuracyMethod::TripletMedian;
  est.perLabelerAccuracy.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> samples;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      for (std::size_t l = j + 1; l < m; ++l) {
        if (l == i) continue;
        const double denom = moment[j * m + l];
        if (std::abs(denom) < kDenominatorFloor) continue;
        samples.push_back(
            std::sqrt(std::abs(moment[i * m + j] * moment[i * m + l] / denom)));
      }
    }
    if (samples.empty()) {
      throw DataError("all triplets degenerate for labeler " + vm.labelerNames[i]);
    }
    double agg;
    if (aggregation == TripletAggregation::Mean) {
      agg = 0.0;
      for (double s : samples) agg += s;
      agg /= static_cast<double>(samples.size());
    } else {
      std::sort(samples.begin(), samples.end());
      const std::size_t mid = samples.size() / 2;
      agg = samples.size() % 2 == 1 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
    }
    const double w = (1.0 + agg) / 2.0;
    est.perLabelerAccuracy[i] =
        std::clamp(w, 0.5 + kAccuracyClampMargin, 1.0 - kAccuracyClampMargin);
  }
  return est;
}

AccuracyEstimate oracleAccuracies(const VoteMatrix& vm, const std::vector<int>& goldLabels) {
  if (goldLabels.size() != vm.numExamples) {
    throw ConfigError("gold label count does not match vote matrix");
  }
  const std::size_t m = vm.numLabelers();
  AccuracyEstimate est;
  est.method = AccuracyMethod::Oracle;
  est.perLabelerAccuracy.assign(m, 0.5);
  for (std::size_t j = 0; j < m; ++j) {
    std::int64_t fired = 0;
    std::int64_t correct = 0;
    for (std::size_t i = 0; i < vm.numExamples; ++i) {
      const int v = vm.vote(i, j);
      if (v == kAbstain) continue;
      ++fired;
      if (v == goldLabels[i]) ++correct;
    }
    if (fired > 0) {
      est.perLabelerAccuracy[j] = std::clamp(static_cast<double>(correct) / fired,
                                             0.5 + kAccuracyClampMargin,
                                             1.0 - kAccuracyClampMargin);
    }
  }
  return est;
}

std::vector<SoftLabel> tripletSoftLabels(const VoteMatrix& vm, const AccuracyEstimate& acc) {
  const std::size_t m = vm.numLabelers();
  if (acc.perLabelerAccuracy.size() != m) {
    throw ConfigError("accuracy estimate does not match vote matrix");
  }
  std::vector<SoftLabel> soft(vm.numExamples);
  for (std::size_t i = 0; i < vm.numExamples; ++i) {
    double logP1 = 0.0;
    double logP0 = 0.0;
    bool any = false;
    for (std::size_t j = 0; j < m; ++j) {
      const int v = vm.vote(i, j);
      if (v == kAbstain) continue;
      any = true;
      const double w = acc.perLabelerAccuracy[j];
      if (v == 1) {
        logP1 += std::log(w);
        logP0 += std::log1p(-w);
      } else {
        logP1 += std::log1p(-w);
        logP0 += std::log(w);
      }
    }
    auto& dist = soft[i].distribution;
    if (!any) {
      dist = {0.5, 0.5};
      continue;
    }
    const double hi = std::max(logP0, logP1);
    const double z = std::exp(logP0 - hi) + std::exp(logP1 - hi);
    dist = {std::exp(logP0 - hi) / z, std::exp(logP1 - hi) / z};
  }
  return soft;
}

std::vector<double> accuracyWeights(const AccuracyEstimate& acc) {
  if (acc.perLabelerAccuracy.empty()) throw ConfigError("empty accuracy estimate");
  double z = 0.0;
  for (double w : acc.perLabelerAccuracy) z += w;
  std::vector<double> out;
  out.reserve(acc.perLabelerAccuracy.size());
  for (double w : acc.perLabelerAccuracy) out.push_back(w / z);
  return out;
}

}  // namespace lolws
