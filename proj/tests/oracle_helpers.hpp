// Copyright 2026 The lolws Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Independent oracles used by the unit and acceptance tests: brute-force
// expectations over the Bernoulli cube, Monte Carlo estimates, central finite
// differences, and closed forms for linear-softmax networks. None of these
// share code with the analytic implementations they check.

#ifndef LOLWS_TESTS_ORACLE_HELPERS_HPP_
#define LOLWS_TESTS_ORACLE_HELPERS_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lolws/data.hpp"
#include "lolws/labelers.hpp"
#include "lolws/nnet.hpp"
#include "lolws/rng.hpp"

namespace lolws::oracle {

/// Example whose feature set is exactly the set bits of mask (values 1.0).
inline Example exampleFromMask(int dim, std::uint64_t mask) {
  Example ex;
  for (int j = 0; j < dim; ++j) {
    if (mask >> j & 1) ex.features.emplace_back(static_cast<std::uint32_t>(j), 1.0);
  }
  return ex;
}

/// E[onehot(labeler vote) | x ~ Bernoulli(phi)] by full enumeration of the
/// 2^d cube. Length k+1; abstain mass at index k. Black box in the labeler.
inline std::vector<double> bruteForceSmoothedValue(const LabelerSpec& spec,
                                                   std::span<const double> phi,
                                                   int numClasses) {
  const int d = static_cast<int>(phi.size());
  std::vector<double> mass(static_cast<std::size_t>(numClasses) + 1, 0.0);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << d); ++bits) {
    double p = 1.0;
    for (int j = 0; j < d; ++j) {
      p *= (bits >> j & 1) ? phi[static_cast<std::size_t>(j)]
                           : 1.0 - phi[static_cast<std::size_t>(j)];
    }
    const int vote = evaluateLabeler(spec, exampleFromMask(d, bits));
    mass[vote == kAbstain ? static_cast<std::size_t>(numClasses)
                          : static_cast<std::size_t>(vote)] += p;
  }
  return mass;
}

/// Exact gradient of the enumerated expectation: d(mass[c])/d(phi[q]) equals
/// the same sum with the q-th Bernoulli factor replaced by +-1. Returns a
/// (k+1) x d matrix, abstain row last. Black box in the labeler.
inline std::vector<std::vector<double>> bruteForceSmoothedGradient(
    const LabelerSpec& spec, std::span<const double> phi, int numClasses) {
  const int d = static_cast<int>(phi.size());
  std::vector<std::vector<double>> grad(static_cast<std::size_t>(numClasses) + 1,
                                        std::vector<double>(phi.size(), 0.0));
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << d); ++bits) {
    const int vote = evaluateLabeler(spec, exampleFromMask(d, bits));
    const std::size_t row = vote == kAbstain ? static_cast<std::size_t>(numClasses)
                                             : static_cast<std::size_t>(vote);
    for (int q = 0; q < d; ++q) {
      double p = (bits >> q & 1) ? 1.0 : -1.0;
      for (int j = 0; j < d; ++j) {
        if (j == q) continue;
        p *= (bits >> j & 1) ? phi[static_cast<std::size_t>(j)]
                             : 1.0 - phi[static_cast<std::size_t>(j)];
      }
      grad[row][static_cast<std::size_t>(q)] += p;
    }
  }
  return grad;
}

/// Same expectation by sampling; for the +-0.01 statistical checks.
inline std::vector<double> monteCarloSmoothedValue(const LabelerSpec& spec,
                                                   std::span<const double> phi, int numClasses,
                                                   int samples, std::uint64_t seed) {
  const int d = static_cast<int>(phi.size());
  std::vector<double> mass(static_cast<std::size_t>(numClasses) + 1, 0.0);
  Rng rng(seed);
  Example ex;
  for (int s = 0; s < samples; ++s) {
    ex.features.clear();
    for (int j = 0; j < d; ++j) {
      if (rng.bernoulli(phi[static_cast<std::size_t>(j)])) {
        ex.features.emplace_back(static_cast<std::uint32_t>(j), 1.0);
      }
    }
    const int vote = evaluateLabeler(spec, ex);
    mass[vote == kAbstain ? static_cast<std::size_t>(numClasses)
                          : static_cast<std::size_t>(vote)] += 1.0;
  }
  for (double& v : mass) v /= samples;
  return mass;
}

/// Central finite difference of a scalar function of one phi coordinate.
inline double centralDiff(const std::function<double(double)>& f, double x,
                          double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Central finite difference of lossOf over every model parameter.
inline std::vector<double> fdParamGrad(const MlpModel& model,
                                       const std::function<double(const MlpModel&)>& lossOf,
                                       double h = 1e-5) {
  MlpModel probe = model;
  std::vector<double> grad(model.paramCount());
  for (std::size_t i = 0; i < probe.params.size(); ++i) {
    const double saved = probe.params[i];
    probe.params[i] = saved + h;
    const double up = lossOf(probe);
    probe.params[i] = saved - h;
    const double down = lossOf(probe);
    probe.params[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

/// Worst-case gradcheck error: |a-b| / max(1, |a|, |b|) over all entries.
inline double maxRelError(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({1.0, std::abs(a[i]), std::abs(b[i])});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

/// d(softmax(Wx+b)[y])/dx[j] for a no-hidden-layer network, closed form:
/// p_y (W_yj - sum_c p_c W_cj).
inline double linearSoftmaxInputGrad(const MlpModel& model, std::span<const double> probs,
                                     int classIndex, int featureIndex) {
  const int d = model.inputDim();
  const int k = model.numClasses();
  const std::size_t w0 = model.weightOffset(0);
  double avg = 0.0;
  for (int c = 0; c < k; ++c) {
    avg += probs[static_cast<std::size_t>(c)] *
           model.params[w0 + static_cast<std::size_t>(c) * d + featureIndex];
  }
  return probs[static_cast<std::size_t>(classIndex)] *
         (model.params[w0 + static_cast<std::size_t>(classIndex) * d + featureIndex] - avg);
}

/// Small random network with parameters drawn U(-scale, scale).
inline MlpModel randomModel(std::vector<int> layerSizes, std::uint64_t seed,
                            double scale = 0.8, double dropoutRate = 0.0) {
  MlpModel model = makeMlp(std::move(layerSizes), dropoutRate, seed);
  Rng rng(deriveSeed(seed, Stream::Init, 99));
  for (double& p : model.params) p = rng.uniform(-scale, scale);
  return model;
}

/// Random dense vector with entries U(lo, hi).
inline std::vector<double> randomVector(std::size_t n, std::uint64_t seed, double lo,
                                        double hi) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

/// Random probability vector (softmax of uniform logits).
inline std::vector<double> randomProbs(int k, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> p(static_cast<std::size_t>(k));
  double total = 0.0;
  for (double& v : p) {
    v = std::exp(rng.uniform(-2.0, 2.0));
    total += v;
  }
  for (double& v : p) v /= total;
  return p;
}

/// Vote matrix with conditionally independent labelers of known accuracy:
/// vote = gold with probability accuracy[i], the other class otherwise,
/// abstain with probability 1-coverage, independently across labelers.
/// Binary tasks only. Returns the matrix and the gold labels.
struct PlantedVotes {
  VoteMatrix votes;
  std::vector<int> gold;
};
inline PlantedVotes plantedBinaryVotes(const std::vector<double>& accuracy, double coverage,
                                       std::size_t n, std::uint64_t seed) {
  PlantedVotes out;
  const std::size_t m = accuracy.size();
  out.votes.numExamples = n;
  for (std::size_t i = 0; i < m; ++i) out.votes.labelerNames.push_back("lf" + std::to_string(i));
  out.votes.votes.resize(n * m, kAbstain);
  out.gold.resize(n);
  Rng rng(seed);
  for (std::size_t r = 0; r < n; ++r) {
    const int y = rng.bernoulli(0.5) ? 1 : 0;
    out.gold[r] = y;
    for (std::size_t i = 0; i < m; ++i) {
      if (!rng.bernoulli(coverage)) continue;
      const bool correct = rng.bernoulli(accuracy[i]);
      out.votes.votes[r * m + i] = correct ? y : 1 - y;
    }
  }
  return out;
}

}  // namespace lolws::oracle

#endif  // LOLWS_TESTS_ORACLE_HELPERS_HPP_
