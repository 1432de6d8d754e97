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

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "lolws/common.hpp"
#include "lolws/data.hpp"
#include "lolws/labelers.hpp"
#include "lolws/rng.hpp"
#include "lolws/synthetic.hpp"
#include "oracle_helpers.hpp"
#include "temp_files.hpp"

using namespace lolws;
using lolws::testing::TempDir;

namespace {

TaskSchema schemaOf(int k, int d) {
  TaskSchema s;
  s.numClasses = k;
  s.featureDim = d;
  for (int c = 0; c < k; ++c) s.classNames.push_back("class" + std::to_string(c));
  return s;
}

LabelerSpec keywordSpec(std::string name, std::vector<std::uint32_t> keywords, int votedClass) {
  LabelerSpec spec;
  spec.name = std::move(name);
  spec.kind = LabelerKind::KeywordAny;
  spec.keywordIndices = std::move(keywords);
  spec.votedClass = votedClass;
  return spec;
}

LabelerSpec linearSpec(std::string name, std::vector<double> weights, double bias,
                       double band) {
  LabelerSpec spec;
  spec.name = std::move(name);
  spec.kind = LabelerKind::Linear;
  spec.weightVector = std::move(weights);
  spec.biasTerm = bias;
  spec.positiveClass = 1;
  spec.negativeClass = 0;
  spec.abstainBand = band;
  return spec;
}

}  // namespace

TEST_CASE("keywordAny fires iff a keyword is present") {
  const LabelerSpec spec = keywordSpec("kw", {2, 5}, 1);
  CHECK(evaluateLabeler(spec, oracle::exampleFromMask(8, 1u << 2)) == 1);
  CHECK(evaluateLabeler(spec, oracle::exampleFromMask(8, 1u << 5)) == 1);
  CHECK(evaluateLabeler(spec, oracle::exampleFromMask(8, (1u << 2) | (1u << 5))) == 1);
  CHECK(evaluateLabeler(spec, oracle::exampleFromMask(8, 1u << 3)) == kAbstain);
  CHECK(evaluateLabeler(spec, oracle::exampleFromMask(8, 0)) == kAbstain);
}

TEST_CASE("linear labeler votes by sign with an abstain band") {
  const LabelerSpec spec = linearSpec("lin", {1.0, -1.0}, -0.5, 0.25);
  Example pos;  // score 1 - 0.5 = 0.5 > band
  pos.features = {{0, 1.0}};
  CHECK(evaluateLabeler(spec, pos) == 1);
  Example neg;  // score -1 - 0.5 = -1.5 < -band
  neg.features = {{1, 1.0}};
  CHECK(evaluateLabeler(spec, neg) == 0);
  Example near;  // score -0.5 + 0.7 = 0.2, inside the band
  near.features = {{0, 0.7}};
  CHECK(evaluateLabeler(spec, near) == kAbstain);
}

TEST_CASE("applyLabelers matches per-example evaluation") {
  SyntheticTaskConfig cfg;
  cfg.numTrain = 60;
  cfg.numValidation = 10;
  cfg.numTest = 10;
  const SyntheticTask task = generateSynthetic(cfg);
  const VoteMatrix vm = applyLabelers(task.labelers, task.train);
  REQUIRE(vm.numExamples == task.train.size());
  REQUIRE(vm.numLabelers() == task.labelers.size());
  for (std::size_t i = 0; i < vm.numExamples; ++i) {
    for (std::size_t j = 0; j < vm.numLabelers(); ++j) {
      CHECK(vm.vote(i, j) == evaluateLabeler(task.labelers[j], task.train.example(i)));
    }
  }
}

TEST_CASE("smoothedValue matches brute-force enumeration") {
  const int d = 7;
  const std::vector<double> phi = oracle::randomVector(d, 41, 0.05, 0.95);

  SUBCASE("keywordAny") {
    const LabelerSpec spec = keywordSpec("kw", {1, 4, 6}, 1);
    const auto analytic = smoothedValue(spec, phi, 2);
    const auto brute = oracle::bruteForceSmoothedValue(spec, phi, 2);
    REQUIRE(analytic.size() == 3);
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(analytic[c] == doctest::Approx(brute[c]).epsilon(1e-12));
    }
    // Closed form: fire mass is 1 - prod(1 - phi_j) over the keywords.
    const double expect = 1.0 - (1.0 - phi[1]) * (1.0 - phi[4]) * (1.0 - phi[6]);
    CHECK(analytic[1] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(analytic[0] == 0.0);
  }

  SUBCASE("linear evaluates at the mean input") {
    // Differentiable rules skip the Bernoulli relaxation: the value is the
    // one-hot vote at phi itself, abstain band included.
    const LabelerSpec spec = linearSpec("lin", {0.8, -0.6, 0.0, 0.4, 0.0, -0.9, 0.3}, 0.1, 0.2);
    double score = 0.1;
    for (int j = 0; j < d; ++j) {
      score += spec.weightVector[static_cast<std::size_t>(j)] * phi[static_cast<std::size_t>(j)];
    }
    const auto analytic = smoothedValue(spec, phi, 2);
    REQUIRE(analytic.size() == 3);
    CHECK(analytic[0] + analytic[1] + analytic[2] == doctest::Approx(1.0).epsilon(1e-12));
    if (score > spec.abstainBand) {
      CHECK(analytic[1] == 1.0);
    } else if (score < -spec.abstainBand) {
      CHECK(analytic[0] == 1.0);
    } else {
      CHECK(analytic[2] == 1.0);
    }

    // Inside the band the mass sits on abstain.
    LabelerSpec banded = spec;
    banded.weightVector.assign(7, 0.0);
    banded.biasTerm = 0.0;
    banded.abstainBand = 0.5;
    const auto abstained = smoothedValue(banded, phi, 2);
    CHECK(abstained[2] == 1.0);
  }
}

TEST_CASE("smoothedValue agrees with Monte Carlo at 1e5 samples") {
  const int d = 9;
  const std::vector<double> phi = oracle::randomVector(d, 43, 0.1, 0.9);
  const LabelerSpec spec = keywordSpec("kw", {0, 3, 8}, 0);
  const auto analytic = smoothedValue(spec, phi, 2);
  const auto mc = oracle::monteCarloSmoothedValue(spec, phi, 2, 100000, 7);
  for (std::size_t c = 0; c < 3; ++c) {
    CHECK(std::abs(analytic[c] - mc[c]) < 0.01);
  }
}

TEST_CASE("smoothedGradient matches finite differences of the brute force") {
  const int d = 6;
  std::vector<double> phi = oracle::randomVector(d, 47, 0.1, 0.9);

  const auto checkAgainstBruteForce = [&](const LabelerSpec& spec, int numClasses) {
    const SmoothedLabelerGradient grad = smoothedGradient(spec, phi, 3);
    CHECK(grad.labelerIndex == 3);
    CHECK_FALSE(grad.entries.empty());
    for (const auto& entry : grad.entries) {
      const auto f = [&](double v) {
        std::vector<double> probe = phi;
        probe[entry.featureIndex] = v;
        return oracle::bruteForceSmoothedValue(spec, probe,
                                               numClasses)[static_cast<std::size_t>(
            entry.classIndex)];
      };
      const double fd = oracle::centralDiff(f, phi[entry.featureIndex]);
      CHECK(entry.value == doctest::Approx(fd).epsilon(1e-6));
    }
  };

  SUBCASE("keywordAny analytic product form") {
    const LabelerSpec spec = keywordSpec("kw", {0, 2, 5}, 1);
    checkAgainstBruteForce(spec, 2);
    // Entries are exactly prod_{l != j}(1 - phi_l) at the voted class.
    const SmoothedLabelerGradient grad = smoothedGradient(spec, phi, 3);
    REQUIRE(grad.entries.size() == 3);
    for (const auto& entry : grad.entries) {
      CHECK(entry.classIndex == 1);
      double expect = 1.0;
      for (std::uint32_t l : spec.keywordIndices) {
        if (l != entry.featureIndex) expect *= 1.0 - phi[l];
      }
      CHECK(entry.value == doctest::Approx(expect).epsilon(1e-12));
    }
  }

  SUBCASE("linear labeler reports its own score gradient") {
    // Differentiable rules bypass smoothing: the entries are sign(s) * w_j on
    // the class the score selects at phi, zero weights omitted.
    const LabelerSpec spec = linearSpec("lin", {0.7, -0.5, 0.0, 0.9, -0.3, 0.2}, -0.1, 0.15);
    double score = spec.biasTerm;
    for (int j = 0; j < d; ++j) {
      score += spec.weightVector[static_cast<std::size_t>(j)] * phi[static_cast<std::size_t>(j)];
    }
    REQUIRE(std::abs(score) > spec.abstainBand);
    const int cls = score > 0.0 ? 1 : 0;
    const double sign = score > 0.0 ? 1.0 : -1.0;
    const SmoothedLabelerGradient grad = smoothedGradient(spec, phi, 3);
    REQUIRE(grad.entries.size() == 5);  // the zero weight is dropped
    for (const auto& entry : grad.entries) {
      CHECK(entry.classIndex == cls);
      CHECK(entry.value ==
            doctest::Approx(sign * spec.weightVector[entry.featureIndex]).epsilon(1e-12));
    }

    // Inside the band there is no selected class and no entries.
    LabelerSpec banded = spec;
    banded.abstainBand = std::abs(score) + 0.1;
    CHECK(smoothedGradient(banded, phi, 3).entries.empty());
  }
}

TEST_CASE("single-keyword gradient is exactly one at the voted class") {
  const LabelerSpec spec = keywordSpec("kw", {4}, 1);
  const std::vector<double> phi = oracle::randomVector(6, 53, 0.1, 0.9);
  const SmoothedLabelerGradient grad = smoothedGradient(spec, phi, 0);
  REQUIRE(grad.entries.size() == 1);
  CHECK(grad.entries[0].featureIndex == 4);
  CHECK(grad.entries[0].classIndex == 1);
  CHECK(grad.entries[0].value == 1.0);
}

TEST_CASE("labeler specs round-trip through JSON") {
  TempDir tmp("specs");
  TaskSchema schema = schemaOf(2, 6);
  schema.featureNames =
      std::vector<std::string>{"apple", "banana", "cherry", "date", "elder", "fig"};
  std::vector<LabelerSpec> specs = {keywordSpec("kw", {1, 4}, 1),
                                    linearSpec("lin", {0.5, 0, 0, -0.25, 0, 0}, 0.125, 0.0625)};
  saveLabelerSpecs(specs, schema, tmp.file("labelers.json"));
  const auto back = loadLabelerSpecs(tmp.file("labelers.json"), schema);
  REQUIRE(back.size() == 2);
  CHECK(back[0].name == "kw");
  CHECK(back[0].kind == LabelerKind::KeywordAny);
  CHECK(back[0].keywordIndices == std::vector<std::uint32_t>{1, 4});
  CHECK(back[0].votedClass == 1);
  CHECK(back[1].kind == LabelerKind::Linear);
  CHECK(back[1].weightVector == specs[1].weightVector);
  CHECK(back[1].biasTerm == 0.125);
  CHECK(back[1].abstainBand == 0.0625);
}

TEST_CASE("spec validation rejects schema mismatches") {
  const TaskSchema schema = schemaOf(2, 4);
  CHECK_THROWS_AS(keywordSpec("kw", {9}, 1).validate(schema), ConfigError);
  CHECK_THROWS_AS(keywordSpec("kw", {1}, 5).validate(schema), ConfigError);
  CHECK_THROWS_AS(keywordSpec("kw", {}, 1).validate(schema), ConfigError);
  CHECK_THROWS_AS(keywordSpec("kw", {2, 1}, 1).validate(schema), ConfigError);
  CHECK_THROWS_AS(linearSpec("lin", {1.0}, 0, 0).validate(schema), ConfigError);
  CHECK_NOTHROW(keywordSpec("kw", {1, 2}, 1).validate(schema));
}

TEST_CASE("coverage and abstention counting") {
  VoteMatrix vm;
  vm.numExamples = 4;
  vm.labelerNames = {"a", "b"};
  vm.votes = {0, kAbstain, 1, 1, kAbstain, kAbstain, 0, 1};
  CHECK(nonAbstainCount(vm, 0) == 1);
  CHECK(nonAbstainCount(vm, 1) == 2);
  CHECK(nonAbstainCount(vm, 2) == 0);
  CHECK(nonAbstainCount(vm, 3) == 2);
  const std::vector<double> cov = labelerCoverage(vm);
  REQUIRE(cov.size() == 2);
  CHECK(cov[0] == doctest::Approx(0.75));
  CHECK(cov[1] == doctest::Approx(0.5));
}
