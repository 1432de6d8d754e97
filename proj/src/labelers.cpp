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

#include "lolws/labelers.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "lolws/common.hpp"

namespace lolws {

const char* labelerKindName(LabelerKind kind) {
  switch (kind) {
    case LabelerKind::KeywordAny: return "keywordAny";
    case LabelerKind::Linear: return "linear";
  }
  throw ConfigError("unknown labeler kind");
}

void LabelerSpec::validate(const TaskSchema& schema) const {
  if (name.empty()) throw ConfigError("labeler has no name");
  const auto d = static_cast<std::uint32_t>(schema.featureDim);
  if (kind == LabelerKind::KeywordAny) {
    if (keywordIndices.empty()) throw ConfigError("labeler " + name + ": no keywords");
    std::uint32_t prev = 0;
    bool first = true;
    for (std::uint32_t j : keywordIndices) {
      if (j >= d) throw ConfigError("labeler " + name + ": keyword index out of range");
      if (!first && j <= prev) {
        throw ConfigError("labeler " + name + ": keyword indices must be strictly increasing");
      }
      prev = j;
      first = false;
    }
    if (votedClass < 0 || votedClass >= schema.numClasses) {
      throw ConfigError("labeler " + name + ": voted class out of range");
    }
  } else {
    if (weightVector.size() != static_cast<std::size_t>(schema.featureDim)) {
      throw ConfigError("labeler " + name + ": weight vector length mismatch");
    }
    for (double w : weightVector) {
      if (!std::isfinite(w)) throw ConfigError("labeler " + name + ": non-finite weight");
    }
    if (!std::isfinite(biasTerm)) throw ConfigError("labeler " + name + ": non-finite bias");
    if (positiveClass < 0 || positiveClass >= schema.numClasses || negativeClass < 0 ||
        negativeClass >= schema.numClasses || positiveClass == negativeClass) {
      throw ConfigError("labeler " + name + ": invalid class mapping");
    }
    if (!(abstainBand >= 0.0)) throw ConfigError("labeler " + name + ": negative abstain band");
  }
}

namespace {

bool featurePresent(const Example& ex, std::uint32_t j) {
  const auto it = std::lower_bound(
      ex.features.begin(), ex.features.end(), j,
      [](const std::pair<std::uint32_t, double>& f, std::uint32_t idx) { return f.first < idx; });
  return it != ex.features.end() && it->first == j && it->second > 0.0;
}

void checkPhi(const LabelerSpec& spec, std::span<const double> phi) {
  for (double p : phi) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError("labeler " + spec.name + ": phi entry outside [0,1]");
    }
  }
}

double linearScoreAt(const LabelerSpec& spec, std::span<const double> phi) {
  double s = spec.biasTerm;
  for (std::size_t j = 0; j < spec.weightVector.size() && j < phi.size(); ++j) {
    s += spec.weightVector[j] * phi[j];
  }
  return s;
}

}  // namespace

int evaluateLabeler(const LabelerSpec& spec, const Example& ex) {
  if (spec.kind == LabelerKind::KeywordAny) {
    for (std::uint32_t j : spec.keywordIndices) {
      if (featurePresent(ex, j)) return spec.votedClass;
    }
    return kAbstain;
  }
  double s = spec.biasTerm;
  for (const auto& [j, v] : ex.features) s += spec.weightVector[j] * v;
  if (s > spec.abstainBand) return spec.positiveClass;
  if (s < -spec.abstainBand) return spec.negativeClass;
  return kAbstain;
}

VoteMatrix applyLabelers(const std::vector<LabelerSpec>& specs, const Dataset& ds) {
  if (specs.empty()) throw ConfigError("no labelers given");
  for (const auto& spec : specs) spec.validate(ds.schema());
  VoteMatrix vm;
  vm.numExamples = ds.size();
  for (const auto& spec : specs) vm.labelerNames.push_back(spec.name);
  const std::size_t n = ds.size();
  const std::size_t m = specs.size();
  vm.votes.assign(n * m, kAbstain);
  // Each (row, labeler) cell is written exactly once; schedule-independent.
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    const Example& ex = ds.example(static_cast<std::size_t>(i));
    for (std::size_t j = 0; j < m; ++j) {
      vm.votes[static_cast<std::size_t>(i) * m + j] = evaluateLabeler(specs[j], ex);
    }
  }
  return vm;
}

std::vector<double> smoothedValue(const LabelerSpec& spec, std::span<const double> phi,
                                  int numClasses) {
  checkPhi(spec, phi);
  std::vector<double> mass(static_cast<std::size_t>(numClasses) + 1, 0.0);
  if (spec.kind == LabelerKind::KeywordAny) {
    double noneFire = 1.0;
    for (std::uint32_t j : spec.keywordIndices) noneFire *= 1.0 - phi[j];
    mass[static_cast<std::size_t>(spec.votedClass)] = 1.0 - noneFire;
    mass[static_cast<std::size_t>(numClasses)] = noneFire;
    return mass;
  }
  // Linear rules are already differentiable; the relaxation degenerates to
  // evaluation at the mean input.
  const double s = linearScoreAt(spec, phi);
  if (s > spec.abstainBand) {
    mass[static_cast<std::size_t>(spec.positiveClass)] = 1.0;
  } else if (s < -spec.abstainBand) {
    mass[static_cast<std::size_t>(spec.negativeClass)] = 1.0;
  } else {
    mass[static_cast<std::size_t>(numClasses)] = 1.0;
  }
  return mass;
}

SmoothedLabelerGradient smoothedGradient(const LabelerSpec& spec, std::span<const double> phi,
                                         std::size_t labelerIndex) {
  checkPhi(spec, phi);
  SmoothedLabelerGradient g;
  g.labelerIndex = labelerIndex;
  if (spec.kind == LabelerKind::KeywordAny) {
    // d(1 - prod(1-phi_l))/d(phi_j) = prod_{l != j}(1 - phi_l).
    for (std::uint32_t j : spec.keywordIndices) {
      double others = 1.0;
      for (std::uint32_t l : spec.keywordIndices) {
        if (l != j) others *= 1.0 - phi[l];
      }
      g.entries.push_back({j, spec.votedClass, others});
    }
    return g;
  }
  // Linear: the labeler's own analytic input gradient, attached to the class
  // its score selects at phi. Inside the abstain band there is no voted
  // dimension to penalize.
  const double s = linearScoreAt(spec, phi);
  if (std::abs(s) <= spec.abstainBand) return g;
  const int cls = s > 0.0 ? spec.positiveClass : spec.negativeClass;
  const double sign = s > 0.0 ? 1.0 : -1.0;
  for (std::uint32_t j = 0; j < spec.weightVector.size(); ++j) {
    const double w = spec.weightVector[j];
    if (w != 0.0) g.entries.push_back({j, cls, sign * w});
  }
  return g;
}

int nonAbstainCount(const VoteMatrix& vm, std::size_t exampleIndex) {
  if (exampleIndex >= vm.numExamples) throw ConfigError("example index out of range");
  const std::size_t m = vm.numLabelers();
  int count = 0;
  for (std::size_t j = 0; j < m; ++j) {
    if (vm.vote(exampleIndex, j) != kAbstain) ++count;
  }
  return count;
}

std::vector<double> labelerCoverage(const VoteMatrix& vm) {
  const std::size_t m = vm.numLabelers();
  std::vector<double> cov(m, 0.0);
  for (std::size_t i = 0; i < vm.numExamples; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (vm.vote(i, j) != kAbstain) cov[j] += 1.0;
    }
  }
  if (vm.numExamples > 0) {
    for (double& c : cov) c /= static_cast<double>(vm.numExamples);
  }
  return cov;
}

std::vector<LabelerSpec> loadLabelerSpecs(const std::string& path, const TaskSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open labeler file: " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("labeler file " + path + ": invalid JSON: " + e.what());
  }
  if (!doc.is_array() || doc.empty()) {
    throw ConfigError("labeler file " + path + ": expected a non-empty JSON array");
  }
  std::vector<LabelerSpec> specs;
  for (const auto& j : doc) {
    LabelerSpec spec;
    spec.name = j.value("name", "labeler" + std::to_string(specs.size()));
    const std::string kind = j.value("kind", "keywordAny");
    if (kind == "keywordAny") {
      spec.kind = LabelerKind::KeywordAny;
      spec.votedClass = j.value("class", 0);
      std::vector<std::uint32_t> indices;
      if (j.contains("keywords")) {
        for (const auto& w : j.at("keywords")) {
          const std::string word = w.get<std::string>();
          const auto idx = schema.featureIndex(word);
          if (!idx) {
            throw ConfigError("labeler " + spec.name + ": keyword \"" + word +
                              "\" not in vocabulary");
          }
          indices.push_back(static_cast<std::uint32_t>(*idx));
        }
      }
      if (j.contains("indices")) {
        for (const auto& v : j.at("indices")) indices.push_back(v.get<std::uint32_t>());
      }
      std::sort(indices.begin(), indices.end());
      indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
      spec.keywordIndices = std::move(indices);
    } else if (kind == "linear") {
      spec.kind = LabelerKind::Linear;
      spec.weightVector = j.at("weights").get<std::vector<double>>();
      spec.biasTerm = j.value("bias", 0.0);
      spec.positiveClass = j.value("positiveClass", 1);
      spec.negativeClass = j.value("negativeClass", 0);
      spec.abstainBand = j.value("abstainBand", 0.0);
    } else {
      throw ConfigError("labeler " + spec.name + ": unknown kind \"" + kind + "\"");
    }
    spec.validate(schema);
    specs.push_back(std::move(spec));
  }
  return specs;
}

void saveLabelerSpecs(const std::vector<LabelerSpec>& specs, const TaskSchema& schema,
                      const std::string& path) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& spec : specs) {
    spec.validate(schema);
    nlohmann::json j;
    j["name"] = spec.name;
    j["kind"] = labelerKindName(spec.kind);
    if (spec.kind == LabelerKind::KeywordAny) {
      j["class"] = spec.votedClass;
      j["indices"] = spec.keywordIndices;
      if (schema.featureNames) {
        std::vector<std::string> words;
        for (std::uint32_t idx : spec.keywordIndices) words.push_back((*schema.featureNames)[idx]);
        j["keywords"] = words;
      }
    } else {
      j["weights"] = spec.weightVector;
      j["bias"] = spec.biasTerm;
      j["positiveClass"] = spec.positiveClass;
      j["negativeClass"] = spec.negativeClass;
      j["abstainBand"] = spec.abstainBand;
    }
    doc.push_back(std::move(j));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write labeler file: " + path);
  out << doc.dump(1, '\t') << "\n";
}

}  // namespace lolws
