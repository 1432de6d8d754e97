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

#include "lolws/data.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "lolws/common.hpp"
#include "lolws/rng.hpp"

namespace lolws {

namespace {

constexpr int kDatasetCacheVersion = 1;

template <typename T>
void requireUnique(const std::vector<T>& values, const char* what) {
  std::unordered_set<T> seen;
  for (const auto& v : values) {
    if (!seen.insert(v).second) {
      throw ConfigError(std::string("duplicate ") + what);
    }
  }
}

}  // namespace

void TaskSchema::validate() const {
  if (numClasses < 2) throw ConfigError("schema: numClasses must be >= 2");
  if (featureDim < 1) throw ConfigError("schema: featureDim must be >= 1");
  if (static_cast<int>(classNames.size()) != numClasses) {
    throw ConfigError("schema: classNames length must equal numClasses");
  }
  requireUnique(classNames, "class name");
  if (featureNames) {
    if (static_cast<int>(featureNames->size()) != featureDim) {
      throw ConfigError("schema: featureNames length must equal featureDim");
    }
    requireUnique(*featureNames, "feature name");
  }
}

std::optional<int> TaskSchema::featureIndex(const std::string& word) const {
  if (!featureNames) return std::nullopt;
  const auto it = std::find(featureNames->begin(), featureNames->end(), word);
  if (it == featureNames->end()) return std::nullopt;
  return static_cast<int>(it - featureNames->begin());
}

const char* splitName(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
  }
  return "?";
}

Split splitFromName(const std::string& name) {
  if (name == "train") return Split::Train;
  if (name == "validation") return Split::Validation;
  if (name == "test") return Split::Test;
  throw DataError("unknown split name: " + name);
}

Dataset::Dataset(TaskSchema schema, std::vector<Example> examples, Split split)
    : schema_(std::move(schema)), examples_(std::move(examples)), split_(split) {
  schema_.validate();
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    const Example& ex = examples_[i];
    std::uint32_t prev = 0;
    bool first = true;
    for (const auto& [idx, value] : ex.features) {
      if (idx >= static_cast<std::uint32_t>(schema_.featureDim)) {
        throw DataError("example " + std::to_string(i) + ": feature index out of range");
      }
      if (!first && idx <= prev) {
        throw DataError("example " + std::to_string(i) + ": feature indices not increasing");
      }
      if (value < 0.0 || !std::isfinite(value)) {
        throw DataError("example " + std::to_string(i) + ": feature value must be finite and >= 0");
      }
      prev = idx;
      first = false;
    }
    if (ex.goldLabel && (*ex.goldLabel < 0 || *ex.goldLabel >= schema_.numClasses)) {
      throw DataError("example " + std::to_string(i) + ": gold label out of range");
    }
    if (split_ != Split::Train && !ex.goldLabel) {
      throw DataError(std::string(splitName(split_)) + " split: example " + std::to_string(i) +
                      " is missing its gold label");
    }
  }
}

int Dataset::label(std::size_t i) const {
  if (split_ == Split::Train) {
    throw ConfigError("gold labels on the training split are oracle-only");
  }
  const auto& l = examples_[i].goldLabel;
  if (!l) throw DataError("example " + std::to_string(i) + " has no gold label");
  return *l;
}

std::optional<int> Dataset::oracleLabel(std::size_t i) const { return examples_[i].goldLabel; }

bool Dataset::allLabeled() const {
  return std::all_of(examples_.begin(), examples_.end(),
                     [](const Example& e) { return e.goldLabel.has_value(); });
}

void Dataset::densify(std::size_t i, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& [idx, value] : examples_[i].features) out[idx] = value;
}

void Dataset::densifyBinary(std::size_t i, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& [idx, value] : examples_[i].features) out[idx] = value > 0.0 ? 1.0 : 0.0;
}

Dataset Dataset::truncated(std::size_t maxExamples) const {
  std::vector<Example> kept(examples_.begin(),
                            examples_.begin() + std::min(maxExamples, examples_.size()));
  return Dataset(schema_, std::move(kept), split_);
}

DatasetSplits splitDataset(const Dataset& ds, const SplitFractions& fractions,
                           std::uint64_t seed, std::optional<int> perClassValidationCount) {
  if (fractions.train <= 0.0 || fractions.validation <= 0.0 || fractions.test <= 0.0) {
    throw ConfigError("split fractions must all be positive");
  }
  const double sum = fractions.train + fractions.validation + fractions.test;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("split fractions must sum to 1, got " + std::to_string(sum));
  }
  const std::size_t n = ds.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(deriveSeed(seed, Stream::Split));
  rng.shuffle(order);

  std::vector<std::size_t> trainIdx, valIdx, testIdx;
  const std::size_t nTest = static_cast<std::size_t>(std::llround(fractions.test * n));
  testIdx.assign(order.begin(), order.begin() + nTest);

  if (perClassValidationCount) {
    const int want = *perClassValidationCount;
    if (want <= 0) throw ConfigError("perClassValidationCount must be positive");
    const int k = ds.schema().numClasses;
    std::vector<int> taken(k, 0);
    for (std::size_t pos = nTest; pos < n; ++pos) {
      const std::size_t i = order[pos];
      const auto label = ds.oracleLabel(i);
      if (label && taken[*label] < want) {
        valIdx.push_back(i);
        ++taken[*label];
      } else {
        trainIdx.push_back(i);
      }
    }
    for (int c = 0; c < k; ++c) {
      if (taken[c] < want) {
        throw ConfigError("perClassValidationCount=" + std::to_string(want) + ": class " +
                          std::to_string(c) + " has only " + std::to_string(taken[c]) +
                          " labeled examples available");
      }
    }
  } else {
    const std::size_t nVal = static_cast<std::size_t>(std::llround(fractions.validation * n));
    if (nTest + nVal > n) throw ConfigError("split fractions leave no training data");
    valIdx.assign(order.begin() + nTest, order.begin() + nTest + nVal);
    trainIdx.assign(order.begin() + nTest + nVal, order.end());
  }

  auto gather = [&ds](const std::vector<std::size_t>& idx, Split split) {
    std::vector<Example> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(ds.example(i));
    return Dataset(ds.schema(), std::move(out), split);
  };
  return DatasetSplits{gather(trainIdx, Split::Train), gather(valIdx, Split::Validation),
                       gather(testIdx, Split::Test)};
}

void saveDatasetCache(const Dataset& ds, const std::string& path) {
  nlohmann::json j;
  j["formatVersion"] = kDatasetCacheVersion;
  j["k"] = ds.schema().numClasses;
  j["d"] = ds.schema().featureDim;
  j["classNames"] = ds.schema().classNames;
  if (ds.schema().featureNames) {
    j["featureNames"] = *ds.schema().featureNames;
  } else {
    j["featureNames"] = nullptr;
  }
  j["split"] = splitName(ds.split());
  nlohmann::json examples = nlohmann::json::array();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Example& ex = ds.example(i);
    nlohmann::json features = nlohmann::json::array();
    for (const auto& [idx, value] : ex.features) {
      features.push_back({idx, value});
    }
    nlohmann::json row;
    row["f"] = std::move(features);
    if (ex.goldLabel) {
      row["label"] = *ex.goldLabel;
    } else {
      row["label"] = nullptr;
    }
    examples.push_back(std::move(row));
  }
  j["examples"] = std::move(examples);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write dataset cache: " + path);
  out << j.dump(1, '\t') << "\n";
  if (!out) throw DataError("failed writing dataset cache: " + path);
}

Dataset loadDatasetCache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset cache: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("dataset cache " + path + ": " + e.what());
  }
  if (!j.contains("formatVersion") || j["formatVersion"].get<int>() != kDatasetCacheVersion) {
    throw DataError("dataset cache " + path + ": unsupported formatVersion");
  }
  TaskSchema schema;
  schema.numClasses = j.at("k").get<int>();
  schema.featureDim = j.at("d").get<int>();
  schema.classNames = j.at("classNames").get<std::vector<std::string>>();
  if (!j.at("featureNames").is_null()) {
    schema.featureNames = j.at("featureNames").get<std::vector<std::string>>();
  }
  std::vector<Example> examples;
  for (const auto& row : j.at("examples")) {
    Example ex;
    for (const auto& f : row.at("f")) {
      ex.features.emplace_back(f.at(0).get<std::uint32_t>(), f.at(1).get<double>());
    }
    if (!row.at("label").is_null()) ex.goldLabel = row.at("label").get<int>();
    examples.push_back(std::move(ex));
  }
  return Dataset(std::move(schema), std::move(examples),
                 splitFromName(j.at("split").get<std::string>()));
}

}  // namespace lolws
