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

#include "lolws/wrench.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>

#include <json.hpp>

#include "lolws/common.hpp"
#include "lolws/reporting.hpp"

namespace lolws {

namespace {

struct WrenchDocument {
  std::string text;
  std::optional<int> label;
  std::vector<int> weakLabels;
};

std::vector<WrenchDocument> readWrenchSplit(const std::string& path) {
  const nlohmann::json root = readJsonFile(path);
  if (!root.is_object()) throw DataError(path + ": expected a JSON object keyed by index");
  std::vector<std::pair<std::uint64_t, WrenchDocument>> keyed;
  keyed.reserve(root.size());
  for (const auto& item : root.items()) {
    std::uint64_t key = 0;
    try {
      std::size_t used = 0;
      key = std::stoull(item.key(), &used);
      if (used != item.key().size()) throw std::invalid_argument(item.key());
    } catch (const std::exception&) {
      throw DataError(path + ": non-numeric example key '" + item.key() + "'");
    }
    const nlohmann::json& entry = item.value();
    WrenchDocument doc;
    try {
      doc.text = entry.at("data").at("text").get<std::string>();
      if (entry.contains("label") && !entry.at("label").is_null()) {
        doc.label = entry.at("label").get<int>();
      }
      doc.weakLabels = entry.at("weak_labels").get<std::vector<int>>();
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ": example '" + item.key() + "': " + e.what());
    }
    keyed.emplace_back(key, std::move(doc));
  }
  if (keyed.empty()) throw DataError(path + ": split is empty");
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<WrenchDocument> docs;
  docs.reserve(keyed.size());
  for (auto& [key, doc] : keyed) docs.push_back(std::move(doc));
  return docs;
}

VoteMatrix votesOf(const std::vector<WrenchDocument>& docs, const std::string& path,
                   int numClasses) {
  VoteMatrix vm;
  vm.numExamples = docs.size();
  const std::size_t m = docs.front().weakLabels.size();
  for (std::size_t j = 0; j < m; ++j) vm.labelerNames.push_back("lf" + std::to_string(j));
  vm.votes.reserve(docs.size() * m);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (docs[i].weakLabels.size() != m) {
      throw DataError(path + ": example " + std::to_string(i) + " has " +
                      std::to_string(docs[i].weakLabels.size()) + " weak labels, expected " +
                      std::to_string(m));
    }
    for (int v : docs[i].weakLabels) {
      if (v != kAbstain && (v < 0 || v >= numClasses)) {
        throw DataError(path + ": example " + std::to_string(i) + " has weak label " +
                        std::to_string(v) + " outside [0," + std::to_string(numClasses) + ")");
      }
      vm.votes.push_back(v);
    }
  }
  return vm;
}

Dataset toDataset(const std::vector<WrenchDocument>& docs, const TaskSchema& schema,
                  const std::vector<std::string>& vocab, bool binarize, Split split,
                  const std::string& path) {
  std::vector<Example> examples;
  examples.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (split != Split::Train && !docs[i].label) {
      throw DataError(path + ": example " + std::to_string(i) +
                      " is unlabeled; validation and test splits need gold labels");
    }
    Example ex;
    ex.features = bagOfWordsRow(tokenize(docs[i].text), vocab, binarize);
    ex.goldLabel = docs[i].label;
    examples.push_back(std::move(ex));
  }
  return Dataset(schema, std::move(examples), split);
}

}  // namespace

bool wrenchTaskPresent(const std::string& dir) {
  namespace fs = std::filesystem;
  return fs::exists(fs::path(dir) / "train.json") &&
         fs::exists(fs::path(dir) / "valid.json") && fs::exists(fs::path(dir) / "test.json");
}

std::vector<LabelerSpec> reconstructKeywordLabelers(const VoteMatrix& vm, const Dataset& ds) {
  if (vm.numExamples != ds.size()) throw ConfigError("votes and dataset are misaligned");
  const auto d = static_cast<std::size_t>(ds.schema().featureDim);
  const std::size_t m = vm.numLabelers();
  std::vector<LabelerSpec> specs;
  for (std::size_t j = 0; j < m; ++j) {
    int votedClass = kAbstain;
    std::vector<char> inNonFiring(d, 0);
    std::vector<char> inFiring(d, 0);
    for (std::size_t i = 0; i < vm.numExamples; ++i) {
      const int v = vm.vote(i, j);
      std::vector<char>& mark = v == kAbstain ? inNonFiring : inFiring;
      for (const auto& [f, value] : ds.example(i).features) {
        if (value > 0.0) mark[f] = 1;
      }
      if (v == kAbstain) continue;
      if (votedClass == kAbstain) {
        votedClass = v;
      } else if (votedClass != v) {
        throw DataError(vm.labelerNames[j] +
                        " votes more than one class; it is not a keyword labeler "
                        "(supply labelers.json)");
      }
    }
    if (votedClass == kAbstain) {
      logWarn(vm.labelerNames[j] + " never fires on the training split; dropped");
      continue;
    }
    LabelerSpec spec;
    spec.name = vm.labelerNames[j];
    spec.kind = LabelerKind::KeywordAny;
    spec.votedClass = votedClass;
    for (std::uint32_t f = 0; f < d; ++f) {
      if (inFiring[f] && !inNonFiring[f]) spec.keywordIndices.push_back(f);
    }
    // Every firing row must contain a candidate, or keyword matching cannot
    // explain the votes.
    for (std::size_t i = 0; i < vm.numExamples; ++i) {
      if (vm.vote(i, j) == kAbstain) continue;
      bool hit = false;
      for (const auto& [f, value] : ds.example(i).features) {
        if (value > 0.0 &&
            std::binary_search(spec.keywordIndices.begin(), spec.keywordIndices.end(), f)) {
          hit = true;
          break;
        }
      }
      if (!hit) {
        throw DataError(vm.labelerNames[j] + " fires on example " + std::to_string(i) +
                        " without any consistent keyword (supply labelers.json)");
      }
    }
    spec.validate(ds.schema());
    specs.push_back(std::move(spec));
  }
  if (specs.empty()) throw DataError("no labeler could be reconstructed from the votes");
  return specs;
}

WrenchTask loadWrenchTask(const std::string& dir, int vocabSizeLimit, bool binarize) {
  namespace fs = std::filesystem;
  if (!wrenchTaskPresent(dir)) {
    throw DataError(dir + " does not hold train.json, valid.json and test.json");
  }
  const std::string trainPath = (fs::path(dir) / "train.json").string();
  const std::string validPath = (fs::path(dir) / "valid.json").string();
  const std::string testPath = (fs::path(dir) / "test.json").string();
  const std::vector<WrenchDocument> trainDocs = readWrenchSplit(trainPath);
  const std::vector<WrenchDocument> validDocs = readWrenchSplit(validPath);
  const std::vector<WrenchDocument> testDocs = readWrenchSplit(testPath);

  int maxLabel = 1;  // k is at least 2
  for (const auto* docs : {&trainDocs, &validDocs, &testDocs}) {
    for (const WrenchDocument& doc : *docs) {
      if (doc.label) maxLabel = std::max(maxLabel, *doc.label);
      for (int v : doc.weakLabels) maxLabel = std::max(maxLabel, v);
    }
  }
  const int k = maxLabel + 1;

  std::vector<std::vector<std::string>> trainTokens;
  trainTokens.reserve(trainDocs.size());
  for (const WrenchDocument& doc : trainDocs) trainTokens.push_back(tokenize(doc.text));
  const std::vector<std::string> vocab = buildVocabulary(trainTokens, vocabSizeLimit);
  if (vocab.empty()) throw DataError(trainPath + ": training texts produced no vocabulary");

  TaskSchema schema;
  schema.numClasses = k;
  for (int c = 0; c < k; ++c) schema.classNames.push_back("class" + std::to_string(c));
  schema.featureDim = static_cast<int>(vocab.size());
  schema.featureNames = vocab;
  schema.validate();

  WrenchTask task{
      DatasetSplits{toDataset(trainDocs, schema, vocab, binarize, Split::Train, trainPath),
                    toDataset(validDocs, schema, vocab, binarize, Split::Validation, validPath),
                    toDataset(testDocs, schema, vocab, binarize, Split::Test, testPath)},
      votesOf(trainDocs, trainPath, k),
      votesOf(validDocs, validPath, k),
      votesOf(testDocs, testPath, k),
      {}};

  const std::string labelerPath = (fs::path(dir) / "labelers.json").string();
  if (fs::exists(labelerPath)) {
    task.labelers = loadLabelerSpecs(labelerPath, schema);
  } else {
    task.labelers = reconstructKeywordLabelers(task.trainVotes, task.splits.train);
  }
  return task;
}

}  // namespace lolws
