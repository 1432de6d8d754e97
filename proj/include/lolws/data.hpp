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

#ifndef LOLWS_DATA_HPP_
#define LOLWS_DATA_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lolws {

struct TaskSchema {
  int numClasses = 0;
  std::vector<std::string> classNames;
  int featureDim = 0;
  std::optional<std::vector<std::string>> featureNames;

  /// Throws ConfigError unless k >= 2, d >= 1 and names are unique.
  void validate() const;

  /// Index of a vocabulary word, or nullopt when featureNames is absent or
  /// the word is unknown.
  std::optional<int> featureIndex(const std::string& word) const;
};

/// One data point: sparse non-negative features plus an optional gold label.
struct Example {
  /// (featureIndex, value) pairs, strictly increasing in index.
  std::vector<std::pair<std::uint32_t, double>> features;
  std::optional<int> goldLabel;
};

enum class Split { Train, Validation, Test };

const char* splitName(Split s);
Split splitFromName(const std::string& name);

/// An immutable split of a task. Gold labels on the training split are
/// reachable only through oracleLabel(); the regular accessor refuses them
/// so weakly supervised code paths cannot read training labels by accident.
class Dataset {
 public:
  Dataset(TaskSchema schema, std::vector<Example> examples, Split split);

  const TaskSchema& schema() const { return schema_; }
  Split split() const { return split_; }
  std::size_t size() const { return examples_.size(); }
  const Example& example(std::size_t i) const { return examples_[i]; }
  const std::vector<Example>& examples() const { return examples_; }

  /// Gold label for evaluation/validation. Throws ConfigError on the
  /// training split and DataError when the label is missing.
  int label(std::size_t i) const;

  /// Unrestricted label access for oracle-side checks and data tooling.
  std::optional<int> oracleLabel(std::size_t i) const;

  bool allLabeled() const;

  /// Writes the dense feature vector of example i into out (length d).
  void densify(std::size_t i, std::span<double> out) const;

  /// Same, with counts clipped to {0,1}. Gradient penalties operate on
  /// presence indicators regardless of how the corpus was featurized.
  void densifyBinary(std::size_t i, std::span<double> out) const;

  Dataset withSplit(Split split) const { return Dataset(schema_, examples_, split); }

  /// First maxExamples examples, same split tag.
  Dataset truncated(std::size_t maxExamples) const;

 private:
  TaskSchema schema_;
  std::vector<Example> examples_;
  Split split_;
};

struct SplitFractions {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

struct DatasetSplits {
  Dataset train;
  Dataset validation;
  Dataset test;
};

/// Shuffles by seed and partitions exactly (no loss, no duplication).
/// When perClassValidationCount is set, the test split still takes its
/// fraction, and the validation split instead takes exactly that many
/// labeled examples of every class from the remainder; the rest train.
DatasetSplits splitDataset(const Dataset& ds, const SplitFractions& fractions,
                           std::uint64_t seed,
                           std::optional<int> perClassValidationCount = std::nullopt);

/// Dataset cache file (versioned JSON container with a schema header).
void saveDatasetCache(const Dataset& ds, const std::string& path);
Dataset loadDatasetCache(const std::string& path);

struct FeaturizeResult {
  Dataset dataset;          // split tag Train; re-split downstream
  std::size_t numExamples = 0;
  std::size_t numLabeled = 0;
};

/// Builds a bag-of-words dataset from a JSONL corpus ({"text": ...,
/// "label": optional int}). Tokens are lowercased runs of alphanumeric
/// characters; the vocabulary keeps the vocabSizeLimit most frequent
/// tokens, ties broken lexicographically. numClasses, when given, fixes k;
/// otherwise k is inferred from the labels present, which must form a
/// contiguous range starting at 0.
FeaturizeResult featurize(const std::string& corpusPath, int vocabSizeLimit, bool binarize,
                          std::optional<int> numClasses = std::nullopt);

/// Tokenization used by featurize, exposed for labeler spec resolution.
std::vector<std::string> tokenize(const std::string& text);

/// The vocabSizeLimit most frequent tokens across the token lists, ties at
/// the cutoff broken lexicographically, returned in lexicographic order.
std::vector<std::string> buildVocabulary(
    const std::vector<std::vector<std::string>>& tokenizedTexts, int vocabSizeLimit);

/// Sparse bag-of-words row over a lexicographically sorted vocabulary;
/// out-of-vocabulary tokens are dropped.
std::vector<std::pair<std::uint32_t, double>> bagOfWordsRow(
    const std::vector<std::string>& tokens, const std::vector<std::string>& vocab,
    bool binarize);

}  // namespace lolws

#endif  // LOLWS_DATA_HPP_
