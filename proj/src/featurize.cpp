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

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <unordered_map>

#include "lolws/common.hpp"
#include "lolws/data.hpp"

namespace lolws {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

namespace {

struct CorpusLine {
  std::vector<std::string> tokens;
  std::optional<int> label;
  std::size_t lineNumber = 0;
};

std::vector<CorpusLine> readCorpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus: " + path);
  std::vector<CorpusLine> lines;
  std::string raw;
  std::size_t lineNumber = 0;
  while (std::getline(in, raw)) {
    ++lineNumber;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(lineNumber) + ": invalid JSON: " + e.what());
    }
    if (!j.contains("text") || !j["text"].is_string()) {
      throw DataError(path + ":" + std::to_string(lineNumber) + ": missing \"text\" field");
    }
    CorpusLine line;
    line.tokens = tokenize(j["text"].get<std::string>());
    line.lineNumber = lineNumber;
    if (j.contains("label") && !j["label"].is_null()) {
      if (!j["label"].is_number_integer()) {
        throw DataError(path + ":" + std::to_string(lineNumber) + ": \"label\" must be an integer");
      }
      line.label = j["label"].get<int>();
    }
    lines.push_back(std::move(line));
  }
  if (lines.empty()) throw DataError("corpus is empty: " + path);
  return lines;
}

// k inferred from labels: they must form a contiguous range {0..k-1}.
// The offending line is the first occurrence of the smallest label outside it.
int inferNumClasses(const std::vector<CorpusLine>& lines, const std::string& path) {
  std::map<int, std::size_t> firstSeen;
  for (const auto& line : lines) {
    if (line.label && !firstSeen.count(*line.label)) firstSeen[*line.label] = line.lineNumber;
  }
  if (firstSeen.empty()) return 2;  // unlabeled corpus; binary by default
  int contiguous = 0;
  for (const auto& [label, lineNo] : firstSeen) {
    if (label != contiguous) break;
    ++contiguous;
  }
  for (const auto& [label, lineNo] : firstSeen) {
    if (label < 0 || label >= contiguous) {
      throw DataError(path + ":" + std::to_string(lineNo) + ": label " + std::to_string(label) +
                      " outside inferred class range [0," + std::to_string(contiguous) + ")");
    }
  }
  return std::max(contiguous, 2);
}

}  // namespace

std::vector<std::string> buildVocabulary(
    const std::vector<std::vector<std::string>>& tokenizedTexts, int vocabSizeLimit) {
  if (vocabSizeLimit < 1) throw ConfigError("vocabSizeLimit must be positive");
  std::unordered_map<std::string, std::int64_t> counts;
  for (const auto& tokens : tokenizedTexts) {
    for (const auto& t : tokens) ++counts[t];
  }
  std::vector<std::pair<std::string, std::int64_t>> ranked(counts.begin(), counts.end());
  // Most frequent first; ties at the cutoff broken lexicographically.
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > static_cast<std::size_t>(vocabSizeLimit)) ranked.resize(vocabSizeLimit);
  std::vector<std::string> vocab;
  vocab.reserve(ranked.size());
  for (auto& [word, freq] : ranked) vocab.push_back(std::move(word));
  // Vocabulary indices in lexicographic order for stable, readable schemas.
  std::sort(vocab.begin(), vocab.end());
  return vocab;
}

std::vector<std::pair<std::uint32_t, double>> bagOfWordsRow(
    const std::vector<std::string>& tokens, const std::vector<std::string>& vocab,
    bool binarize) {
  std::map<std::uint32_t, double> row;
  for (const auto& t : tokens) {
    const auto it = std::lower_bound(vocab.begin(), vocab.end(), t);
    if (it == vocab.end() || *it != t) continue;
    const auto idx = static_cast<std::uint32_t>(it - vocab.begin());
    if (binarize) {
      row[idx] = 1.0;
    } else {
      row[idx] += 1.0;
    }
  }
  return {row.begin(), row.end()};
}

FeaturizeResult featurize(const std::string& corpusPath, int vocabSizeLimit, bool binarize,
                          std::optional<int> numClasses) {
  if (vocabSizeLimit < 1) throw ConfigError("vocabSizeLimit must be positive");
  const std::vector<CorpusLine> lines = readCorpus(corpusPath);

  int k;
  if (numClasses) {
    k = *numClasses;
    if (k < 2) throw ConfigError("numClasses must be >= 2");
    for (const auto& line : lines) {
      if (line.label && (*line.label < 0 || *line.label >= k)) {
        throw DataError(corpusPath + ":" + std::to_string(line.lineNumber) + ": label " +
                        std::to_string(*line.label) + " outside [0," + std::to_string(k) + ")");
      }
    }
  } else {
    k = inferNumClasses(lines, corpusPath);
  }

  std::vector<std::vector<std::string>> tokenized;
  tokenized.reserve(lines.size());
  for (const auto& line : lines) tokenized.push_back(line.tokens);
  const std::vector<std::string> vocab = buildVocabulary(tokenized, vocabSizeLimit);
  if (vocab.empty()) throw DataError("corpus produced an empty vocabulary: " + corpusPath);

  TaskSchema schema;
  schema.numClasses = k;
  for (int c = 0; c < k; ++c) schema.classNames.push_back("class" + std::to_string(c));
  schema.featureDim = static_cast<int>(vocab.size());
  schema.featureNames = vocab;

  std::vector<Example> examples;
  examples.reserve(lines.size());
  std::size_t numLabeled = 0;
  for (const auto& line : lines) {
    Example ex;
    ex.features = bagOfWordsRow(line.tokens, vocab, binarize);
    ex.goldLabel = line.label;
    if (ex.goldLabel) ++numLabeled;
    examples.push_back(std::move(ex));
  }

  const std::size_t n = examples.size();
  Dataset ds(std::move(schema), std::move(examples), Split::Train);
  return FeaturizeResult{std::move(ds), n, numLabeled};
}

}  // namespace lolws
