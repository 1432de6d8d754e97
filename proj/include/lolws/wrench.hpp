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

#ifndef LOLWS_WRENCH_HPP_
#define LOLWS_WRENCH_HPP_

#include <string>
#include <vector>

#include "lolws/data.hpp"
#include "lolws/labelers.hpp"

namespace lolws {

/// A weak-supervision benchmark directory: train.json, valid.json and
/// test.json, each a JSON object keyed by example index with fields
/// "label", "weak_labels" (-1 = abstain) and "data": {"text": ...}.
struct WrenchTask {
  DatasetSplits splits;
  VoteMatrix trainVotes;
  VoteMatrix validationVotes;
  VoteMatrix testVotes;
  std::vector<LabelerSpec> labelers;
};

/// True when the directory holds all three split files.
bool wrenchTaskPresent(const std::string& dir);

/// Loads the directory: bag-of-words features over a vocabulary built from
/// the training texts, gold labels (train gold stays oracle-only), and the
/// shipped vote matrices. Labeler specs come from an optional labelers.json
/// in the directory; otherwise keyword labelers are reconstructed from the
/// training votes (see reconstructKeywordLabelers).
WrenchTask loadWrenchTask(const std::string& dir, int vocabSizeLimit, bool binarize);

/// Recovers keyword-matching labelers from observed votes: a labeler that
/// always votes one class and fires exactly when one of a candidate keyword
/// set is present. The candidate set is the largest one consistent with the
/// non-firing rows; labelers that never fire are dropped with a warning.
/// Labelers not explainable this way (mixed vote classes, or a firing row
/// containing no candidate keyword) raise DataError; supply labelers.json
/// for those tasks instead.
std::vector<LabelerSpec> reconstructKeywordLabelers(const VoteMatrix& vm, const Dataset& ds);

}  // namespace lolws

#endif  // LOLWS_WRENCH_HPP_
