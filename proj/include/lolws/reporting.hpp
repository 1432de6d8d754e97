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

#ifndef LOLWS_REPORTING_HPP_
#define LOLWS_REPORTING_HPP_

#include <string>

#include <json.hpp>

#include "lolws/train.hpp"

namespace lolws {

/// JSON forms use fixed key order and omit volatile fields (wall time, jobs),
/// so identical runs serialize to identical bytes.
nlohmann::ordered_json runConfigToJson(const RunConfig& cfg);
RunConfig runConfigFromJson(const nlohmann::json& j);

nlohmann::ordered_json trainReportToJson(const TrainReport& report);
TrainReport trainReportFromJson(const nlohmann::json& j);

nlohmann::ordered_json sweepSpecToJson(const SweepSpec& sp);
SweepSpec sweepSpecFromJson(const nlohmann::json& j);

nlohmann::ordered_json sweepResultToJson(const SweepResult& result);
nlohmann::ordered_json ablationResultToJson(const AblationResult& result);
AblationResult ablationResultFromJson(const nlohmann::json& j);

/// Aligned-column text renderings; accuracies shown as percent, one decimal.
/// CSV forms carry full-precision fractions instead.
std::string trainReportText(const TrainReport& report);
std::string trainReportCsv(const TrainReport& report);
std::string ablationTableText(const AblationResult& result);
std::string ablationTableCsv(const AblationResult& result);
std::string sweepTrialsText(const SweepResult& result);
std::string sweepTrialsCsv(const SweepResult& result);

/// Whole-file helpers used by the CLI; errors name the path.
void writeFile(const std::string& path, const std::string& content);
std::string readFile(const std::string& path);
nlohmann::json readJsonFile(const std::string& path);

}  // namespace lolws

#endif  // LOLWS_REPORTING_HPP_
