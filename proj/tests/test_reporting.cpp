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

#include <json.hpp>

#include <string>
#include <vector>

#include "lolws/common.hpp"
#include "lolws/reporting.hpp"
#include "temp_files.hpp"

using namespace lolws;
using lolws::testing::TempDir;
using lolws::testing::writeText;

namespace {

RunConfig sampleConfig() {
  RunConfig cfg;
  cfg.method = Method::LoL;
  cfg.loss.penaltyKind = PenaltyKind::Exponential;
  cfg.loss.alpha = 0.01;
  cfg.loss.threshold = 2.0;
  cfg.loss.smoothingSamples = 3;
  cfg.loss.smoothingEpsilon = 0.125;
  cfg.loss.topK = 5;
  cfg.learningRate = 0.02;
  cfg.weightDecay = 0.001;
  cfg.epochs = 7;
  cfg.batchSize = 32;
  cfg.seed = 42;
  cfg.maxTrainExamples = 123;
  cfg.hiddenSizes = {24, 12};
  cfg.dropoutRate = 0.15;
  cfg.tripletMinOverlap = 4;
  return cfg;
}

TrainReport sampleReport() {
  TrainReport r;
  r.method = "LoL";
  r.config = sampleConfig();
  r.epochHistory = {{1, 0.9, 0.8, 0.1, 0.62}, {2, 0.7, 0.65, 0.05, 0.7125}};
  r.selectedEpoch = 2;
  r.selectedValidationAccuracy = 0.7125;
  r.testAccuracy = 0.6875;
  r.trainExamplesUsed = 123;
  r.wallTimeSeconds = 3.5;
  return r;
}

}  // namespace

TEST_CASE("run config round-trips through JSON") {
  const RunConfig cfg = sampleConfig();
  const nlohmann::ordered_json j = runConfigToJson(cfg);
  const RunConfig back = runConfigFromJson(j);
  CHECK(back.method == cfg.method);
  CHECK(back.loss.penaltyKind == cfg.loss.penaltyKind);
  CHECK(back.loss.alpha == cfg.loss.alpha);
  CHECK(back.loss.threshold == cfg.loss.threshold);
  CHECK(back.loss.smoothingSamples == cfg.loss.smoothingSamples);
  CHECK(back.loss.smoothingEpsilon == cfg.loss.smoothingEpsilon);
  CHECK(back.loss.topK == cfg.loss.topK);
  CHECK(back.learningRate == cfg.learningRate);
  CHECK(back.weightDecay == cfg.weightDecay);
  CHECK(back.epochs == cfg.epochs);
  CHECK(back.batchSize == cfg.batchSize);
  CHECK(back.seed == cfg.seed);
  CHECK(back.maxTrainExamples == cfg.maxTrainExamples);
  CHECK(back.hiddenSizes == cfg.hiddenSizes);
  CHECK(back.dropoutRate == cfg.dropoutRate);
  CHECK(back.tripletMinOverlap == cfg.tripletMinOverlap);
}

TEST_CASE("canonical config serialization is stable under key reordering") {
  const nlohmann::ordered_json canonical = runConfigToJson(sampleConfig());
  // Re-parse from an alphabetically reordered rendering of the same object.
  const nlohmann::json reordered = nlohmann::json::parse(canonical.dump());
  const RunConfig back = runConfigFromJson(nlohmann::ordered_json(reordered));
  CHECK(runConfigToJson(back).dump() == canonical.dump());
}

TEST_CASE("config parsing rejects unknown keys and bad values") {
  nlohmann::ordered_json j = runConfigToJson(sampleConfig());
  j["surprise"] = 1;
  CHECK_THROWS_AS(runConfigFromJson(j), ConfigError);
  j = runConfigToJson(sampleConfig());
  j["epochs"] = "three";
  CHECK_THROWS_AS(runConfigFromJson(j), ConfigError);
  j = runConfigToJson(sampleConfig());
  j["method"] = "NotAMethod";
  CHECK_THROWS_AS(runConfigFromJson(j), ConfigError);
  // jobs is accepted on input (CLI convenience) but never serialized.
  j = runConfigToJson(sampleConfig());
  CHECK_FALSE(j.contains("jobs"));
  j["jobs"] = 4;
  CHECK(runConfigFromJson(j).jobs == 4);
}

TEST_CASE("train report round-trips and omits wall time") {
  const TrainReport report = sampleReport();
  const nlohmann::ordered_json j = trainReportToJson(report);
  CHECK(j.at("kind") == "trainReport");
  CHECK_FALSE(j.dump().find("wallTime") != std::string::npos);
  const TrainReport back = trainReportFromJson(j);
  CHECK(back.method == report.method);
  REQUIRE(back.epochHistory.size() == 2);
  CHECK(back.epochHistory[1].trainLoss == report.epochHistory[1].trainLoss);
  CHECK(back.epochHistory[1].validationAccuracy == report.epochHistory[1].validationAccuracy);
  CHECK(back.selectedEpoch == 2);
  CHECK(back.selectedValidationAccuracy == report.selectedValidationAccuracy);
  CHECK(back.testAccuracy == report.testAccuracy);
  CHECK(back.trainExamplesUsed == 123);
  CHECK(back.config.seed == 42);
}

TEST_CASE("train report text and CSV renderings") {
  const TrainReport report = sampleReport();
  const std::string text = trainReportText(report);
  CHECK(text.find("LoL") != std::string::npos);
  CHECK(text.find("test accuracy") != std::string::npos);
  CHECK(text.find("epoch") != std::string::npos);
  const std::string csv = trainReportCsv(report);
  CHECK(csv.find("epoch,") == 0);
  // One header plus one line per epoch.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("sweep result serialization keeps grid order") {
  SweepResult sr;
  sr.best = sampleConfig();
  sr.bestReport = sampleReport();
  SweepTrial t1{sampleConfig(), sampleReport()};
  t1.config.learningRate = 0.1;
  SweepTrial t2{sampleConfig(), sampleReport()};
  t2.config.learningRate = 0.00125;
  sr.trials = {t1, t2};
  const nlohmann::ordered_json j = sweepResultToJson(sr);
  CHECK(j.at("kind") == "sweepResult");
  REQUIRE(j.at("trials").size() == 2);
  CHECK(j.at("trials")[0].at("config").at("learningRate").get<double>() == 0.1);
  CHECK(j.at("trials")[1].at("config").at("learningRate").get<double>() == 0.00125);
  const std::string text = sweepTrialsText(sr);
  CHECK(text.find("best") != std::string::npos);
  const std::string csv = sweepTrialsCsv(sr);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("ablation table round-trips at full precision") {
  AblationResult ar;
  ar.seeds = {0, 1, 2};
  AblationRow row;
  row.method = Method::LoLSimple;
  row.config = sampleConfig();
  row.perSeedTestAccuracy = {0.828125, 0.84375, 0.8125};
  row.meanTestAccuracy = 0.8281249999999999;  // deliberately awkward double
  row.stdTestAccuracy = 0.015625;
  ar.rows = {row};
  const nlohmann::ordered_json j = ablationResultToJson(ar);
  CHECK(j.at("kind") == "ablationResult");
  const AblationResult back = ablationResultFromJson(j);
  CHECK(back.seeds == ar.seeds);
  REQUIRE(back.rows.size() == 1);
  CHECK(back.rows[0].method == Method::LoLSimple);
  CHECK(back.rows[0].perSeedTestAccuracy == row.perSeedTestAccuracy);  // bitwise
  CHECK(back.rows[0].meanTestAccuracy == row.meanTestAccuracy);
  CHECK(back.rows[0].stdTestAccuracy == row.stdTestAccuracy);

  const std::string text = ablationTableText(ar);
  CHECK(text.find("LoL-simple") != std::string::npos);
  CHECK(text.find("+/-") != std::string::npos);
  const std::string csv = ablationTableCsv(ar);
  CHECK(csv.find("method,") == 0);
  CHECK(csv.find("0.8281249999999999") != std::string::npos);
}

TEST_CASE("file helpers report their path on failure") {
  TempDir tmp("files");
  writeText(tmp.file("junk.json"), "][");
  CHECK_THROWS_AS(readJsonFile(tmp.file("junk.json")), DataError);
  CHECK_THROWS_AS(readFile(tmp.file("absent.json")), DataError);
  writeFile(tmp.file("ok.txt"), "payload");
  CHECK(lolws::testing::readText(tmp.file("ok.txt")) == "payload");
}
