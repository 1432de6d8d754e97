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

#include "lolws/reporting.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "lolws/common.hpp"

namespace lolws {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void checkKeys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError(std::string("unknown key '") + item.key() + "' in " + what);
    }
  }
}

template <typename T>
T getAs(const json& j, const char* key, const char* what) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + " key '" + key + "': " + e.what());
  }
}

template <typename T>
void getInto(const json& j, const char* key, const char* what, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = getAs<T>(j, key, what);
}

ordered_json lossConfigToJson(const LossConfig& cfg) {
  ordered_json j;
  j["penaltyKind"] = penaltyKindName(cfg.penaltyKind);
  j["alpha"] = cfg.alpha;
  j["threshold"] = cfg.threshold;
  j["smoothingSamples"] = cfg.smoothingSamples;
  j["smoothingEpsilon"] = cfg.smoothingEpsilon;
  j["topK"] = cfg.topK ? json(*cfg.topK) : json(nullptr);
  j["weighting"] = weightKindName(cfg.weighting);
  return j;
}

LossConfig lossConfigFromJson(const json& j) {
  if (!j.is_object()) throw ConfigError("loss config must be a JSON object");
  checkKeys(j,
            {"penaltyKind", "alpha", "threshold", "smoothingSamples", "smoothingEpsilon",
             "topK", "weighting"},
            "loss config");
  LossConfig cfg;
  if (j.contains("penaltyKind")) {
    cfg.penaltyKind = penaltyKindFromName(getAs<std::string>(j, "penaltyKind", "loss config"));
  }
  getInto(j, "alpha", "loss config", cfg.alpha);
  getInto(j, "threshold", "loss config", cfg.threshold);
  getInto(j, "smoothingSamples", "loss config", cfg.smoothingSamples);
  getInto(j, "smoothingEpsilon", "loss config", cfg.smoothingEpsilon);
  if (j.contains("topK") && !j.at("topK").is_null()) {
    cfg.topK = getAs<int>(j, "topK", "loss config");
  }
  if (j.contains("weighting")) {
    cfg.weighting = weightKindFromName(getAs<std::string>(j, "weighting", "loss config"));
  }
  return cfg;
}

std::string percent1(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", fraction * 100.0);
  return buf;
}

std::string fixed6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

/// Shortest round-trip decimal form, shared with the JSON encoding.
std::string numeric(double v) { return json(v).dump(); }

std::string padLeft(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string padRight(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

ordered_json runConfigToJson(const RunConfig& cfg) {
  ordered_json j;
  j["method"] = methodName(cfg.method);
  j["loss"] = lossConfigToJson(cfg.loss);
  j["learningRate"] = cfg.learningRate;
  j["weightDecay"] = cfg.weightDecay;
  j["epochs"] = cfg.epochs;
  j["batchSize"] = cfg.batchSize;
  j["seed"] = cfg.seed;
  j["maxTrainExamples"] =
      cfg.maxTrainExamples ? json(*cfg.maxTrainExamples) : json(nullptr);
  j["hiddenSizes"] = cfg.hiddenSizes;
  j["dropoutRate"] = cfg.dropoutRate;
  j["tripletMinOverlap"] = cfg.tripletMinOverlap;
  return j;
}

RunConfig runConfigFromJson(const json& j) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  checkKeys(j,
            {"method", "loss", "learningRate", "weightDecay", "epochs", "batchSize", "seed",
             "maxTrainExamples", "hiddenSizes", "dropoutRate", "tripletMinOverlap", "jobs"},
            "run config");
  RunConfig cfg;
  if (j.contains("method")) {
    cfg.method = methodFromName(getAs<std::string>(j, "method", "run config"));
  }
  if (j.contains("loss")) cfg.loss = lossConfigFromJson(j.at("loss"));
  getInto(j, "learningRate", "run config", cfg.learningRate);
  getInto(j, "weightDecay", "run config", cfg.weightDecay);
  getInto(j, "epochs", "run config", cfg.epochs);
  getInto(j, "batchSize", "run config", cfg.batchSize);
  getInto(j, "seed", "run config", cfg.seed);
  if (j.contains("maxTrainExamples") && !j.at("maxTrainExamples").is_null()) {
    cfg.maxTrainExamples = getAs<std::size_t>(j, "maxTrainExamples", "run config");
  }
  getInto(j, "hiddenSizes", "run config", cfg.hiddenSizes);
  getInto(j, "dropoutRate", "run config", cfg.dropoutRate);
  getInto(j, "tripletMinOverlap", "run config", cfg.tripletMinOverlap);
  getInto(j, "jobs", "run config", cfg.jobs);
  return cfg;
}

ordered_json trainReportToJson(const TrainReport& report) {
  ordered_json j;
  j["kind"] = "trainReport";
  j["formatVersion"] = 1;
  j["method"] = report.method;
  j["config"] = runConfigToJson(report.config);
  ordered_json history = ordered_json::array();
  for (const EpochMetrics& m : report.epochHistory) {
    ordered_json e;
    e["epoch"] = m.epoch;
    e["trainLoss"] = m.trainLoss;
    e["classificationLoss"] = m.classificationLoss;
    e["penaltyLoss"] = m.penaltyLoss;
    e["validationAccuracy"] = m.validationAccuracy;
    history.push_back(std::move(e));
  }
  j["epochHistory"] = std::move(history);
  j["selectedEpoch"] = report.selectedEpoch;
  j["selectedValidationAccuracy"] = report.selectedValidationAccuracy;
  j["testAccuracy"] = report.testAccuracy;
  j["trainExamplesUsed"] = report.trainExamplesUsed;
  return j;
}

TrainReport trainReportFromJson(const json& j) {
  if (!j.is_object() || getAs<std::string>(j, "kind", "report") != "trainReport") {
    throw ConfigError("not a train report");
  }
  TrainReport report;
  report.method = getAs<std::string>(j, "method", "report");
  report.config = runConfigFromJson(j.at("config"));
  for (const json& e : j.at("epochHistory")) {
    EpochMetrics m;
    m.epoch = getAs<int>(e, "epoch", "epoch metrics");
    m.trainLoss = getAs<double>(e, "trainLoss", "epoch metrics");
    m.classificationLoss = getAs<double>(e, "classificationLoss", "epoch metrics");
    m.penaltyLoss = getAs<double>(e, "penaltyLoss", "epoch metrics");
    m.validationAccuracy = getAs<double>(e, "validationAccuracy", "epoch metrics");
    report.epochHistory.push_back(m);
  }
  report.selectedEpoch = getAs<int>(j, "selectedEpoch", "report");
  report.selectedValidationAccuracy = getAs<double>(j, "selectedValidationAccuracy", "report");
  report.testAccuracy = getAs<double>(j, "testAccuracy", "report");
  report.trainExamplesUsed = getAs<std::size_t>(j, "trainExamplesUsed", "report");
  return report;
}

ordered_json sweepSpecToJson(const SweepSpec& sp) {
  ordered_json j;
  j["learningRates"] = sp.learningRates;
  j["weightDecays"] = sp.weightDecays;
  j["thresholds"] = sp.thresholds;
  j["alphas"] = sp.alphas;
  j["budget"] = sp.budget ? json(*sp.budget) : json(nullptr);
  j["seed"] = sp.seed;
  return j;
}

SweepSpec sweepSpecFromJson(const json& j) {
  if (!j.is_object()) throw ConfigError("sweep spec must be a JSON object");
  checkKeys(j, {"learningRates", "weightDecays", "thresholds", "alphas", "budget", "seed"},
            "sweep spec");
  SweepSpec sp;
  getInto(j, "learningRates", "sweep spec", sp.learningRates);
  getInto(j, "weightDecays", "sweep spec", sp.weightDecays);
  getInto(j, "thresholds", "sweep spec", sp.thresholds);
  getInto(j, "alphas", "sweep spec", sp.alphas);
  if (j.contains("budget") && !j.at("budget").is_null()) {
    sp.budget = getAs<int>(j, "budget", "sweep spec");
  }
  getInto(j, "seed", "sweep spec", sp.seed);
  return sp;
}

ordered_json sweepResultToJson(const SweepResult& result) {
  ordered_json j;
  j["kind"] = "sweepResult";
  j["formatVersion"] = 1;
  j["best"] = runConfigToJson(result.best);
  j["bestReport"] = trainReportToJson(result.bestReport);
  ordered_json trials = ordered_json::array();
  for (const SweepTrial& t : result.trials) {
    ordered_json e;
    e["config"] = runConfigToJson(t.config);
    e["report"] = trainReportToJson(t.report);
    trials.push_back(std::move(e));
  }
  j["trials"] = std::move(trials);
  return j;
}

ordered_json ablationResultToJson(const AblationResult& result) {
  ordered_json j;
  j["kind"] = "ablationResult";
  j["formatVersion"] = 1;
  j["seeds"] = result.seeds;
  ordered_json rows = ordered_json::array();
  for (const AblationRow& row : result.rows) {
    ordered_json e;
    e["method"] = methodName(row.method);
    e["config"] = runConfigToJson(row.config);
    e["perSeedTestAccuracy"] = row.perSeedTestAccuracy;
    e["meanTestAccuracy"] = row.meanTestAccuracy;
    e["stdTestAccuracy"] = row.stdTestAccuracy;
    rows.push_back(std::move(e));
  }
  j["rows"] = std::move(rows);
  return j;
}

AblationResult ablationResultFromJson(const json& j) {
  if (!j.is_object() || getAs<std::string>(j, "kind", "ablation") != "ablationResult") {
    throw ConfigError("not an ablation result");
  }
  AblationResult result;
  result.seeds = getAs<std::vector<std::uint64_t>>(j, "seeds", "ablation");
  for (const json& e : j.at("rows")) {
    AblationRow row;
    row.method = methodFromName(getAs<std::string>(e, "method", "ablation row"));
    row.config = runConfigFromJson(e.at("config"));
    row.perSeedTestAccuracy =
        getAs<std::vector<double>>(e, "perSeedTestAccuracy", "ablation row");
    row.meanTestAccuracy = getAs<double>(e, "meanTestAccuracy", "ablation row");
    row.stdTestAccuracy = getAs<double>(e, "stdTestAccuracy", "ablation row");
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string trainReportText(const TrainReport& report) {
  std::ostringstream out;
  out << "method:                " << report.method << "\n";
  out << "seed:                  " << report.config.seed << "\n";
  out << "train examples:        " << report.trainExamplesUsed << "\n";
  out << "selected epoch:        " << report.selectedEpoch << "\n";
  out << "validation accuracy:   " << percent1(report.selectedValidationAccuracy) << "\n";
  out << "test accuracy:         " << percent1(report.testAccuracy) << "\n";
  out << "\n";
  const std::vector<std::string> header = {"epoch", "trainLoss", "classificationLoss",
                                           "penaltyLoss", "valAccuracy"};
  std::vector<std::vector<std::string>> cells;
  for (const EpochMetrics& m : report.epochHistory) {
    cells.push_back({std::to_string(m.epoch), fixed6(m.trainLoss),
                     fixed6(m.classificationLoss), fixed6(m.penaltyLoss),
                     percent1(m.validationAccuracy)});
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  for (std::size_t c = 0; c < header.size(); ++c) {
    out << (c ? "  " : "") << padLeft(header[c], width[c]);
  }
  out << "\n";
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "  " : "") << padLeft(row[c], width[c]);
    }
    out << "\n";
  }
  return out.str();
}

std::string trainReportCsv(const TrainReport& report) {
  std::ostringstream out;
  out << "epoch,trainLoss,classificationLoss,penaltyLoss,validationAccuracy\n";
  for (const EpochMetrics& m : report.epochHistory) {
    out << m.epoch << "," << numeric(m.trainLoss) << "," << numeric(m.classificationLoss)
        << "," << numeric(m.penaltyLoss) << "," << numeric(m.validationAccuracy) << "\n";
  }
  return out.str();
}

std::string sweepTrialsText(const SweepResult& result) {
  std::ostringstream out;
  const std::vector<std::string> header = {"trial",  "lr",       "weightDecay", "alpha",
                                           "c",      "selEpoch", "valAccuracy", "testAccuracy"};
  std::vector<std::vector<std::string>> cells;
  for (std::size_t i = 0; i < result.trials.size(); ++i) {
    const SweepTrial& t = result.trials[i];
    cells.push_back({std::to_string(i), numeric(t.config.learningRate),
                     numeric(t.config.weightDecay), numeric(t.config.loss.alpha),
                     numeric(t.config.loss.threshold),
                     std::to_string(t.report.selectedEpoch),
                     percent1(t.report.selectedValidationAccuracy),
                     percent1(t.report.testAccuracy)});
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  for (std::size_t c = 0; c < header.size(); ++c) {
    out << (c ? "  " : "") << padLeft(header[c], width[c]);
  }
  out << "\n";
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "  " : "") << padLeft(row[c], width[c]);
    }
    out << "\n";
  }
  out << "\nbest: lr=" << numeric(result.best.learningRate)
      << " weightDecay=" << numeric(result.best.weightDecay);
  if (methodUsesPenalty(result.best.method)) {
    out << " alpha=" << numeric(result.best.loss.alpha)
        << " c=" << numeric(result.best.loss.threshold);
  }
  out << " (validation accuracy " << percent1(result.bestReport.selectedValidationAccuracy)
      << ")\n";
  return out.str();
}

std::string sweepTrialsCsv(const SweepResult& result) {
  std::ostringstream out;
  out << "trial,learningRate,weightDecay,alpha,threshold,selectedEpoch,"
         "validationAccuracy,testAccuracy\n";
  for (std::size_t i = 0; i < result.trials.size(); ++i) {
    const SweepTrial& t = result.trials[i];
    out << i << "," << numeric(t.config.learningRate) << "," << numeric(t.config.weightDecay)
        << "," << numeric(t.config.loss.alpha) << "," << numeric(t.config.loss.threshold)
        << "," << t.report.selectedEpoch << ","
        << numeric(t.report.selectedValidationAccuracy) << ","
        << numeric(t.report.testAccuracy) << "\n";
  }
  return out.str();
}

std::string ablationTableText(const AblationResult& result) {
  std::ostringstream out;
  const std::string accHeader =
      "test accuracy (" + std::to_string(result.seeds.size()) + " seeds)";
  std::size_t methodWidth = std::string("method").size();
  std::vector<std::string> cells;
  for (const AblationRow& row : result.rows) {
    methodWidth = std::max(methodWidth, std::string(methodName(row.method)).size());
    cells.push_back(percent1(row.meanTestAccuracy) + " +/- " +
                    percent1(row.stdTestAccuracy));
  }
  out << padRight("method", methodWidth) << "  " << accHeader << "\n";
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    out << padRight(methodName(result.rows[i].method), methodWidth) << "  " << cells[i]
        << "\n";
  }
  return out.str();
}

std::string ablationTableCsv(const AblationResult& result) {
  std::ostringstream out;
  out << "method,meanTestAccuracy,stdTestAccuracy";
  for (std::uint64_t seed : result.seeds) out << ",seed" << seed;
  out << "\n";
  for (const AblationRow& row : result.rows) {
    out << methodName(row.method) << "," << numeric(row.meanTestAccuracy) << ","
        << numeric(row.stdTestAccuracy);
    for (double acc : row.perSeedTestAccuracy) out << "," << numeric(acc);
    out << "\n";
  }
  return out.str();
}

void writeFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw DataError("write to " + path + " failed");
}

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw DataError("read from " + path + " failed");
  return buf.str();
}

nlohmann::json readJsonFile(const std::string& path) {
  const std::string text = readFile(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace lolws
