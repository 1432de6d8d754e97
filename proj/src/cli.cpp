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

#include "lolws/cli.hpp"

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <utility>

#include <CLI11.hpp>
#include <json.hpp>

#include "lolws/common.hpp"
#include "lolws/data.hpp"
#include "lolws/digest.hpp"
#include "lolws/labelers.hpp"
#include "lolws/labelmodels.hpp"
#include "lolws/nnet.hpp"
#include "lolws/reporting.hpp"
#include "lolws/synthetic.hpp"
#include "lolws/train.hpp"
#include "lolws/wrench.hpp"

namespace lolws::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string isoTimestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string jsonText(const ordered_json& j) { return j.dump(1, '\t') + "\n"; }

void ensureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir + ": " + ec.message());
}

/// Volatile run provenance: the stable results live in the report files,
/// everything timing- and environment-shaped lands here.
struct Manifest {
  std::string command;
  std::string configHash;
  std::map<std::string, std::string> inputDigests;  // path -> sha256
  std::vector<std::string> outputs;
  std::chrono::system_clock::time_point startedAt = std::chrono::system_clock::now();
  std::chrono::steady_clock::time_point startedTick = std::chrono::steady_clock::now();
  double wallTimeSeconds = 0.0;

  void write(const std::string& path) {
    const auto finishedAt = std::chrono::system_clock::now();
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - startedTick).count();
    ordered_json j;
    j["kind"] = "runManifest";
    j["formatVersion"] = 1;
    j["toolVersion"] = kToolVersion;
    j["command"] = command;
    j["runId"] = (configHash.empty() ? std::string("none") : configHash.substr(0, 12)) + "-" +
                 std::to_string(std::chrono::duration_cast<std::chrono::seconds>(
                                    startedAt.time_since_epoch())
                                    .count());
    j["configHash"] = configHash.empty() ? ordered_json(nullptr) : ordered_json(configHash);
    ordered_json inputs = ordered_json::object();
    for (const auto& [p, digest] : inputDigests) inputs[p] = digest;
    j["inputs"] = std::move(inputs);
    j["outputs"] = outputs;
    j["startedAt"] = isoTimestamp(startedAt);
    j["finishedAt"] = isoTimestamp(finishedAt);
    j["wallTimeSeconds"] = wallTimeSeconds > 0.0 ? wallTimeSeconds : wall;
    writeFile(path, jsonText(j));
  }
};

/// Hash of the canonical serialized config: invariant under key order and
/// formatting of the config file the user wrote.
std::string configHashOf(const RunConfig& cfg) {
  return sha256Hex(runConfigToJson(cfg).dump());
}

std::vector<std::string> splitCommaList(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct TaskInputs {
  DatasetSplits splits;
  std::vector<LabelerSpec> labelers;
  std::map<std::string, std::string> digests;
};

/// Shared input options for run/sweep/ablate: either a dataset cache
/// directory plus a labeler spec file, or a benchmark-format directory.
struct InputOptions {
  std::string cacheDir;
  std::string labelerPath;
  std::string wrenchDir;
  int vocabLimit = 5000;
  bool binarize = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--cache", cacheDir,
                    "dataset cache directory (train.json/validation.json/test.json)");
    cmd->add_option("--labelers", labelerPath, "labeler spec file (JSON)");
    cmd->add_option("--wrench", wrenchDir, "benchmark-format dataset directory");
    cmd->add_option("--vocab-limit", vocabLimit, "vocabulary cap for --wrench text")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--binarize", binarize, "binary bag-of-words for --wrench text");
  }

  TaskInputs load() const {
    std::map<std::string, std::string> digests;
    if (!wrenchDir.empty()) {
      WrenchTask task = loadWrenchTask(wrenchDir, vocabLimit, binarize);
      for (const char* f : {"train.json", "valid.json", "test.json"}) {
        const std::string p = (fs::path(wrenchDir) / f).string();
        digests[p] = sha256HexFile(p);
      }
      return TaskInputs{std::move(task.splits), std::move(task.labelers),
                        std::move(digests)};
    }
    if (cacheDir.empty() || labelerPath.empty()) {
      throw ConfigError("need --cache and --labelers (or --wrench)");
    }
    const std::string trainPath = (fs::path(cacheDir) / "train.json").string();
    const std::string valPath = (fs::path(cacheDir) / "validation.json").string();
    const std::string testPath = (fs::path(cacheDir) / "test.json").string();
    // Split tags are re-stamped so a mislabeled cache cannot unblind training.
    DatasetSplits splits{loadDatasetCache(trainPath).withSplit(Split::Train),
                         loadDatasetCache(valPath).withSplit(Split::Validation),
                         loadDatasetCache(testPath).withSplit(Split::Test)};
    std::vector<LabelerSpec> labelers = loadLabelerSpecs(labelerPath, splits.train.schema());
    for (const std::string& p : {trainPath, valPath, testPath, labelerPath}) {
      digests[p] = sha256HexFile(p);
    }
    return TaskInputs{std::move(splits), std::move(labelers), std::move(digests)};
  }
};

void printOut(const std::string& text) { std::cout << text << std::flush; }

int cmdFeaturize(const std::string& corpus, int vocabLimit, bool binarize,
                 std::optional<int> numClasses, double trainFrac, double valFrac,
                 double testFrac, std::optional<int> valPerClass, std::uint64_t splitSeed,
                 const std::string& outDir) {
  Manifest manifest;
  manifest.command = "featurize";
  manifest.inputDigests[corpus] = sha256HexFile(corpus);
  const FeaturizeResult res = featurize(corpus, vocabLimit, binarize, numClasses);
  const DatasetSplits splits =
      splitDataset(res.dataset, SplitFractions{trainFrac, valFrac, testFrac}, splitSeed,
                   valPerClass);
  ensureDir(outDir);
  const std::string trainPath = (fs::path(outDir) / "train.json").string();
  const std::string valPath = (fs::path(outDir) / "validation.json").string();
  const std::string testPath = (fs::path(outDir) / "test.json").string();
  saveDatasetCache(splits.train, trainPath);
  saveDatasetCache(splits.validation, valPath);
  saveDatasetCache(splits.test, testPath);
  manifest.outputs = {trainPath, valPath, testPath};
  manifest.write((fs::path(outDir) / "manifest.json").string());

  std::ostringstream summary;
  summary << "featurized " << res.numExamples << " examples (" << res.numLabeled
          << " labeled), k=" << res.dataset.schema().numClasses
          << ", d=" << res.dataset.schema().featureDim << "\n"
          << "splits: train=" << splits.train.size()
          << " validation=" << splits.validation.size() << " test=" << splits.test.size()
          << "\n"
          << "wrote " << outDir << "\n";
  printOut(summary.str());
  return 0;
}

int cmdSynth(const SyntheticTaskConfig& cfg, const std::string& outDir) {
  Manifest manifest;
  manifest.command = "synth";
  const SyntheticTask task = generateSynthetic(cfg);
  ensureDir(outDir);
  const std::string trainPath = (fs::path(outDir) / "train.json").string();
  const std::string valPath = (fs::path(outDir) / "validation.json").string();
  const std::string testPath = (fs::path(outDir) / "test.json").string();
  const std::string labelerPath = (fs::path(outDir) / "labelers.json").string();
  saveDatasetCache(task.train, trainPath);
  saveDatasetCache(task.validation, valPath);
  saveDatasetCache(task.test, testPath);
  saveLabelerSpecs(task.labelers, task.train.schema(), labelerPath);
  manifest.outputs = {trainPath, valPath, testPath, labelerPath};
  manifest.write((fs::path(outDir) / "manifest.json").string());

  std::ostringstream summary;
  summary << "synthetic task: k=" << cfg.numClasses << ", d=" << cfg.featureDim
          << ", labelers=" << cfg.numLabelers << ", seed=" << cfg.rngSeed << "\n"
          << "splits: train=" << task.train.size() << " validation=" << task.validation.size()
          << " test=" << task.test.size() << "\n"
          << "wrote " << outDir << "\n";
  printOut(summary.str());
  return 0;
}

int cmdLabel(const InputOptions& inputs, const std::string& splitName,
             const std::string& outPath) {
  const TaskInputs task = inputs.load();
  const Dataset* ds = &task.splits.train;
  if (splitName == "validation") {
    ds = &task.splits.validation;
  } else if (splitName == "test") {
    ds = &task.splits.test;
  } else if (splitName != "train") {
    throw ConfigError("unknown split '" + splitName + "'");
  }
  const VoteMatrix vm = applyLabelers(task.labelers, *ds);
  const std::vector<double> coverage = labelerCoverage(vm);

  std::ostringstream summary;
  summary << "split " << splitName << ": " << vm.numExamples << " examples, "
          << vm.numLabelers() << " labelers\n";
  for (std::size_t j = 0; j < vm.numLabelers(); ++j) {
    std::size_t correct = 0;
    std::size_t fired = 0;
    for (std::size_t i = 0; i < vm.numExamples; ++i) {
      const int v = vm.vote(i, j);
      if (v == kAbstain) continue;
      ++fired;
      const std::optional<int> gold = ds->oracleLabel(i);
      if (gold && v == *gold) ++correct;
    }
    char line[160];
    std::snprintf(line, sizeof line, "  %-12s coverage %.3f accuracy %.3f (%zu votes)\n",
                  vm.labelerNames[j].c_str(), coverage[j],
                  fired ? static_cast<double>(correct) / static_cast<double>(fired) : 0.0,
                  fired);
    summary << line;
  }
  printOut(summary.str());

  if (!outPath.empty()) {
    ordered_json j;
    j["kind"] = "voteMatrix";
    j["formatVersion"] = 1;
    j["split"] = splitName;
    j["labelerNames"] = vm.labelerNames;
    j["numExamples"] = vm.numExamples;
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < vm.numExamples; ++i) {
      ordered_json row = ordered_json::array();
      for (std::size_t jj = 0; jj < vm.numLabelers(); ++jj) row.push_back(vm.vote(i, jj));
      rows.push_back(std::move(row));
    }
    j["votes"] = std::move(rows);
    writeFile(outPath, jsonText(j));
    printOut("wrote " + outPath + "\n");
  }
  return 0;
}

}  // namespace

int run(std::vector<std::string> args) {
  try {
    CLI::App app{"losses-over-labels weak supervision trainer"};
    app.require_subcommand(1);

    // featurize ----------------------------------------------------------
    auto* featCmd = app.add_subcommand("featurize", "build a bag-of-words dataset cache");
    std::string corpus;
    int vocabLimit = 5000;
    bool binarize = false;
    int numClassesFlag = 0;
    double trainFrac = 0.8;
    double valFrac = 0.1;
    double testFrac = 0.1;
    int valPerClassFlag = 0;
    std::uint64_t splitSeed = 0;
    std::string featOut;
    featCmd->add_option("--corpus", corpus, "JSONL corpus")->required();
    featCmd->add_option("--vocab-limit", vocabLimit, "vocabulary cap")
        ->check(CLI::PositiveNumber);
    featCmd->add_flag("--binarize", binarize, "binary instead of count features");
    featCmd->add_option("--num-classes", numClassesFlag, "fix k instead of inferring it");
    featCmd->add_option("--train-frac", trainFrac, "train fraction");
    featCmd->add_option("--val-frac", valFrac, "validation fraction");
    featCmd->add_option("--test-frac", testFrac, "test fraction");
    featCmd->add_option("--val-per-class", valPerClassFlag,
                        "take this many labeled validation examples per class");
    featCmd->add_option("--split-seed", splitSeed, "split shuffle seed");
    featCmd->add_option("--out", featOut, "output directory")->required();

    // synth ----------------------------------------------------------------
    auto* synthCmd = app.add_subcommand("synth", "generate a synthetic task");
    SyntheticTaskConfig synthCfg;
    std::string synthOut;
    synthCmd->add_option("--classes", synthCfg.numClasses, "number of classes");
    synthCmd->add_option("--dim", synthCfg.featureDim, "feature dimension");
    synthCmd->add_option("--train", synthCfg.numTrain, "training examples");
    synthCmd->add_option("--val", synthCfg.numValidation, "validation examples");
    synthCmd->add_option("--test", synthCfg.numTest, "test examples");
    synthCmd->add_option("--labelers", synthCfg.numLabelers, "number of keyword labelers");
    synthCmd->add_option("--accuracy", synthCfg.perLabelerAccuracy, "labeler accuracy");
    synthCmd->add_option("--coverage", synthCfg.perLabelerCoverage, "labeler coverage");
    synthCmd->add_option("--signal", synthCfg.featureSignalStrength,
                         "class signal in non-keyword features");
    synthCmd->add_option("--seed", synthCfg.rngSeed, "generator seed");
    synthCmd->add_option("--out", synthOut, "output directory")->required();

    // label ----------------------------------------------------------------
    auto* labelCmd = app.add_subcommand("label", "apply labelers and report coverage");
    InputOptions labelInputs;
    labelInputs.attach(labelCmd);
    std::string labelSplit = "train";
    std::string labelOut;
    labelCmd->add_option("--split", labelSplit, "train|validation|test");
    labelCmd->add_option("--out", labelOut, "write the vote matrix JSON here");

    // shared run-config options for run/sweep/ablate ------------------------
    struct ConfigFlags {
      std::string configPath;
      std::string method;
      std::string penalty;
      std::string weighting;
      std::string hidden;
      std::uint64_t seed = 0;
      std::uint64_t maxTrain = 0;
      int epochs = 0;
      int batchSize = 0;
      int jobs = 0;
      int smoothingSamples = 0;
      int topK = 0;
      int tripletMinOverlap = 0;
      double lr = 0.0;
      double weightDecay = 0.0;
      double alpha = 0.0;
      double threshold = 0.0;
      double smoothingEpsilon = 0.0;
      double dropout = 0.0;
      CLI::App* cmd = nullptr;

      void attach(CLI::App* c) {
        cmd = c;
        c->add_option("--config", configPath, "run config JSON file");
        c->add_option("--method", method,
                      "LoL, LoL-simple, LoL-c, LoL-a, MV, SoftMV, T-Mean or T-Median");
        c->add_option("--seed", seed, "run seed");
        c->add_option("--jobs", jobs, "worker threads (0 = default); never changes results");
        c->add_option("--max-train", maxTrain, "truncate the training split to this size");
        c->add_option("--epochs", epochs, "training epochs");
        c->add_option("--batch-size", batchSize, "mini-batch size");
        c->add_option("--lr", lr, "learning rate");
        c->add_option("--weight-decay", weightDecay, "decoupled weight decay");
        c->add_option("--alpha", alpha, "penalty weight");
        c->add_option("--threshold", threshold, "hinge threshold c");
        c->add_option("--penalty", penalty, "none, square, linear or exponential");
        c->add_option("--weighting", weighting, "uniform, coverage or accuracy");
        c->add_option("--smoothing-samples", smoothingSamples, "smoothing sample count t");
        c->add_option("--smoothing-epsilon", smoothingEpsilon, "smoothing epsilon");
        c->add_option("--top-k", topK, "top-k mask for differentiable labeler gradients");
        c->add_option("--dropout", dropout, "hidden dropout rate");
        c->add_option("--hidden", hidden, "hidden sizes, comma separated (e.g. 64,16)");
        c->add_option("--triplet-min-overlap", tripletMinOverlap,
                      "minimum pairwise overlap for triplet estimates (0 disables)");
      }

      RunConfig build() const {
        RunConfig cfg;
        if (!configPath.empty()) cfg = runConfigFromJson(readJsonFile(configPath));
        if (cmd->count("--method")) cfg.method = methodFromName(method);
        if (cmd->count("--seed")) cfg.seed = seed;
        if (cmd->count("--jobs")) cfg.jobs = jobs;
        if (cmd->count("--max-train")) cfg.maxTrainExamples = maxTrain;
        if (cmd->count("--epochs")) cfg.epochs = epochs;
        if (cmd->count("--batch-size")) cfg.batchSize = batchSize;
        if (cmd->count("--lr")) cfg.learningRate = lr;
        if (cmd->count("--weight-decay")) cfg.weightDecay = weightDecay;
        if (cmd->count("--alpha")) cfg.loss.alpha = alpha;
        if (cmd->count("--threshold")) cfg.loss.threshold = threshold;
        if (cmd->count("--penalty")) cfg.loss.penaltyKind = penaltyKindFromName(penalty);
        if (cmd->count("--weighting")) cfg.loss.weighting = weightKindFromName(weighting);
        if (cmd->count("--smoothing-samples")) cfg.loss.smoothingSamples = smoothingSamples;
        if (cmd->count("--smoothing-epsilon")) cfg.loss.smoothingEpsilon = smoothingEpsilon;
        if (cmd->count("--top-k")) cfg.loss.topK = topK;
        if (cmd->count("--dropout")) cfg.dropoutRate = dropout;
        if (cmd->count("--triplet-min-overlap")) cfg.tripletMinOverlap = tripletMinOverlap;
        if (cmd->count("--hidden")) {
          cfg.hiddenSizes.clear();
          for (const std::string& h : splitCommaList(hidden)) {
            cfg.hiddenSizes.push_back(std::stoi(h));
          }
        }
        return cfg;
      }
    };

    // run --------------------------------------------------------------------
    auto* runCmd = app.add_subcommand("run", "train one configuration");
    InputOptions runInputs;
    runInputs.attach(runCmd);
    ConfigFlags runFlags;
    runFlags.attach(runCmd);
    std::string runOut = "out";
    bool runMetrics = false;
    runCmd->add_option("--out", runOut, "output directory");
    runCmd->add_flag("--metrics", runMetrics, "write per-epoch metrics.jsonl");

    // sweep --------------------------------------------------------------------
    auto* sweepCmd = app.add_subcommand("sweep", "hyperparameter grid search");
    InputOptions sweepInputs;
    sweepInputs.attach(sweepCmd);
    ConfigFlags sweepFlags;
    sweepFlags.attach(sweepCmd);
    std::string sweepSpecPath;
    int sweepBudget = 0;
    std::uint64_t sweepSeed = 0;
    std::string sweepOut = "out";
    sweepCmd->add_option("--sweep", sweepSpecPath, "sweep spec JSON file");
    sweepCmd->add_option("--budget", sweepBudget, "trial budget (subset of the grid)");
    sweepCmd->add_option("--sweep-seed", sweepSeed, "seed for budgeted subset sampling");
    sweepCmd->add_option("--out", sweepOut, "output directory");

    // ablate --------------------------------------------------------------------
    auto* ablateCmd = app.add_subcommand("ablate", "compare methods across seeds");
    InputOptions ablateInputs;
    ablateInputs.attach(ablateCmd);
    ConfigFlags ablateFlags;
    ablateFlags.attach(ablateCmd);
    std::string ablateMethods;
    std::string ablateSeeds;
    std::string ablateSweepPath;
    bool sweepPerSeed = false;
    std::string ablateOut = "out";
    ablateCmd->add_option("--methods", ablateMethods, "comma-separated method list")
        ->required();
    ablateCmd->add_option("--seeds", ablateSeeds, "comma-separated seed list (>= 2)")
        ->required();
    ablateCmd->add_option("--sweep", ablateSweepPath,
                          "sweep spec JSON; search before the seed runs");
    ablateCmd->add_flag("--sweep-per-seed", sweepPerSeed, "repeat the search per seed");
    ablateCmd->add_option("--out", ablateOut, "output directory");

    // report --------------------------------------------------------------------
    auto* reportCmd = app.add_subcommand("report", "render a stored report");
    std::string reportIn;
    std::string reportFormat = "text";
    std::string reportOut;
    reportCmd->add_option("--in", reportIn, "report JSON file")->required();
    reportCmd->add_option("--format", reportFormat, "text or csv");
    reportCmd->add_option("--out", reportOut, "write here instead of stdout");

    std::vector<std::string> argvStrings;
    argvStrings.reserve(args.size() + 1);
    argvStrings.emplace_back("lolws");
    for (std::string& a : args) argvStrings.push_back(std::move(a));
    std::vector<char*> argv;
    argv.reserve(argvStrings.size());
    for (std::string& s : argvStrings) argv.push_back(s.data());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : 2;
    }

    if (featCmd->parsed()) {
      return cmdFeaturize(corpus, vocabLimit, binarize,
                          featCmd->count("--num-classes")
                              ? std::optional<int>(numClassesFlag)
                              : std::nullopt,
                          trainFrac, valFrac, testFrac,
                          featCmd->count("--val-per-class")
                              ? std::optional<int>(valPerClassFlag)
                              : std::nullopt,
                          splitSeed, featOut);
    }
    if (synthCmd->parsed()) return cmdSynth(synthCfg, synthOut);
    if (labelCmd->parsed()) return cmdLabel(labelInputs, labelSplit, labelOut);

    if (runCmd->parsed()) {
      Manifest manifest;
      manifest.command = "run";
      const RunConfig cfg = runFlags.build();
      manifest.configHash = configHashOf(cfg);
      TaskInputs task = runInputs.load();
      manifest.inputDigests = task.digests;
      ensureDir(runOut);

      std::optional<std::ofstream> metrics;
      const std::string metricsPath = (fs::path(runOut) / "metrics.jsonl").string();
      if (runMetrics) {
        metrics.emplace(metricsPath, std::ios::binary);
        if (!*metrics) throw DataError("cannot open " + metricsPath + " for writing");
      }
      const TrainResult result =
          trainOnce(cfg, task.splits, task.labelers, metrics ? &*metrics : nullptr);
      manifest.wallTimeSeconds = result.report.wallTimeSeconds;

      const std::string reportPath = (fs::path(runOut) / "report.json").string();
      const std::string ckptPath = (fs::path(runOut) / "checkpoint.bin").string();
      writeFile(reportPath, jsonText(trainReportToJson(result.report)));
      saveCheckpoint(Checkpoint{result.model, cfg.seed, result.report.selectedEpoch},
                     ckptPath);
      manifest.outputs = {reportPath, ckptPath};
      if (runMetrics) manifest.outputs.push_back(metricsPath);
      manifest.write((fs::path(runOut) / "manifest.json").string());
      printOut(trainReportText(result.report));
      return 0;
    }

    if (sweepCmd->parsed()) {
      Manifest manifest;
      manifest.command = "sweep";
      const RunConfig base = sweepFlags.build();
      manifest.configHash = configHashOf(base);
      SweepSpec sp;
      if (!sweepSpecPath.empty()) {
        sp = sweepSpecFromJson(readJsonFile(sweepSpecPath));
        manifest.inputDigests[sweepSpecPath] = sha256HexFile(sweepSpecPath);
      }
      if (sweepCmd->count("--budget")) sp.budget = sweepBudget;
      if (sweepCmd->count("--sweep-seed")) sp.seed = sweepSeed;
      TaskInputs task = sweepInputs.load();
      for (const auto& [p, digest] : task.digests) manifest.inputDigests[p] = digest;
      ensureDir(sweepOut);

      const SweepResult result = sweep(sp, base, task.splits, task.labelers);
      const std::string sweepPath = (fs::path(sweepOut) / "sweep.json").string();
      const std::string bestPath = (fs::path(sweepOut) / "best_config.json").string();
      writeFile(sweepPath, jsonText(sweepResultToJson(result)));
      writeFile(bestPath, jsonText(runConfigToJson(result.best)));
      manifest.outputs = {sweepPath, bestPath};
      manifest.write((fs::path(sweepOut) / "manifest.json").string());
      printOut(sweepTrialsText(result));
      return 0;
    }

    if (ablateCmd->parsed()) {
      Manifest manifest;
      manifest.command = "ablate";
      const RunConfig base = ablateFlags.build();
      manifest.configHash = configHashOf(base);
      AblationSpec spec;
      for (const std::string& m : splitCommaList(ablateMethods)) {
        spec.methods.push_back(methodFromName(m));
      }
      for (const std::string& s : splitCommaList(ablateSeeds)) {
        spec.seeds.push_back(std::stoull(s));
      }
      if (!ablateSweepPath.empty()) {
        spec.sweep = sweepSpecFromJson(readJsonFile(ablateSweepPath));
        manifest.inputDigests[ablateSweepPath] = sha256HexFile(ablateSweepPath);
      }
      spec.sweepPerSeed = sweepPerSeed;
      TaskInputs task = ablateInputs.load();
      for (const auto& [p, digest] : task.digests) manifest.inputDigests[p] = digest;
      ensureDir(ablateOut);

      const AblationResult result = ablationSuite(base, spec, task.splits, task.labelers);
      const std::string jsonPath = (fs::path(ablateOut) / "ablation.json").string();
      const std::string textPath = (fs::path(ablateOut) / "ablation.txt").string();
      const std::string csvPath = (fs::path(ablateOut) / "ablation.csv").string();
      writeFile(jsonPath, jsonText(ablationResultToJson(result)));
      writeFile(textPath, ablationTableText(result));
      writeFile(csvPath, ablationTableCsv(result));
      manifest.outputs = {jsonPath, textPath, csvPath};
      manifest.write((fs::path(ablateOut) / "manifest.json").string());
      printOut(ablationTableText(result));
      return 0;
    }

    if (reportCmd->parsed()) {
      const nlohmann::json j = readJsonFile(reportIn);
      const std::string kind = j.value("kind", "");
      std::string rendered;
      if (kind == "trainReport") {
        const TrainReport report = trainReportFromJson(j);
        rendered = reportFormat == "csv" ? trainReportCsv(report) : trainReportText(report);
      } else if (kind == "ablationResult") {
        const AblationResult result = ablationResultFromJson(j);
        rendered =
            reportFormat == "csv" ? ablationTableCsv(result) : ablationTableText(result);
      } else if (kind == "sweepResult") {
        SweepResult result;
        result.best = runConfigFromJson(j.at("best"));
        result.bestReport = trainReportFromJson(j.at("bestReport"));
        for (const nlohmann::json& t : j.at("trials")) {
          result.trials.push_back(SweepTrial{runConfigFromJson(t.at("config")),
                                             trainReportFromJson(t.at("report"))});
        }
        rendered = reportFormat == "csv" ? sweepTrialsCsv(result) : sweepTrialsText(result);
      } else {
        throw ConfigError(reportIn + " holds no known report (kind='" + kind + "')");
      }
      if (reportFormat != "text" && reportFormat != "csv") {
        throw ConfigError("unknown format '" + reportFormat + "'");
      }
      if (reportOut.empty()) {
        printOut(rendered);
      } else {
        writeFile(reportOut, rendered);
        printOut("wrote " + reportOut + "\n");
      }
      return 0;
    }

    throw ConfigError("no command given");
  } catch (const ConfigError& e) {
    logError(e.what());
    return 2;
  } catch (const DataError& e) {
    logError(e.what());
    return 2;
  } catch (const NumericError& e) {
    logError(e.what());
    return 3;
  } catch (const std::exception& e) {
    logError(e.what());
    return 3;
  }
}

}  // namespace lolws::cli
