// Copyright 2026 The dexc Authors
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

#ifndef DEXC_PIPELINE_H_
#define DEXC_PIPELINE_H_

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "dexc/config.h"
#include "dexc/env.h"
#include "dexc/eval.h"
#include "dexc/models.h"

namespace dexc {

struct Assets {
  ObjectModel object;
  std::array<HandModel, kNumHands> hands;
};

// Built-in toy assets unless the config names asset files.
Assets LoadAssets(const RunConfig& cfg);

// Demo plus its replay and contact sidecars. Throws when a sidecar is
// missing, naming the expected path.
Task LoadTask(const std::filesystem::path& demo, const Assets& assets);

// From cfg.demo when set (sidecars required), otherwise generated from the
// script and preprocessed in memory.
Task BuildTask(const RunConfig& cfg);

// Prep parameters only; recorded in sidecars.
std::string PrepHash(const RunConfig& cfg);

struct PrepSummary {
  std::filesystem::path retarget_path;
  std::filesystem::path contacts_path;
  double max_penetration = 0.0;
};

// Writes <demo>.retarget.json and <demo>.contacts.json.
PrepSummary RunPrep(const std::filesystem::path& demo, const RunConfig& cfg);

// Trains and writes config.toml, logs and checkpoints to out_dir.
// Returns the path of the checkpoint to evaluate (best when present).
std::filesystem::path RunTrain(const RunConfig& cfg, const Task& task,
                               const std::filesystem::path& out_dir,
                               const std::filesystem::path& resume = {});

// Writes report.json and summary.csv to out_dir.
EvalReport RunEval(const RunConfig& cfg, const Task& task, EvalMode mode,
                   const std::filesystem::path& checkpoint,
                   const std::filesystem::path& out_dir);

struct ReportRow {
  std::string method;
  std::string task;
  int n = 0;
  double mean_auc = 0.0;
  double std_auc = 0.0;
  double mean_completion = 0.0;
};

// Groups reports by (method, task). Refuses mixed reward configs unless
// allow_mixed.
std::vector<ReportRow> AggregateReports(const std::vector<EvalReport>& reports,
                                        bool allow_mixed);
// report.json files under each input (files or directories, recursive).
std::vector<EvalReport> CollectReports(
    const std::vector<std::filesystem::path>& inputs);
std::string ReportCsv(const std::vector<ReportRow>& rows);

}  // namespace dexc

#endif  // DEXC_PIPELINE_H_
