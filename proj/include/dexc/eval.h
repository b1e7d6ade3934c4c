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

#ifndef DEXC_EVAL_H_
#define DEXC_EVAL_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dexc/env.h"
#include "dexc/trainer.h"

namespace dexc {

enum class EvalMode { kPolicy, kKinematicsOnly, kControllerOnly };

EvalMode ParseEvalMode(std::string_view name);
std::string_view EvalModeName(EvalMode mode);

struct TrackingErrors {
  double d_pos = 0.0;
  double d_rot = 0.0;
  double d_ang = 0.0;
};

TrackingErrors TrackingError(const ObjectState& achieved,
                             const ObjectState& target);

// Mean distance between the points moved by the two poses.
double AddPerPart(const Pose& achieved, const Pose& target,
                  std::span<const Vec3> points);

// Thresholds tau_i = max * i / n for i = 1..n.
std::vector<double> AucThresholds(double max_threshold, int n_thresholds);
// Fraction of entries <= tau for each threshold.
std::vector<double> AccuracyCurve(std::span<const double> series,
                                  double max_threshold, int n_thresholds);
// Mean of the accuracy curve. Infinite entries always count as failures.
double AddAuc(std::span<const double> series, double max_threshold,
              int n_thresholds);

struct EvalConfig {
  int n_episodes = 20;
  double max_threshold = 0.10;
  int n_thresholds = 100;
  uint64_t seed = 0;

  void Validate() const;
};

struct EpisodeEval {
  std::vector<TrackingErrors> errors;               // completed steps only
  std::vector<std::array<double, kNumParts>> add;   // completed steps only
  std::vector<double> avg_add;  // length T - 1, +inf after termination
  bool terminated = false;
  double auc = 0.0;
};

struct EvalReport {
  std::string method;
  std::string task;
  std::string mode;
  uint64_t seed = 0;
  std::string config_hash;
  std::string reward_hash;
  double max_threshold = 0.10;
  int n_thresholds = 100;
  std::array<int, kNumParts> reference_points = {};
  std::vector<EpisodeEval> episodes;
  std::vector<double> accuracy;  // averaged over episodes
  double auc = 0.0;
  double completion = 0.0;
  TrackingErrors mean_errors;
  double max_applied_kp = 0.0;
};

// Runs n_episodes from frame 0 with deterministic actions. Policy and
// kinematics-only modes apply zero virtual gains; controller-only applies
// `controller_gains` with zero actions. `policy` is required in policy mode.
EvalReport Evaluate(EvalMode mode, const PolicySnapshot* policy,
                    const Task& task, const EnvConfig& env_cfg,
                    const EvalConfig& cfg,
                    const VirtualGains& controller_gains = {});

void SaveReport(const EvalReport& report, const std::filesystem::path& path);
EvalReport LoadReport(const std::filesystem::path& path);

std::string SummaryCsvHeader();
std::string SummaryCsvRow(const EvalReport& report);

}  // namespace dexc

#endif  // DEXC_EVAL_H_
