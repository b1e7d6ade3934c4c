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

#include "dexc/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "dexc/error.h"
#include "json_util.h"

namespace dexc {
namespace {

using internal::Json;

constexpr double kInf = std::numeric_limits<double>::infinity();

Json SeriesToJson(const std::vector<double>& series) {
  Json out = Json::array();
  for (double v : series) {
    if (std::isfinite(v)) {
      out.push_back(v);
    } else {
      out.push_back(nullptr);
    }
  }
  return out;
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

EvalMode ParseEvalMode(std::string_view name) {
  if (name == "policy") return EvalMode::kPolicy;
  if (name == "kinematics-only") return EvalMode::kKinematicsOnly;
  if (name == "controller-only") return EvalMode::kControllerOnly;
  throw InvalidArgument("unknown eval mode '" + std::string(name) + "'");
}

std::string_view EvalModeName(EvalMode mode) {
  switch (mode) {
    case EvalMode::kPolicy: return "policy";
    case EvalMode::kKinematicsOnly: return "kinematics-only";
    case EvalMode::kControllerOnly: return "controller-only";
  }
  return "unknown";
}

TrackingErrors TrackingError(const ObjectState& achieved,
                             const ObjectState& target) {
  return {(achieved.position - target.position).norm(),
          RotDistance(achieved.rotation, target.rotation),
          std::abs(achieved.joint_angle - target.joint_angle)};
}

double AddPerPart(const Pose& achieved, const Pose& target,
                  std::span<const Vec3> points) {
  if (points.empty()) throw InvalidArgument("ADD needs at least one point");
  double sum = 0.0;
  for (const Vec3& p : points) {
    sum += (achieved.Apply(p) - target.Apply(p)).norm();
  }
  return sum / static_cast<double>(points.size());
}

std::vector<double> AucThresholds(double max_threshold, int n_thresholds) {
  if (!(max_threshold > 0.0) || n_thresholds < 1) {
    throw InvalidArgument("AUC needs max_threshold > 0 and n_thresholds >= 1");
  }
  std::vector<double> tau(n_thresholds);
  for (int i = 0; i < n_thresholds; ++i) {
    tau[i] = max_threshold * (i + 1) / n_thresholds;
  }
  return tau;
}

std::vector<double> AccuracyCurve(std::span<const double> series,
                                  double max_threshold, int n_thresholds) {
  if (series.empty()) throw InvalidArgument("ADD series is empty");
  std::vector<double> tau = AucThresholds(max_threshold, n_thresholds);
  std::vector<double> sorted(series.begin(), series.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> acc(n_thresholds);
  for (int i = 0; i < n_thresholds; ++i) {
    auto end = std::upper_bound(sorted.begin(), sorted.end(), tau[i]);
    acc[i] = static_cast<double>(end - sorted.begin()) / sorted.size();
  }
  return acc;
}

double AddAuc(std::span<const double> series, double max_threshold,
              int n_thresholds) {
  std::vector<double> acc = AccuracyCurve(series, max_threshold, n_thresholds);
  double sum = 0.0;
  for (double a : acc) sum += a;
  return sum / n_thresholds;
}

void EvalConfig::Validate() const {
  if (n_episodes < 1) throw InvalidArgument("evaluation needs n_episodes >= 1");
  AucThresholds(max_threshold, n_thresholds);
}

EvalReport Evaluate(EvalMode mode, const PolicySnapshot* policy,
                    const Task& task, const EnvConfig& env_cfg,
                    const EvalConfig& cfg,
                    const VirtualGains& controller_gains) {
  cfg.Validate();
  if (mode == EvalMode::kPolicy && policy == nullptr) {
    throw InvalidArgument("policy evaluation needs a checkpoint");
  }
  TrackingEnv env(&task, env_cfg);
  if (mode == EvalMode::kPolicy &&
      (policy->ac.actor.input_dim() != env.obs_dim() ||
       policy->ac.actor.output_dim() != env.action_dim())) {
    throw InvalidArgument("checkpoint dimensions do not match the task");
  }
  const VirtualGains gains =
      mode == EvalMode::kControllerOnly ? controller_gains : VirtualGains{};
  const DemoClip& clip = task.clip;
  const int steps = clip.num_frames() - 1;

  EvalReport report;
  report.mode = std::string(EvalModeName(mode));
  report.method = report.mode;
  report.task = clip.metadata.name.empty() ? clip.metadata.script
                                           : clip.metadata.name;
  report.seed = cfg.seed;
  report.max_threshold = cfg.max_threshold;
  report.n_thresholds = cfg.n_thresholds;
  for (int n = 0; n < kNumParts; ++n) {
    report.reference_points[n] =
        static_cast<int>(task.object.parts[n].surface_points.size());
  }
  report.accuracy.assign(cfg.n_thresholds, 0.0);
  report.max_applied_kp = gains.kp;

  Rng noise(cfg.seed);
  int completed = 0;
  long error_count = 0;
  for (int ep = 0; ep < cfg.n_episodes; ++ep) {
    env.Reset(&noise);
    EpisodeEval e;
    e.avg_add.assign(steps, kInf);
    for (int t = 0; t < steps; ++t) {
      StepOutcome out;
      if (mode == EvalMode::kKinematicsOnly) {
        out = env.StepTargets({clip.hands[0].joints[t + 1],
                               clip.hands[1].joints[t + 1]},
                              gains);
      } else if (mode == EvalMode::kControllerOnly) {
        out = env.Step(VecX::Zero(env.action_dim()), gains);
      } else {
        out = env.Step(policy->MeanAction(env.Observe()), gains);
      }
      const ObjectState achieved = env.state().Object();
      const ObjectState& target = clip.object_targets[t + 1];
      e.errors.push_back(TrackingError(achieved, target));
      std::array<double, kNumParts> add;
      double avg = 0.0;
      for (int n = 0; n < kNumParts; ++n) {
        Pose pa = task.object.PartPose(n, achieved.BasePose(), achieved.joint_angle);
        Pose pt = task.object.PartPose(n, target.BasePose(), target.joint_angle);
        add[n] = AddPerPart(pa, pt, task.object.parts[n].surface_points);
        avg += add[n] / kNumParts;
      }
      e.add.push_back(add);
      e.avg_add[t] = avg;
      if (out.done) {
        e.terminated = out.terminated;
        break;
      }
    }
    e.auc = AddAuc(e.avg_add, cfg.max_threshold, cfg.n_thresholds);
    std::vector<double> acc =
        AccuracyCurve(e.avg_add, cfg.max_threshold, cfg.n_thresholds);
    for (int i = 0; i < cfg.n_thresholds; ++i) {
      report.accuracy[i] += acc[i] / cfg.n_episodes;
    }
    report.auc += e.auc / cfg.n_episodes;
    if (!e.terminated) ++completed;
    for (const TrackingErrors& te : e.errors) {
      report.mean_errors.d_pos += te.d_pos;
      report.mean_errors.d_rot += te.d_rot;
      report.mean_errors.d_ang += te.d_ang;
      ++error_count;
    }
    report.episodes.push_back(std::move(e));
  }
  if (error_count > 0) {
    report.mean_errors.d_pos /= error_count;
    report.mean_errors.d_rot /= error_count;
    report.mean_errors.d_ang /= error_count;
  }
  report.completion = static_cast<double>(completed) / cfg.n_episodes;
  return report;
}

void SaveReport(const EvalReport& r, const std::filesystem::path& path) {
  Json j;
  j["method"] = r.method;
  j["task"] = r.task;
  j["mode"] = r.mode;
  j["seed"] = r.seed;
  j["config_hash"] = r.config_hash;
  j["reward_hash"] = r.reward_hash;
  j["max_threshold"] = r.max_threshold;
  j["n_thresholds"] = r.n_thresholds;
  j["reference_points"] = r.reference_points;
  j["add_auc"] = r.auc;
  j["completion"] = r.completion;
  j["mean_errors"] = {{"d_pos", r.mean_errors.d_pos},
                      {"d_rot", r.mean_errors.d_rot},
                      {"d_ang", r.mean_errors.d_ang}};
  j["max_applied_kp"] = r.max_applied_kp;
  j["accuracy"] = r.accuracy;
  Json episodes = Json::array();
  for (const EpisodeEval& e : r.episodes) {
    Json je;
    je["auc"] = e.auc;
    je["terminated"] = e.terminated;
    Json errs = Json::array();
    for (const TrackingErrors& te : e.errors) {
      errs.push_back({te.d_pos, te.d_rot, te.d_ang});
    }
    je["errors"] = errs;
    je["add_per_part"] = e.add;
    je["avg_add"] = SeriesToJson(e.avg_add);
    episodes.push_back(je);
  }
  j["episodes"] = episodes;
  internal::WriteJsonFile(j, path);
}

EvalReport LoadReport(const std::filesystem::path& path) {
  Json j = internal::ReadJsonFile(path);
  const std::string where = path.string();
  EvalReport r;
  r.method = internal::Require(j, "method", where).get<std::string>();
  r.task = internal::Require(j, "task", where).get<std::string>();
  r.mode = internal::Require(j, "mode", where).get<std::string>();
  r.seed = internal::Require(j, "seed", where).get<uint64_t>();
  r.config_hash = internal::Require(j, "config_hash", where).get<std::string>();
  r.reward_hash = internal::Require(j, "reward_hash", where).get<std::string>();
  r.auc = internal::RequireNumber(j, "add_auc", where);
  r.completion = internal::RequireNumber(j, "completion", where);
  const Json& me = internal::Require(j, "mean_errors", where);
  r.mean_errors = {internal::RequireNumber(me, "d_pos", where),
                   internal::RequireNumber(me, "d_rot", where),
                   internal::RequireNumber(me, "d_ang", where)};
  r.max_threshold = internal::RequireNumber(j, "max_threshold", where);
  r.n_thresholds = internal::Require(j, "n_thresholds", where).get<int>();
  r.max_applied_kp = j.value("max_applied_kp", 0.0);
  if (j.contains("reference_points")) {
    r.reference_points = j["reference_points"].get<std::array<int, kNumParts>>();
  }
  if (j.contains("accuracy")) r.accuracy = j["accuracy"].get<std::vector<double>>();
  if (j.contains("episodes")) {
    for (const Json& je : j["episodes"]) {
      EpisodeEval e;
      e.auc = internal::RequireNumber(je, "auc", where);
      e.terminated = internal::Require(je, "terminated", where).get<bool>();
      for (const Json& te : internal::Require(je, "errors", where)) {
        e.errors.push_back({te.at(0).get<double>(), te.at(1).get<double>(),
                            te.at(2).get<double>()});
      }
      e.add = internal::Require(je, "add_per_part", where)
                  .get<std::vector<std::array<double, kNumParts>>>();
      for (const Json& v : internal::Require(je, "avg_add", where)) {
        e.avg_add.push_back(v.is_null() ? std::numeric_limits<double>::infinity()
                                        : v.get<double>());
      }
      r.episodes.push_back(std::move(e));
    }
  }
  return r;
}

std::string SummaryCsvHeader() {
  return "method,task,seed,add_auc,mean_d_pos,mean_d_rot,mean_d_ang,"
         "completion,config_hash";
}

std::string SummaryCsvRow(const EvalReport& r) {
  return r.method + "," + r.task + "," + std::to_string(r.seed) + "," +
         Num(r.auc) + "," + Num(r.mean_errors.d_pos) + "," +
         Num(r.mean_errors.d_rot) + "," + Num(r.mean_errors.d_ang) + "," +
         Num(r.completion) + "," + r.config_hash;
}

}  // namespace dexc
