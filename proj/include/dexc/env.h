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

#ifndef DEXC_ENV_H_
#define DEXC_ENV_H_

#include <array>

#include "dexc/actions.h"
#include "dexc/curriculum.h"
#include "dexc/demo.h"
#include "dexc/models.h"
#include "dexc/nn.h"
#include "dexc/prep.h"
#include "dexc/rewards.h"
#include "dexc/sim.h"

namespace dexc {

// A preprocessed tracking task: the clip carries the achieved (replayed)
// hand references, and one contact annotation per hand.
struct Task {
  ObjectModel object;
  std::array<HandModel, kNumHands> hands;
  DemoClip clip;
  std::array<ContactAnnotation, kNumHands> contacts;
};

struct PrepOptions {
  int settle_steps = kDefaultSettleSteps;
  double gamma = kDefaultContactGamma;
  int max_contacts = kDefaultContactCount;
  double d_max = kDefaultMismatchDistance;
};

// Replay retargeting plus contact approximation, in memory.
Task PrepareTask(const ObjectModel& object,
                 const std::array<HandModel, kNumHands>& hands,
                 const DemoClip& raw_clip, const SimParams& sim_params,
                 const PrepOptions& options = {});

struct EnvConfig {
  SimParams sim;
  RewardConfig reward;
  ActionConfig action;
  double early_position = 0.10;  // meters
  double early_rotation = 1.0;   // radians
  double early_finger = 0.0;     // mean keypoint error, 0 disables
  double force_scale = 10.0;     // contact force giving flag 1
  double reset_noise = 0.01;     // std of hand joint noise at reset

  void Validate() const;
};

// 8 achieved + 16 targets + 4J joints/targets + 2K distances + 2NK contact
// flags + 1 phase.
int ObservationDim(int num_joints, int num_links);

struct StepOutcome {
  RewardBreakdown reward;
  TaskRewardTerms task;
  bool done = false;
  bool terminated = false;  // early termination
};

struct EpisodeRecord {
  int length = 0;
  std::array<double, kNumTerms> returns = {};
  double total_return = 0.0;
  bool terminated = false;
};

// One tracking episode over a task, always starting at frame 0. Step t
// drives the system toward frame t + 1, so episodes last at most T - 1
// steps.
class TrackingEnv {
 public:
  TrackingEnv(const Task* task, EnvConfig cfg);

  int obs_dim() const { return obs_dim_; }
  int action_dim() const { return kNumHands * num_joints_; }
  int max_length() const { return task_->clip.num_frames() - 1; }
  int frame() const { return frame_; }
  int steps() const { return steps_; }
  const SimState& state() const { return state_; }
  const EpisodeRecord& episode() const { return episode_; }
  EnvConfig& config() { return cfg_; }
  Simulator& simulator() { return sim_; }

  void Reset(Rng* noise);
  VecX Observe() const;
  // Raw policy action of size 2J (left hand first).
  StepOutcome Step(const VecX& action, const VirtualGains& gains);
  // Direct joint targets, bypassing the action map.
  StepOutcome StepTargets(const HandTargets& targets, const VirtualGains& gains);

 private:
  const Task* task_;
  EnvConfig cfg_;
  std::array<ActionConfig, kNumHands> action_cfg_;
  Simulator sim_;
  int num_joints_;
  int num_links_;
  int obs_dim_;
  SimState state_;
  HandTargets current_targets_;
  int frame_ = 0;
  int steps_ = 0;
  EpisodeRecord episode_;
};

}  // namespace dexc

#endif  // DEXC_ENV_H_
