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

#include "dexc/env.h"

#include <algorithm>
#include <string>

#include "dexc/error.h"

namespace dexc {
namespace {

void PutState(const ObjectState& s, VecX* obs, int* i) {
  Quat q = CanonicalQuat(s.rotation);
  obs->segment<3>(*i) = s.position;
  (*obs)[*i + 3] = q.w();
  (*obs)[*i + 4] = q.x();
  (*obs)[*i + 5] = q.y();
  (*obs)[*i + 6] = q.z();
  (*obs)[*i + 7] = s.joint_angle;
  *i += 8;
}

}  // namespace

Task PrepareTask(const ObjectModel& object,
                 const std::array<HandModel, kNumHands>& hands,
                 const DemoClip& raw_clip, const SimParams& sim_params,
                 const PrepOptions& options) {
  Task task;
  task.object = object;
  task.hands = hands;
  Simulator sim(object, hands, sim_params);
  RetargetResult replay =
      ReplayRetarget(raw_clip, sim, options.settle_steps);
  task.clip = ApplyRetarget(raw_clip, replay);
  for (int h = 0; h < kNumHands; ++h) {
    task.contacts[h] =
        ApproximateContacts(task.clip, object, hands[h], h, options.gamma,
                            options.max_contacts, options.d_max);
  }
  return task;
}

void EnvConfig::Validate() const {
  reward.Validate();
  action.Validate();
  if (!(early_position > 0.0) || !(early_rotation > 0.0) ||
      !(early_finger >= 0.0)) {
    throw InvalidArgument("early termination thresholds must be positive");
  }
  if (!(force_scale > 0.0)) throw InvalidArgument("force scale must be positive");
  if (!(reset_noise >= 0.0)) throw InvalidArgument("reset noise must be >= 0");
}

int ObservationDim(int num_joints, int num_links) {
  return 8 + 16 + kNumHands * 2 * num_joints + kNumHands * num_links +
         kNumHands * kNumParts * num_links + 1;
}

TrackingEnv::TrackingEnv(const Task* task, EnvConfig cfg)
    : task_(task), cfg_(std::move(cfg)),
      sim_(task->object, task->hands, cfg_.sim) {
  const DemoClip& clip = task_->clip;
  if (clip.num_frames() < 2) throw InvalidArgument("task clip is too short");
  num_joints_ = clip.num_joints();
  num_links_ = clip.num_links();
  if (num_joints_ != task_->hands[0].num_joints() ||
      num_links_ != task_->hands[0].num_links()) {
    throw InvalidArgument("task clip and hand model disagree on J or K");
  }
  for (int h = 0; h < kNumHands; ++h) {
    const ContactAnnotation& a = task_->contacts[h];
    if (a.num_frames != clip.num_frames() || a.num_links != num_links_) {
      throw InvalidArgument("contact annotation does not match the clip");
    }
    action_cfg_[h] = cfg_.action.mode == ActionMode::kFullResidual
                         ? WithWristRange(cfg_.action, clip, h)
                         : cfg_.action;
  }
  cfg_.Validate();
  obs_dim_ = ObservationDim(num_joints_, num_links_);
}

void TrackingEnv::Reset(Rng* noise) {
  const DemoClip& clip = task_->clip;
  HandTargets q0 = {clip.hands[0].joints[0], clip.hands[1].joints[0]};
  HandTargets start = q0;
  if (noise != nullptr && cfg_.reset_noise > 0.0) {
    for (VecX& q : start) {
      for (Eigen::Index j = 0; j < q.size(); ++j) {
        q[j] += cfg_.reset_noise * noise->Normal();
      }
    }
  }
  state_ = sim_.Reset(clip.object_targets[0], start);
  current_targets_ = q0;
  frame_ = 0;
  steps_ = 0;
  episode_ = EpisodeRecord{};
}

VecX TrackingEnv::Observe() const {
  const DemoClip& clip = task_->clip;
  const int last = clip.num_frames() - 1;
  VecX obs(obs_dim_);
  int i = 0;
  PutState(state_.Object(), &obs, &i);
  PutState(clip.object_targets[frame_], &obs, &i);
  PutState(clip.object_targets[std::min(frame_ + 1, last)], &obs, &i);
  for (int h = 0; h < kNumHands; ++h) {
    obs.segment(i, num_joints_) = state_.hands[h].q;
    i += num_joints_;
    obs.segment(i, num_joints_) = current_targets_[h];
    i += num_joints_;
  }
  std::array<VecX, kNumHands> dist = sim_.FingerObjectDistances(state_);
  for (int h = 0; h < kNumHands; ++h) {
    obs.segment(i, num_links_) = dist[h];
    i += num_links_;
  }
  for (int h = 0; h < kNumHands; ++h) {
    for (double f : state_.contacts[h].normal_force) {
      obs[i++] = std::min(1.0, f / cfg_.force_scale);
    }
  }
  obs[i++] = static_cast<double>(frame_) / clip.num_frames();
  return obs;
}

StepOutcome TrackingEnv::Step(const VecX& action, const VirtualGains& gains) {
  if (action.size() != action_dim()) {
    throw InvalidArgument("action has " + std::to_string(action.size()) +
                          " entries, expected " + std::to_string(action_dim()));
  }
  const DemoClip& clip = task_->clip;
  HandTargets targets;
  for (int h = 0; h < kNumHands; ++h) {
    targets[h] = JointTargets(action.segment(h * num_joints_, num_joints_),
                              clip.hands[h].joints[frame_ + 1],
                              task_->hands[h], action_cfg_[h]);
  }
  return StepTargets(targets, gains);
}

StepOutcome TrackingEnv::StepTargets(const HandTargets& targets,
                                     const VirtualGains& gains) {
  const DemoClip& clip = task_->clip;
  if (frame_ + 1 >= clip.num_frames()) {
    throw InvalidArgument("episode already finished; call Reset");
  }
  const int next = frame_ + 1;
  const ObjectState& target = clip.object_targets[next];
  state_ = sim_.Step(state_, targets, target, gains);
  current_targets_ = targets;
  frame_ = next;
  ++steps_;

  StepOutcome out;
  out.task = TaskReward(state_.Object(), target, cfg_.reward);
  std::vector<Vec3> achieved, reference;
  VecX q_hat(kNumHands * num_joints_), q_ref(kNumHands * num_joints_);
  std::array<ContactView, kNumHands> policy_contacts, demo_contacts;
  const int pairs = kNumParts * num_links_;
  for (int h = 0; h < kNumHands; ++h) {
    std::vector<Vec3> centers = LinkCenters(task_->hands[h], state_.hands[h].q);
    achieved.insert(achieved.end(), centers.begin(), centers.end());
    const auto& ref = clip.hands[h].keypoints[next];
    reference.insert(reference.end(), ref.begin(), ref.end());
    q_hat.segment(h * num_joints_, num_joints_) = state_.hands[h].q;
    q_ref.segment(h * num_joints_, num_joints_) = clip.hands[h].joints[next];
    policy_contacts[h] = {state_.contacts[h].position, state_.contacts[h].flag};
    const ContactAnnotation& a = task_->contacts[h];
    const int offset = a.Index(next, 0, 0);
    demo_contacts[h] = {
        std::span<const Vec3>(a.contacts).subspan(offset, pairs),
        std::span<const char>(a.mask).subspan(offset, pairs)};
  }
  const RewardConfig& rc = cfg_.reward;
  double r_imi = ImitationReward(achieved, reference, rc.beta_imi);
  double r_bc = BcReward(q_hat, q_ref, rc.beta_bc);
  double r_con = ContactReward(policy_contacts, demo_contacts, rc.beta_con,
                               task_->contacts[0].d_max);
  out.reward = TotalReward(out.task, r_imi, r_bc, r_con, rc);

  out.terminated = out.task.d_pos > cfg_.early_position ||
                   out.task.d_rot > cfg_.early_rotation;
  if (cfg_.early_finger > 0.0) {
    double err = 0.0;
    for (size_t k = 0; k < achieved.size(); ++k) {
      err += (achieved[k] - reference[k]).norm();
    }
    out.terminated = out.terminated || err / achieved.size() > cfg_.early_finger;
  }
  out.done = out.terminated || frame_ == clip.num_frames() - 1;

  episode_.length = steps_;
  episode_.returns[kTermTask] += out.reward.r_task;
  episode_.returns[kTermImi] += r_imi;
  episode_.returns[kTermBc] += r_bc;
  episode_.returns[kTermCon] += r_con;
  episode_.total_return += out.reward.r_total;
  episode_.terminated = out.terminated;
  return out;
}

}  // namespace dexc
