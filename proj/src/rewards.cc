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

#include "dexc/rewards.h"

#include <algorithm>
#include <cmath>

#include "dexc/error.h"

namespace dexc {

void RewardConfig::Validate() const {
  for (double b : {beta_pos, beta_rot, beta_ang, beta_imi, beta_bc, beta_con}) {
    if (!(b > 0.0)) throw InvalidArgument("reward betas must be positive");
  }
  for (double l : {lambda_task, lambda_imi, lambda_bc, lambda_con}) {
    if (!(l >= 0.0)) throw InvalidArgument("reward lambdas must be nonnegative");
  }
}

double RotDistance(const Quat& q1, const Quat& q2) {
  if (std::abs(q1.norm() - 1.0) > 1e-6 || std::abs(q2.norm() - 1.0) > 1e-6) {
    throw InvalidArgument("rotation distance needs unit quaternions");
  }
  // 2 acos(|<q1, q2>|), evaluated through the relative rotation so that
  // equal inputs give exactly zero.
  const Quat r = q1.conjugate() * q2;
  return 2.0 * std::atan2(r.vec().norm(), std::abs(r.w()));
}

TaskRewardTerms TaskReward(const ObjectState& achieved,
                           const ObjectState& target, const RewardConfig& cfg) {
  TaskRewardTerms r;
  r.d_pos = (achieved.position - target.position).norm();
  r.d_rot = RotDistance(achieved.rotation, target.rotation);
  r.d_ang = std::abs(achieved.joint_angle - target.joint_angle);
  r.r_pos = std::exp(-cfg.beta_pos * r.d_pos);
  r.r_rot = std::exp(-cfg.beta_rot * r.d_rot);
  r.r_angle = std::exp(-cfg.beta_ang * r.d_ang);
  r.r_task = r.r_pos * r.r_rot * r.r_angle;
  return r;
}

double ImitationReward(std::span<const Vec3> achieved,
                       std::span<const Vec3> reference, double beta) {
  if (achieved.size() != reference.size() || achieved.empty()) {
    throw InvalidArgument("keypoint sets must be nonempty and match in size");
  }
  double sum = 0.0;
  for (size_t i = 0; i < achieved.size(); ++i) {
    sum += std::exp(-beta * (achieved[i] - reference[i]).norm());
  }
  return sum / static_cast<double>(achieved.size());
}

double BcReward(const VecX& achieved, const VecX& reference, double beta) {
  if (achieved.size() != reference.size() || achieved.size() == 0) {
    throw InvalidArgument("joint vectors must be nonempty and match in size");
  }
  return (-beta * (achieved - reference).array().abs()).exp().mean();
}

double ContactReward(const std::array<ContactView, kNumHands>& policy,
                     const std::array<ContactView, kNumHands>& demo,
                     double beta, double d_max) {
  const size_t pairs = policy[0].mask.size();
  double sum = 0.0;
  for (int h = 0; h < kNumHands; ++h) {
    if (policy[h].mask.size() != pairs || demo[h].mask.size() != pairs ||
        policy[h].position.size() != pairs || demo[h].position.size() != pairs) {
      throw InvalidArgument("contact arrays must share the (N, K) shape");
    }
    for (size_t i = 0; i < pairs; ++i) {
      bool p = policy[h].mask[i] != 0;
      bool d = demo[h].mask[i] != 0;
      double dist = 0.0;
      if (p != d) {
        dist = d_max;
      } else if (p) {
        dist = (policy[h].position[i] - demo[h].position[i]).norm();
      }
      sum += std::exp(-beta * dist);
    }
  }
  if (pairs == 0) throw InvalidArgument("contact arrays are empty");
  return sum / (kNumHands * static_cast<double>(pairs));
}

RewardBreakdown TotalReward(const TaskRewardTerms& task, double r_imi,
                            double r_bc, double r_con, const RewardConfig& cfg) {
  RewardBreakdown b;
  b.r_task = task.r_task;
  b.r_pos = task.r_pos;
  b.r_rot = task.r_rot;
  b.r_angle = task.r_angle;
  b.r_imi = r_imi;
  b.r_bc = r_bc;
  b.r_con = r_con;
  b.r_total = cfg.lambda_task * b.r_task + cfg.lambda_imi * r_imi +
              cfg.lambda_bc * r_bc + cfg.lambda_con * r_con;
  return b;
}

}  // namespace dexc
