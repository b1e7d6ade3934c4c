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

#ifndef DEXC_REWARDS_H_
#define DEXC_REWARDS_H_

#include <array>
#include <span>

#include "dexc/demo.h"
#include "dexc/geometry.h"
#include "dexc/models.h"

namespace dexc {

struct RewardConfig {
  double beta_pos = 20.0;
  double beta_rot = 3.0;
  double beta_ang = 5.0;
  double beta_imi = 30.0;
  double beta_bc = 5.0;
  double beta_con = 30.0;
  double lambda_task = 1.0;
  double lambda_imi = 0.1;
  double lambda_bc = 0.05;
  double lambda_con = 0.1;

  void Validate() const;
  double LambdaSum() const {
    return lambda_task + lambda_imi + lambda_bc + lambda_con;
  }
};

// 2 * acos(|<q1, q2>|), in [0, pi]. Inputs must be unit within 1e-6.
double RotDistance(const Quat& q1, const Quat& q2);

struct TaskRewardTerms {
  double r_task = 0.0, r_pos = 0.0, r_rot = 0.0, r_angle = 0.0;
  double d_pos = 0.0, d_rot = 0.0, d_ang = 0.0;
};

TaskRewardTerms TaskReward(const ObjectState& achieved,
                           const ObjectState& target, const RewardConfig& cfg);

// Mean over keypoints of exp(-beta * |x_hat - x|).
double ImitationReward(std::span<const Vec3> achieved,
                       std::span<const Vec3> reference, double beta);
// Mean over joints of exp(-beta * |q_hat - q|).
double BcReward(const VecX& achieved, const VecX& reference, double beta);

// One hand's contacts, N x K flattened as [part * K + link].
struct ContactView {
  std::span<const Vec3> position;
  std::span<const char> mask;
};

// Masked contact distance reward averaged over both hands and all pairs.
double ContactReward(const std::array<ContactView, kNumHands>& policy,
                     const std::array<ContactView, kNumHands>& demo,
                     double beta, double d_max);

struct RewardBreakdown {
  double r_task = 0.0, r_pos = 0.0, r_rot = 0.0, r_angle = 0.0;
  double r_imi = 0.0, r_bc = 0.0, r_con = 0.0;
  double r_total = 0.0;
};

RewardBreakdown TotalReward(const TaskRewardTerms& task, double r_imi,
                            double r_bc, double r_con, const RewardConfig& cfg);

}  // namespace dexc

#endif  // DEXC_REWARDS_H_
