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

#ifndef DEXC_SIM_H_
#define DEXC_SIM_H_

#include <array>
#include <vector>

#include "dexc/demo.h"
#include "dexc/geometry.h"
#include "dexc/models.h"

namespace dexc {

struct SimParams {
  double control_dt = 0.02;
  int substeps = 4;
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);
  double friction = 1.0;
  double contact_stiffness = 5e3;  // N/m, normal and tangential
  double contact_damping = 50.0;   // N*s/m
  bool ground_enabled = true;
  double ground_height = 0.0;
  // Rotation and articulation gains are this ratio times the base gains.
  double rotation_gain_ratio = 0.1;
  // Caps the virtual force/torque norms; 0 disables the cap.
  double virtual_force_cap = 0.0;
  double velocity_limit = 50.0;

  double substep_dt() const { return control_dt / substeps; }
};

// Virtual object controller gains (k_p, k_v). Translation uses them
// directly; rotation and articulation use them times rotation_gain_ratio.
struct VirtualGains {
  double kp = 0.0;
  double kv = 0.0;
};

// Per hand, indexed [part * K + link].
struct ContactReport {
  std::vector<char> flag;
  std::vector<Vec3> position;
  std::vector<double> normal_force;

  void Resize(int count);
};

struct HandState {
  VecX q, qd;
  std::vector<Vec3> tangent_disp;  // friction spring per (part, link)
};

struct SimState {
  Vec3 position = Vec3::Zero();
  Quat rotation = Quat::Identity();
  Vec3 linear_velocity = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();  // world frame
  double joint_angle = 0.0;
  double joint_velocity = 0.0;
  std::array<HandState, kNumHands> hands;
  std::array<ContactReport, kNumHands> contacts;
  double time = 0.0;
  long step_count = 0;
  bool velocity_clamped = false;
  // Hand-object contact forces of the last sub-step: total force on the
  // object and total force on all hand links. They sum to zero.
  Vec3 object_contact_force = Vec3::Zero();
  Vec3 hand_contact_force = Vec3::Zero();

  ObjectState Object() const { return {position, rotation, joint_angle}; }
};

struct VirtualWrenchResult {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
  double articulation_torque = 0.0;
};

// Per-DoF PD wrench on the object toward `target`. `rotational` applies to
// the three rotation DoFs and the articulation.
VirtualWrenchResult VirtualWrench(const SimState& state,
                                  const ObjectState& target,
                                  const VirtualGains& translational,
                                  const VirtualGains& rotational);
inline VirtualWrenchResult VirtualWrench(const SimState& state,
                                         const ObjectState& target,
                                         const VirtualGains& gains) {
  return VirtualWrench(state, target, gains, gains);
}

// k_v = 2 * sqrt(k_p * inertia).
double CriticalDamping(double kp, double effective_inertia);

using HandTargets = std::array<VecX, kNumHands>;

// Two-part articulated object with a free base, two PD-driven sphere-proxy
// hands, penalty contacts and the virtual object controller. The simulator
// holds no per-episode state; Step is a pure function of its inputs.
class Simulator {
 public:
  Simulator(ObjectModel object, std::array<HandModel, kNumHands> hands,
            SimParams params = {});

  const ObjectModel& object() const { return object_; }
  const std::array<HandModel, kNumHands>& hands() const { return hands_; }
  const SimParams& params() const { return params_; }
  SimParams& mutable_params() { return params_; }

  SimState Reset(const ObjectState& object, const HandTargets& hand_q) const;
  // Object at clip.object_targets[t0], hands at clip.hands[*].joints[t0].
  SimState Reset(const DemoClip& clip, int t0) const;

  // One control step. With pin_object the object is held at `target`.
  SimState Step(const SimState& state, const HandTargets& joint_targets,
                const ObjectState& target, const VirtualGains& gains,
                bool pin_object = false) const;

  // Distance from each link sphere surface to the nearest part surface
  // (negative when penetrating).
  std::array<VecX, kNumHands> FingerObjectDistances(const SimState& state) const;

  VirtualGains RotationalGains(const VirtualGains& gains) const {
    return {gains.kp * params_.rotation_gain_ratio,
            gains.kv * params_.rotation_gain_ratio};
  }

 private:
  void Substep(SimState* state, const HandTargets& targets,
               const ObjectState& target, const VirtualGains& gains,
               bool pin_object) const;

  ObjectModel object_;
  std::array<HandModel, kNumHands> hands_;
  SimParams params_;
  double total_mass_;
  Vec3 base_inertia_;
  double joint_inertia_;
  std::array<std::vector<Vec3>, kNumParts> corners_;
};

}  // namespace dexc

#endif  // DEXC_SIM_H_
