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

#include "dexc/sim.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dexc/error.h"

namespace dexc {
namespace {

double ClampAbs(double v, double limit, bool* clamped) {
  if (v > limit) {
    *clamped = true;
    return limit;
  }
  if (v < -limit) {
    *clamped = true;
    return -limit;
  }
  return v;
}

Vec3 ClampAbs(const Vec3& v, double limit, bool* clamped) {
  return {ClampAbs(v.x(), limit, clamped), ClampAbs(v.y(), limit, clamped),
          ClampAbs(v.z(), limit, clamped)};
}

void CheckFinite(const SimState& s) {
  auto fail = [](const std::string& field) {
    throw DivergenceError("non-finite simulator state in " + field);
  };
  if (!s.position.allFinite()) fail("object position");
  if (!s.rotation.coeffs().allFinite()) fail("object rotation");
  if (!s.linear_velocity.allFinite()) fail("object linear velocity");
  if (!s.angular_velocity.allFinite()) fail("object angular velocity");
  if (!std::isfinite(s.joint_angle) || !std::isfinite(s.joint_velocity)) {
    fail("articulation");
  }
  for (int h = 0; h < kNumHands; ++h) {
    if (!s.hands[h].q.allFinite() || !s.hands[h].qd.allFinite()) {
      fail(h == 0 ? "left hand joints" : "right hand joints");
    }
  }
}

}  // namespace

void ContactReport::Resize(int count) {
  flag.assign(count, 0);
  position.assign(count, Vec3::Zero());
  normal_force.assign(count, 0.0);
}

VirtualWrenchResult VirtualWrench(const SimState& state,
                                  const ObjectState& target,
                                  const VirtualGains& translational,
                                  const VirtualGains& rotational) {
  VirtualWrenchResult w;
  w.force = translational.kp * (target.position - state.position) -
            translational.kv * state.linear_velocity;
  w.torque = rotational.kp * RotationError(state.rotation, target.rotation) -
             rotational.kv * state.angular_velocity;
  w.articulation_torque =
      rotational.kp * (target.joint_angle - state.joint_angle) -
      rotational.kv * state.joint_velocity;
  return w;
}

double CriticalDamping(double kp, double effective_inertia) {
  if (!(effective_inertia > 0.0)) {
    throw InvalidArgument("critical damping needs a positive inertia");
  }
  if (kp < 0.0) throw InvalidArgument("k_p must be nonnegative");
  return 2.0 * std::sqrt(kp * effective_inertia);
}

Simulator::Simulator(ObjectModel object, std::array<HandModel, kNumHands> hands,
                     SimParams params)
    : object_(std::move(object)), hands_(std::move(hands)), params_(params) {
  object_.Validate();
  for (const HandModel& h : hands_) h.Validate();
  if (hands_[0].num_links() != hands_[1].num_links() ||
      hands_[0].num_joints() != hands_[1].num_joints()) {
    throw InvalidArgument("both hands must share J and K");
  }
  if (params_.substeps < 1 || !(params_.control_dt > 0.0)) {
    throw InvalidArgument("simulator needs substeps >= 1 and control_dt > 0");
  }
  total_mass_ = object_.TotalMass();
  base_inertia_ = object_.BaseInertia();
  joint_inertia_ = object_.ArticulationInertia();
  for (int n = 0; n < kNumParts; ++n) {
    const PartModel& part = object_.parts[n];
    for (int c = 0; c < 8; ++c) {
      Vec3 sign((c & 1) ? 1.0 : -1.0, (c & 2) ? 1.0 : -1.0,
                (c & 4) ? 1.0 : -1.0);
      corners_[n].push_back(part.box_center +
                            sign.cwiseProduct(part.box_half_extents));
    }
  }
}

SimState Simulator::Reset(const ObjectState& object,
                          const HandTargets& hand_q) const {
  SimState s;
  s.position = object.position;
  s.rotation = object.rotation.normalized();
  s.joint_angle =
      std::clamp(object.joint_angle, object_.joint.lower, object_.joint.upper);
  const int pairs = kNumParts * hands_[0].num_links();
  for (int h = 0; h < kNumHands; ++h) {
    if (hand_q[h].size() != hands_[h].num_joints()) {
      throw InvalidArgument("hand joint vector has wrong dimension");
    }
    s.hands[h].q = hand_q[h].cwiseMax(hands_[h].lower).cwiseMin(hands_[h].upper);
    s.hands[h].qd = VecX::Zero(hand_q[h].size());
    s.hands[h].tangent_disp.assign(pairs, Vec3::Zero());
    s.contacts[h].Resize(pairs);
  }
  return s;
}

SimState Simulator::Reset(const DemoClip& clip, int t0) const {
  if (t0 < 0 || t0 >= clip.num_frames()) {
    throw InvalidArgument("reset frame " + std::to_string(t0) +
                          " outside [0, " + std::to_string(clip.num_frames()) + ")");
  }
  return Reset(clip.object_targets[t0],
               {clip.hands[0].joints[t0], clip.hands[1].joints[t0]});
}

SimState Simulator::Step(const SimState& state, const HandTargets& joint_targets,
                         const ObjectState& target, const VirtualGains& gains,
                         bool pin_object) const {
  if (gains.kp < 0.0 || gains.kv < 0.0) {
    throw InvalidArgument("virtual gains must be nonnegative");
  }
  SimState s = state;
  s.velocity_clamped = false;
  for (int i = 0; i < params_.substeps; ++i) {
    Substep(&s, joint_targets, target, gains, pin_object);
  }
  s.time += params_.control_dt;
  s.step_count += 1;
  CheckFinite(s);
  return s;
}

void Simulator::Substep(SimState* state, const HandTargets& targets,
                        const ObjectState& target, const VirtualGains& gains,
                        bool pin_object) const {
  SimState& s = *state;
  const double h = params_.substep_dt();
  const double kc = params_.contact_stiffness;
  const double cc = params_.contact_damping;
  const double mu = params_.friction;
  const int num_links = hands_[0].num_links();

  if (pin_object) {
    s.position = target.position;
    s.rotation = target.rotation.normalized();
    s.joint_angle = target.joint_angle;
    s.linear_velocity.setZero();
    s.angular_velocity.setZero();
    s.joint_velocity = 0.0;
  }

  const Pose base{s.position, s.rotation};
  const Vec3 axis_w = s.rotation * object_.joint.axis;
  const Vec3 anchor_w = base.Apply(object_.joint.anchor);
  std::array<Pose, kNumParts> part_pose = {
      object_.PartPose(0, base, s.joint_angle),
      object_.PartPose(1, base, s.joint_angle)};
  auto point_velocity = [&](const Vec3& x, int part) {
    Vec3 v = s.linear_velocity + s.angular_velocity.cross(x - s.position);
    if (part == 1) v += s.joint_velocity * axis_w.cross(x - anchor_w);
    return v;
  };

  Vec3 force = total_mass_ * params_.gravity;
  Vec3 torque = Vec3::Zero();
  double joint_torque = 0.0;
  {
    const PartModel& lid = object_.parts[1];
    Vec3 com = part_pose[1].Apply(lid.box_center);
    joint_torque += axis_w.dot((com - anchor_w).cross(lid.mass * params_.gravity));
  }
  auto apply_to_object = [&](const Vec3& x, const Vec3& f, int part) {
    force += f;
    torque += (x - s.position).cross(f);
    if (part == 1) joint_torque += axis_w.dot((x - anchor_w).cross(f));
  };

  // Inverse effective mass of the object at x along unit direction d.
  const Mat3 rot_now = s.rotation.toRotationMatrix();
  const Mat3 inv_inertia_w =
      rot_now * base_inertia_.cwiseInverse().asDiagonal() * rot_now.transpose();
  auto object_inv_mass = [&](const Vec3& x, const Vec3& d, int part) {
    if (pin_object) return 0.0;
    Vec3 rn = (x - s.position).cross(d);
    double w = 1.0 / total_mass_ + rn.dot(inv_inertia_w * rn);
    if (part == 1) {
      double a = axis_w.dot((x - anchor_w).cross(d));
      w += a * a / joint_inertia_;
    }
    return w;
  };
  // Penalty force along one direction, implicit in the pair's relative
  // velocity: f = (k * depth - (c + h k) v) / (1 + h w (c + h k)).
  auto implicit_scale = [&](double w) {
    return 1.0 / (1.0 + h * w * (cc + h * kc));
  };

  // hand-object contacts
  s.object_contact_force.setZero();
  s.hand_contact_force.setZero();
  std::array<std::vector<Vec3>, kNumHands> link_force;
  std::array<HandKinematics, kNumHands> kin;
  for (int hi = 0; hi < kNumHands; ++hi) {
    HandState& hs = s.hands[hi];
    const HandModel& hand = hands_[hi];
    kin[hi] = ForwardKinematics(hand, hs.q, true);
    link_force[hi].assign(num_links, Vec3::Zero());
    ContactReport& report = s.contacts[hi];
    VecX inv_joint_inertia = hand.inertia.cwiseInverse();
    for (int k = 0; k < num_links; ++k) {
      const Vec3& center = kin[hi].centers[k];
      const double radius = hand.links[k].radius;
      const auto& jac = kin[hi].jacobians[k];
      Vec3 link_vel = jac * hs.qd;
      auto hand_inv_mass = [&](const Vec3& d) {
        VecX jd = jac.transpose() * d;
        return jd.cwiseAbs2().dot(inv_joint_inertia);
      };
      for (int n = 0; n < kNumParts; ++n) {
        const int idx = n * num_links + k;
        const PartModel& part = object_.parts[n];
        const Pose& pose = part_pose[n];
        Vec3 local = pose.rotation.conjugate() * (center - pose.translation) -
                     part.box_center;
        BoxQuery q = QueryBox(part.box_half_extents, local);
        double pen = radius - q.signed_distance;
        if (pen <= 0.0) {
          report.flag[idx] = 0;
          report.position[idx].setZero();
          report.normal_force[idx] = 0.0;
          hs.tangent_disp[idx].setZero();
          continue;
        }
        Vec3 normal = pose.rotation * q.normal;
        Vec3 x = pose.Apply(q.closest + part.box_center);
        Vec3 v_rel = link_vel - point_velocity(x, n);
        double vn = v_rel.dot(normal);
        double wn = hand_inv_mass(normal) + object_inv_mass(x, normal, n);
        double fn =
            std::max(0.0, (kc * pen - (cc + h * kc) * vn) * implicit_scale(wn));
        Vec3 vt = v_rel - vn * normal;
        Vec3& disp = hs.tangent_disp[idx];
        disp -= disp.dot(normal) * normal;
        Vec3 ft = -kc * disp - (cc + h * kc) * vt;
        double ft_norm = ft.norm();
        if (ft_norm > 0.0) {
          Vec3 dir = ft / ft_norm;
          ft *= implicit_scale(hand_inv_mass(dir) + object_inv_mass(x, dir, n));
        }
        disp += h * vt;
        ft_norm = ft.norm();
        if (ft_norm > mu * fn) {
          ft *= ft_norm > 0.0 ? mu * fn / ft_norm : 0.0;
          disp = -ft / kc;
        }
        Vec3 f_link = fn * normal + ft;
        link_force[hi][k] += f_link;
        apply_to_object(x, -f_link, n);
        s.object_contact_force -= f_link;
        s.hand_contact_force += f_link;
        report.flag[idx] = 1;
        report.position[idx] = x;
        report.normal_force[idx] = fn;
      }
    }
  }

  // table contacts (object corners)
  if (params_.ground_enabled && !pin_object) {
    const Vec3 up = Vec3::UnitZ();
    for (int n = 0; n < kNumParts; ++n) {
      for (const Vec3& corner : corners_[n]) {
        Vec3 x = part_pose[n].Apply(corner);
        double depth = params_.ground_height - x.z();
        if (depth <= 0.0) continue;
        Vec3 v = point_velocity(x, n);
        double fn = std::max(0.0, (kc * depth - (cc + h * kc) * v.z()) *
                                      implicit_scale(object_inv_mass(x, up, n)));
        Vec3 ft(-cc * v.x(), -cc * v.y(), 0.0);
        double ft_norm = ft.norm();
        if (ft_norm > 0.0) {
          double wt = object_inv_mass(x, ft / ft_norm, n);
          ft /= 1.0 + h * wt * cc;
          ft_norm = ft.norm();
        }
        if (ft_norm > mu * fn && ft_norm > 0.0) ft *= mu * fn / ft_norm;
        apply_to_object(x, ft + fn * up, n);
      }
    }
  }

  bool clamped = false;
  const double vlim = params_.velocity_limit;
  if (!pin_object) {
    VirtualGains lin = gains;
    VirtualGains rot = RotationalGains(gains);
    if (params_.virtual_force_cap > 0.0) {
      // explicit, saturated controller
      VirtualWrenchResult w = VirtualWrench(s, target, lin, rot);
      double cap = params_.virtual_force_cap;
      if (w.force.norm() > cap) w.force *= cap / w.force.norm();
      if (w.torque.norm() > cap) w.torque *= cap / w.torque.norm();
      w.articulation_torque = std::clamp(w.articulation_torque, -cap, cap);
      force += w.force;
      torque += w.torque;
      joint_torque += w.articulation_torque;
      lin = rot = VirtualGains{};
    }
    // Linear: virtual PD integrated implicitly in the new velocity.
    double denom = 1.0 + h / total_mass_ * (lin.kv + h * lin.kp);
    s.linear_velocity = (s.linear_velocity +
                         h / total_mass_ *
                             (force + lin.kp * (target.position - s.position))) /
                        denom;
    s.linear_velocity = ClampAbs(s.linear_velocity, vlim, &clamped);
    s.position += h * s.linear_velocity;

    // Angular: implicit PD, then a midpoint rotation update that keeps the
    // world angular momentum fixed.
    Mat3 rot_m = s.rotation.toRotationMatrix();
    Mat3 inertia_w = rot_m * base_inertia_.asDiagonal() * rot_m.transpose();
    Mat3 lhs = inertia_w + h * (rot.kv + h * rot.kp) * Mat3::Identity();
    Vec3 rhs = inertia_w * s.angular_velocity +
               h * (torque + rot.kp * RotationError(s.rotation, target.rotation));
    Vec3 omega = lhs.ldlt().solve(rhs);
    omega = ClampAbs(omega, vlim, &clamped);
    Vec3 momentum = inertia_w * omega;
    Quat mid = (QuatExp(0.5 * h * omega) * s.rotation).normalized();
    Mat3 mid_m = mid.toRotationMatrix();
    Mat3 inertia_mid = mid_m * base_inertia_.asDiagonal() * mid_m.transpose();
    Vec3 omega_mid = inertia_mid.ldlt().solve(momentum);
    s.rotation = (QuatExp(h * omega_mid) * s.rotation).normalized();
    Mat3 new_m = s.rotation.toRotationMatrix();
    Mat3 inertia_new = new_m * base_inertia_.asDiagonal() * new_m.transpose();
    s.angular_velocity = inertia_new.ldlt().solve(momentum);

    // Articulation.
    double jd = 1.0 + h / joint_inertia_ * (rot.kv + h * rot.kp);
    s.joint_velocity =
        (s.joint_velocity +
         h / joint_inertia_ *
             (joint_torque + rot.kp * (target.joint_angle - s.joint_angle))) /
        jd;
    s.joint_velocity = ClampAbs(s.joint_velocity, vlim, &clamped);
    s.joint_angle += h * s.joint_velocity;
    if (s.joint_angle < object_.joint.lower) {
      s.joint_angle = object_.joint.lower;
      s.joint_velocity = std::max(0.0, s.joint_velocity);
    } else if (s.joint_angle > object_.joint.upper) {
      s.joint_angle = object_.joint.upper;
      s.joint_velocity = std::min(0.0, s.joint_velocity);
    }
  }

  // Hands: joint-space PD, implicit in velocity, plus contact reactions.
  for (int hi = 0; hi < kNumHands; ++hi) {
    const HandModel& hand = hands_[hi];
    HandState& hs = s.hands[hi];
    VecX tau = VecX::Zero(hand.num_joints());
    for (int k = 0; k < num_links; ++k) {
      tau += kin[hi].jacobians[k].transpose() * link_force[hi][k];
    }
    for (int j = 0; j < hand.num_joints(); ++j) {
      double inv_m = h / hand.inertia[j];
      double qd = (hs.qd[j] + inv_m * (tau[j] + hand.kp[j] * (targets[hi][j] - hs.q[j]))) /
                  (1.0 + inv_m * (hand.kd[j] + h * hand.kp[j]));
      qd = ClampAbs(qd, vlim, &clamped);
      double q = hs.q[j] + h * qd;
      if (q < hand.lower[j]) {
        q = hand.lower[j];
        qd = std::max(0.0, qd);
      } else if (q > hand.upper[j]) {
        q = hand.upper[j];
        qd = std::min(0.0, qd);
      }
      hs.q[j] = q;
      hs.qd[j] = qd;
    }
  }
  s.velocity_clamped = s.velocity_clamped || clamped;
}

std::array<VecX, kNumHands> Simulator::FingerObjectDistances(
    const SimState& s) const {
  const Pose base{s.position, s.rotation};
  std::array<Pose, kNumParts> part_pose = {
      object_.PartPose(0, base, s.joint_angle),
      object_.PartPose(1, base, s.joint_angle)};
  std::array<VecX, kNumHands> out;
  for (int hi = 0; hi < kNumHands; ++hi) {
    std::vector<Vec3> centers = LinkCenters(hands_[hi], s.hands[hi].q);
    out[hi].resize(static_cast<Eigen::Index>(centers.size()));
    for (size_t k = 0; k < centers.size(); ++k) {
      double best = std::numeric_limits<double>::infinity();
      for (int n = 0; n < kNumParts; ++n) {
        const PartModel& part = object_.parts[n];
        Vec3 local = part_pose[n].rotation.conjugate() *
                         (centers[k] - part_pose[n].translation) -
                     part.box_center;
        best = std::min(best, QueryBox(part.box_half_extents, local).signed_distance);
      }
      out[hi][static_cast<Eigen::Index>(k)] = best - hands_[hi].links[k].radius;
    }
  }
  return out;
}

}  // namespace dexc
