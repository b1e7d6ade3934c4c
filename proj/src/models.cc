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

#include "dexc/models.h"

#include <cmath>
#include <numbers>
#include <set>
#include <tuple>

#include "dexc/error.h"
#include "json_util.h"

namespace dexc {
namespace {

using internal::Json;

void CheckPositive(const Vec3& v, const std::string& what) {
  if ((v.array() <= 0.0).any()) {
    throw InvalidArgument(what + " must be positive");
  }
}

// 16 roughly uniform unit directions (Fibonacci lattice).
const std::vector<Vec3>& SphereDirections() {
  static const std::vector<Vec3> dirs = [] {
    constexpr int kCount = 16;
    std::vector<Vec3> out;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < kCount; ++i) {
      double z = 1.0 - 2.0 * (i + 0.5) / kCount;
      double r = std::sqrt(1.0 - z * z);
      double phi = golden * i;
      out.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
    }
    return out;
  }();
  return dirs;
}

Vec3 Mirror(const Vec3& v) { return {v.x(), -v.y(), v.z()}; }

}  // namespace

void ObjectModel::Validate() const {
  for (int n = 0; n < kNumParts; ++n) {
    const PartModel& part = parts[n];
    const std::string name = "part " + std::to_string(n);
    if (!(part.mass > 0.0)) throw InvalidArgument(name + ": mass must be > 0");
    CheckPositive(part.inertia, name + ": inertia");
    CheckPositive(part.box_half_extents, name + ": box half extents");
    if (part.surface_points.size() < 8) {
      throw InvalidArgument(name + ": needs at least 8 surface points");
    }
  }
  if (std::abs(joint.axis.norm() - 1.0) > 1e-9) {
    throw InvalidArgument("joint axis must be a unit vector");
  }
  if (!(joint.lower < joint.upper)) {
    throw InvalidArgument("joint lower limit must be below upper limit");
  }
}

double ObjectModel::TotalMass() const {
  return parts[0].mass + parts[1].mass;
}

Vec3 ObjectModel::BaseInertia() const {
  return parts[0].inertia + parts[1].inertia;
}

double ObjectModel::ArticulationInertia() const {
  const PartModel& lid = parts[1];
  const Vec3& a = joint.axis;
  double about_center = a.cwiseAbs2().dot(lid.inertia);
  Vec3 r = lid.box_center - joint.anchor;
  Vec3 perp = r - r.dot(a) * a;
  return about_center + lid.mass * perp.squaredNorm();
}

Pose ObjectModel::PartPose(int part, const Pose& base, double angle) const {
  if (part == 0) return base;
  Quat rot(Eigen::AngleAxisd(angle, joint.axis));
  Pose hinge{joint.anchor - rot * joint.anchor, rot};
  return base * hinge;
}

void HandModel::Validate() const {
  const int j = num_joints();
  if (j <= kWristDofs) throw InvalidArgument(name + ": needs finger joints");
  if (upper.size() != j || kp.size() != j || kd.size() != j ||
      inertia.size() != j) {
    throw InvalidArgument(name + ": per-joint arrays differ in length");
  }
  if ((lower.array() >= upper.array()).any()) {
    throw InvalidArgument(name + ": joint limits require lower < upper");
  }
  if ((inertia.array() <= 0.0).any() || (kp.array() < 0.0).any() ||
      (kd.array() < 0.0).any()) {
    throw InvalidArgument(name + ": gains and inertia must be nonnegative");
  }
  if (num_links() < 2) throw InvalidArgument(name + ": needs K >= 2 links");
  for (const FingerModel& f : fingers) {
    if (f.joint < kWristDofs || f.joint >= j) {
      throw InvalidArgument(name + ": finger joint index out of range");
    }
  }
  for (const LinkModel& l : links) {
    if (l.finger >= static_cast<int>(fingers.size()) || !(l.radius > 0.0)) {
      throw InvalidArgument(name + ": bad link " + l.name);
    }
  }
}

HandModel HandModel::Mirrored(const std::string& new_side) const {
  HandModel out = *this;
  out.side = new_side;
  out.name = name + "_" + new_side;
  for (FingerModel& f : out.fingers) {
    f.base = Mirror(f.base);
    f.extend = Mirror(f.extend);
    f.curl = Mirror(f.curl);
  }
  for (LinkModel& l : out.links) l.offset = Mirror(l.offset);
  return out;
}

HandKinematics ForwardKinematics(const HandModel& hand, const VecX& q,
                                 bool with_jacobians) {
  const int num_joints = hand.num_joints();
  Vec3 wrist = q.head<3>();
  Vec3 euler = q.segment<3>(3);
  Mat3 rot = EulerZyxToMatrix(euler);
  Mat3 rate_axes;
  if (with_jacobians) rate_axes = EulerZyxRateAxes(euler);

  HandKinematics out;
  out.centers.reserve(hand.links.size());
  for (const LinkModel& link : hand.links) {
    Vec3 local;
    Vec3 finger_rate = Vec3::Zero();
    int finger_joint = -1;
    if (link.finger < 0) {
      local = link.offset;
    } else {
      const FingerModel& f = hand.fingers[link.finger];
      double a = q[f.joint];
      local = f.base + link.distance *
                           (std::cos(a) * f.extend + std::sin(a) * f.curl);
      finger_rate =
          link.distance * (-std::sin(a) * f.extend + std::cos(a) * f.curl);
      finger_joint = f.joint;
    }
    Vec3 arm = rot * local;
    out.centers.push_back(wrist + arm);
    if (with_jacobians) {
      Eigen::Matrix<double, 3, Eigen::Dynamic> jac(3, num_joints);
      jac.setZero();
      jac.block<3, 3>(0, 0).setIdentity();
      for (int i = 0; i < 3; ++i) jac.col(3 + i) = rate_axes.col(i).cross(arm);
      if (finger_joint >= 0) jac.col(finger_joint) = rot * finger_rate;
      out.jacobians.push_back(std::move(jac));
    }
  }
  return out;
}

std::vector<Vec3> LinkCenters(const HandModel& hand, const VecX& q) {
  return ForwardKinematics(hand, q, false).centers;
}

std::vector<Vec3> HandPointCloud(const HandModel& hand,
                                 const std::vector<Vec3>& centers) {
  std::vector<Vec3> cloud;
  cloud.reserve(centers.size() * 17);
  for (size_t k = 0; k < centers.size(); ++k) {
    cloud.push_back(centers[k]);
    for (const Vec3& d : SphereDirections()) {
      cloud.push_back(centers[k] + hand.links[k].radius * d);
    }
  }
  return cloud;
}

std::vector<Vec3> SampleBoxSurface(const Vec3& center, const Vec3& half,
                                   double spacing) {
  std::vector<Vec3> out;
  std::set<std::tuple<long, long, long>> seen;
  auto add = [&](const Vec3& p) {
    auto key = std::make_tuple(std::lround(p.x() * 1e7),
                               std::lround(p.y() * 1e7),
                               std::lround(p.z() * 1e7));
    if (seen.insert(key).second) out.push_back(center + p);
  };
  Eigen::Vector3i counts;
  for (int i = 0; i < 3; ++i) {
    counts[i] = std::max(1, static_cast<int>(std::ceil(2.0 * half[i] / spacing)));
  }
  for (int axis = 0; axis < 3; ++axis) {
    int u = (axis + 1) % 3;
    int v = (axis + 2) % 3;
    for (double sign : {-1.0, 1.0}) {
      for (int a = 0; a <= counts[u]; ++a) {
        for (int b = 0; b <= counts[v]; ++b) {
          Vec3 p;
          p[axis] = sign * half[axis];
          p[u] = -half[u] + 2.0 * half[u] * a / counts[u];
          p[v] = -half[v] + 2.0 * half[v] * b / counts[v];
          add(p);
        }
      }
    }
  }
  return out;
}

ObjectModel ToyBoxObject() {
  ObjectModel obj;
  obj.id = "toy_box";
  PartModel& base = obj.parts[0];
  base.name = "base";
  base.mass = 0.5;
  base.box_center = Vec3(0.0, 0.0, 0.0);
  base.box_half_extents = Vec3(0.06, 0.05, 0.04);
  PartModel& lid = obj.parts[1];
  lid.name = "lid";
  lid.mass = 0.1;
  lid.box_center = Vec3(0.0, 0.015, 0.046);
  lid.box_half_extents = Vec3(0.06, 0.065, 0.006);
  for (PartModel* part : {&base, &lid}) {
    Vec3 full = 2.0 * part->box_half_extents;
    Vec3 sq = full.cwiseAbs2();
    part->inertia = part->mass / 12.0 *
                    Vec3(sq.y() + sq.z(), sq.x() + sq.z(), sq.x() + sq.y());
    part->surface_points =
        SampleBoxSurface(part->box_center, part->box_half_extents, 0.01);
  }
  obj.joint.axis = Vec3::UnitX();
  obj.joint.anchor = Vec3(0.0, -0.05, 0.04);
  obj.joint.lower = 0.0;
  obj.joint.upper = 1.3;
  obj.start_position = Vec3(0.0, 0.0, 0.04);
  return obj;
}

HandModel ToyHand() {
  HandModel hand;
  hand.name = "toy_gripper";
  hand.side = "left";
  constexpr double kPi = std::numbers::pi;
  hand.lower.resize(8);
  hand.upper.resize(8);
  hand.lower << -1.5, -1.5, -1.0, -kPi, -kPi, -kPi, -0.2, -0.2;
  hand.upper << 1.5, 1.5, 1.5, kPi, kPi, kPi, 1.8, 1.8;
  hand.kp.resize(8);
  hand.inertia.resize(8);
  hand.kp << 600, 600, 600, 20, 20, 20, 2, 2;
  hand.inertia << 1.0, 1.0, 1.0, 0.02, 0.02, 0.02, 5e-4, 5e-4;
  hand.kd = 2.0 * (hand.kp.array() * hand.inertia.array()).sqrt();
  hand.fingers = {
      {6, Vec3(0.04, 0.01, 0.0), Vec3::UnitX(), Vec3::UnitY()},
      {7, Vec3(-0.04, 0.01, 0.0), -Vec3::UnitX(), Vec3::UnitY()},
  };
  hand.links = {
      {"palm", -1, Vec3::Zero(), 0.0, 0.02},
      {"front_tip", 0, Vec3::Zero(), 0.05, 0.01},
      {"back_tip", 1, Vec3::Zero(), 0.05, 0.01},
  };
  return hand;
}

std::array<HandModel, kNumHands> HandPair(const HandModel& left) {
  HandModel l = left;
  l.side = "left";
  return {l, left.Mirrored("right")};
}

std::array<HandModel, kNumHands> ToyHandPair() { return HandPair(ToyHand()); }

// ---------------------------------------------------------------------------
// JSON assets

ObjectModel LoadObjectModel(const std::filesystem::path& path) {
  using internal::Require;
  using internal::RequireNumber;
  Json j = internal::ReadJsonFile(path);
  const std::string where = path.string();
  ObjectModel obj;
  obj.id = Require(j, "id", where).get<std::string>();
  const Json& parts = Require(j, "parts", where);
  if (!parts.is_array() || parts.size() != kNumParts) {
    throw SchemaError(where + ": 'parts' must hold exactly 2 entries");
  }
  for (int n = 0; n < kNumParts; ++n) {
    const Json& p = parts[n];
    std::string pw = where + ": parts[" + std::to_string(n) + "]";
    PartModel& part = obj.parts[n];
    part.name = Require(p, "name", pw).get<std::string>();
    part.mass = RequireNumber(p, "mass", pw);
    part.inertia = internal::Vec3FromJson(Require(p, "inertia", pw), pw);
    part.box_center = internal::Vec3FromJson(Require(p, "box_center", pw), pw);
    part.box_half_extents =
        internal::Vec3FromJson(Require(p, "box_half_extents", pw), pw);
    part.surface_points =
        internal::PointsFromJson(Require(p, "surface_points", pw), pw);
  }
  const Json& jt = Require(j, "joint", where);
  obj.joint.axis = internal::Vec3FromJson(Require(jt, "axis", where), where);
  obj.joint.anchor = internal::Vec3FromJson(Require(jt, "anchor", where), where);
  obj.joint.lower = RequireNumber(jt, "lower", where);
  obj.joint.upper = RequireNumber(jt, "upper", where);
  obj.start_position =
      internal::Vec3FromJson(Require(j, "start_position", where), where);
  obj.Validate();
  return obj;
}

void SaveObjectModel(const ObjectModel& obj,
                     const std::filesystem::path& path) {
  Json j;
  j["id"] = obj.id;
  j["parts"] = Json::array();
  for (const PartModel& part : obj.parts) {
    j["parts"].push_back({{"name", part.name},
                          {"mass", part.mass},
                          {"inertia", internal::ToJson(part.inertia)},
                          {"box_center", internal::ToJson(part.box_center)},
                          {"box_half_extents",
                           internal::ToJson(part.box_half_extents)},
                          {"surface_points",
                           internal::ToJson(part.surface_points)}});
  }
  j["joint"] = {{"axis", internal::ToJson(obj.joint.axis)},
                {"anchor", internal::ToJson(obj.joint.anchor)},
                {"lower", obj.joint.lower},
                {"upper", obj.joint.upper}};
  j["start_position"] = internal::ToJson(obj.start_position);
  internal::WriteJsonFile(j, path);
}

HandModel LoadHandModel(const std::filesystem::path& path) {
  using internal::Require;
  using internal::RequireNumber;
  Json j = internal::ReadJsonFile(path);
  const std::string where = path.string();
  HandModel hand;
  hand.name = Require(j, "name", where).get<std::string>();
  hand.side = j.value("side", std::string("left"));
  const Json& joints = Require(j, "joints", where);
  hand.lower = internal::VecXFromJson(Require(joints, "lower", where), where);
  hand.upper = internal::VecXFromJson(Require(joints, "upper", where), where);
  hand.kp = internal::VecXFromJson(Require(joints, "kp", where), where);
  hand.kd = internal::VecXFromJson(Require(joints, "kd", where), where);
  hand.inertia =
      internal::VecXFromJson(Require(joints, "inertia", where), where);
  for (const Json& f : Require(j, "fingers", where)) {
    FingerModel finger;
    finger.joint = static_cast<int>(RequireNumber(f, "joint", where));
    finger.base = internal::Vec3FromJson(Require(f, "base", where), where);
    finger.extend = internal::Vec3FromJson(Require(f, "extend", where), where);
    finger.curl = internal::Vec3FromJson(Require(f, "curl", where), where);
    hand.fingers.push_back(finger);
  }
  for (const Json& l : Require(j, "links", where)) {
    LinkModel link;
    link.name = Require(l, "name", where).get<std::string>();
    link.finger = static_cast<int>(RequireNumber(l, "finger", where));
    link.offset = internal::Vec3FromJson(Require(l, "offset", where), where);
    link.distance = RequireNumber(l, "distance", where);
    link.radius = RequireNumber(l, "radius", where);
    hand.links.push_back(link);
  }
  hand.Validate();
  return hand;
}

void SaveHandModel(const HandModel& hand, const std::filesystem::path& path) {
  Json j;
  j["name"] = hand.name;
  j["side"] = hand.side;
  j["joints"] = {{"lower", internal::ToJson(hand.lower)},
                 {"upper", internal::ToJson(hand.upper)},
                 {"kp", internal::ToJson(hand.kp)},
                 {"kd", internal::ToJson(hand.kd)},
                 {"inertia", internal::ToJson(hand.inertia)}};
  j["fingers"] = Json::array();
  for (const FingerModel& f : hand.fingers) {
    j["fingers"].push_back({{"joint", f.joint},
                            {"base", internal::ToJson(f.base)},
                            {"extend", internal::ToJson(f.extend)},
                            {"curl", internal::ToJson(f.curl)}});
  }
  j["links"] = Json::array();
  for (const LinkModel& l : hand.links) {
    j["links"].push_back({{"name", l.name},
                          {"finger", l.finger},
                          {"offset", internal::ToJson(l.offset)},
                          {"distance", l.distance},
                          {"radius", l.radius}});
  }
  internal::WriteJsonFile(j, path, 2);
}

}  // namespace dexc
