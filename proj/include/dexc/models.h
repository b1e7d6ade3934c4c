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

#ifndef DEXC_MODELS_H_
#define DEXC_MODELS_H_

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dexc/geometry.h"

namespace dexc {

using VecX = Eigen::VectorXd;

inline constexpr int kNumParts = 2;
inline constexpr int kNumHands = 2;
inline constexpr int kWristDofs = 6;

// One rigid part of an articulated object. Geometry is expressed in the
// part frame, which for the moving part coincides with the base frame at
// zero joint angle.
struct PartModel {
  std::string name;
  double mass = 0.0;
  Vec3 inertia = Vec3::Zero();  // diagonal, about the box center
  Vec3 box_center = Vec3::Zero();
  Vec3 box_half_extents = Vec3::Zero();
  std::vector<Vec3> surface_points;
};

struct RevoluteJoint {
  Vec3 axis = Vec3::UnitX();
  Vec3 anchor = Vec3::Zero();
  double lower = 0.0;
  double upper = 0.0;
};

// Two-part articulated object: part 0 carries the free base, part 1 hangs
// off it through a single revolute joint.
struct ObjectModel {
  std::string id;
  std::array<PartModel, kNumParts> parts;
  RevoluteJoint joint;
  Vec3 start_position = Vec3::Zero();

  // Throws InvalidArgument describing the first violated invariant.
  void Validate() const;

  double TotalMass() const;
  // Diagonal inertia used for the free base (sum of the parts).
  Vec3 BaseInertia() const;
  // Moment of inertia of part 1 about the joint axis.
  double ArticulationInertia() const;
  // World pose of a part given the base pose and the joint angle.
  Pose PartPose(int part, const Pose& base, double angle) const;
};

// Planar one-joint finger: the link point at distance d from `base` sits at
// base + d * (cos(q) * extend + sin(q) * curl) in the wrist frame.
struct FingerModel {
  int joint = 0;
  Vec3 base = Vec3::Zero();
  Vec3 extend = Vec3::UnitX();
  Vec3 curl = Vec3::UnitY();
};

// Sphere collision link. finger < 0 attaches it rigidly to the wrist at
// `offset`; otherwise it rides on that finger at `distance` from the base.
struct LinkModel {
  std::string name;
  int finger = -1;
  Vec3 offset = Vec3::Zero();
  double distance = 0.0;
  double radius = 0.0;
};

// Floating hand: joints 0..2 are wrist translation (meters, world frame),
// joints 3..5 wrist rotation (radians, R = Rz * Ry * Rx), the rest fingers.
struct HandModel {
  std::string name;
  std::string side;  // "left" or "right"
  VecX lower, upper;
  VecX kp, kd, inertia;
  std::vector<FingerModel> fingers;
  std::vector<LinkModel> links;

  int num_joints() const { return static_cast<int>(lower.size()); }
  int num_links() const { return static_cast<int>(links.size()); }
  void Validate() const;
  // Reflection through the xz-plane of the wrist frame.
  HandModel Mirrored(const std::string& side) const;
};

struct HandKinematics {
  std::vector<Vec3> centers;
  std::vector<Eigen::Matrix<double, 3, Eigen::Dynamic>> jacobians;
};

HandKinematics ForwardKinematics(const HandModel& hand, const VecX& q,
                                 bool with_jacobians = false);
std::vector<Vec3> LinkCenters(const HandModel& hand, const VecX& q);

// Sphere-surface sample points of every link (16 per sphere) plus the link
// centers, used as the hand point cloud for contact approximation.
std::vector<Vec3> HandPointCloud(const HandModel& hand,
                                 const std::vector<Vec3>& centers);

std::vector<Vec3> SampleBoxSurface(const Vec3& center, const Vec3& half,
                                   double spacing);

// Desk-scale assets used by the scripted demonstrations.
ObjectModel ToyBoxObject();
HandModel ToyHand();  // left hand; the right hand is ToyHand().Mirrored()
std::array<HandModel, kNumHands> ToyHandPair();
std::array<HandModel, kNumHands> HandPair(const HandModel& left);

ObjectModel LoadObjectModel(const std::filesystem::path& path);
void SaveObjectModel(const ObjectModel& object,
                     const std::filesystem::path& path);
HandModel LoadHandModel(const std::filesystem::path& path);
void SaveHandModel(const HandModel& hand, const std::filesystem::path& path);

}  // namespace dexc

#endif  // DEXC_MODELS_H_
