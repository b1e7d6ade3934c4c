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

#ifndef DEXC_GEOMETRY_H_
#define DEXC_GEOMETRY_H_

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace dexc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

// Rigid transform x -> rotation * x + translation.
struct Pose {
  Vec3 translation = Vec3::Zero();
  Quat rotation = Quat::Identity();

  Vec3 Apply(const Vec3& x) const { return rotation * x + translation; }
  Pose operator*(const Pose& other) const {
    return {Apply(other.translation), rotation * other.rotation};
  }
  Pose Inverse() const {
    Quat inv = rotation.conjugate();
    return {-(inv * translation), inv};
  }
};

// Quaternion with w >= 0 representing the same rotation.
Quat CanonicalQuat(const Quat& q);

// Returns q or -q, whichever is closer to `reference` (nonnegative dot).
Quat NearestSign(const Quat& q, const Quat& reference);

// Axis-angle of the rotation taking `from` to `to` (to * from^-1) with the
// angle in [0, pi]. Axis is unit-x for a zero angle.
void RelativeAxisAngle(const Quat& from, const Quat& to, double* angle,
                       Vec3* axis);

// Rotation vector (axis * angle) of to * from^-1 with angle in [0, pi].
Vec3 RotationError(const Quat& from, const Quat& to);

// Exponential map of a rotation vector.
Quat QuatExp(const Vec3& rotation_vector);

// Wrist orientation convention: R = Rz(z) * Ry(y) * Rx(x).
Mat3 EulerZyxToMatrix(const Vec3& xyz);
Vec3 MatrixToEulerZyx(const Mat3& r);

// World-frame rotation axes of the three Euler angles (x, y, z) at `xyz`;
// column i is the angular velocity produced by a unit rate of angle i.
Mat3 EulerZyxRateAxes(const Vec3& xyz);

// Closest point on an axis-aligned box (centered at the origin) to `p` and
// the signed distance (negative inside).
struct BoxQuery {
  Vec3 closest;
  Vec3 normal;  // outward unit normal at `closest`
  double signed_distance;
};
BoxQuery QueryBox(const Vec3& half_extents, const Vec3& p);

}  // namespace dexc

#endif  // DEXC_GEOMETRY_H_
