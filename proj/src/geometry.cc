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

#include "dexc/geometry.h"

#include <algorithm>
#include <cmath>

namespace dexc {

Quat CanonicalQuat(const Quat& q) {
  if (q.w() < 0.0) return Quat(-q.w(), -q.x(), -q.y(), -q.z());
  return q;
}

Quat NearestSign(const Quat& q, const Quat& reference) {
  if (q.dot(reference) < 0.0) return Quat(-q.w(), -q.x(), -q.y(), -q.z());
  return q;
}

void RelativeAxisAngle(const Quat& from, const Quat& to, double* angle,
                       Vec3* axis) {
  Quat d = CanonicalQuat(to * from.conjugate());
  Vec3 v = d.vec();
  double s = v.norm();
  if (s < 1e-15) {
    *angle = 0.0;
    *axis = Vec3::UnitX();
    return;
  }
  *angle = 2.0 * std::atan2(s, std::clamp(d.w(), -1.0, 1.0));
  *axis = v / s;
}

Vec3 RotationError(const Quat& from, const Quat& to) {
  double angle;
  Vec3 axis;
  RelativeAxisAngle(from, to, &angle, &axis);
  return angle * axis;
}

Quat QuatExp(const Vec3& rotation_vector) {
  double angle = rotation_vector.norm();
  if (angle < 1e-15) {
    // second-order accurate near zero
    Quat q(1.0, 0.5 * rotation_vector.x(), 0.5 * rotation_vector.y(),
           0.5 * rotation_vector.z());
    return q.normalized();
  }
  return Quat(Eigen::AngleAxisd(angle, rotation_vector / angle));
}

Mat3 EulerZyxToMatrix(const Vec3& xyz) {
  return (Eigen::AngleAxisd(xyz.z(), Vec3::UnitZ()) *
          Eigen::AngleAxisd(xyz.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(xyz.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

Vec3 MatrixToEulerZyx(const Mat3& r) {
  double y = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  double x = std::atan2(r(2, 1), r(2, 2));
  double z = std::atan2(r(1, 0), r(0, 0));
  return {x, y, z};
}

Mat3 EulerZyxRateAxes(const Vec3& xyz) {
  Mat3 rz = Eigen::AngleAxisd(xyz.z(), Vec3::UnitZ()).toRotationMatrix();
  Mat3 ry = Eigen::AngleAxisd(xyz.y(), Vec3::UnitY()).toRotationMatrix();
  Mat3 axes;
  axes.col(0) = rz * ry * Vec3::UnitX();
  axes.col(1) = rz * Vec3::UnitY();
  axes.col(2) = Vec3::UnitZ();
  return axes;
}

BoxQuery QueryBox(const Vec3& half_extents, const Vec3& p) {
  BoxQuery out;
  Vec3 clamped = p.cwiseMax(-half_extents).cwiseMin(half_extents);
  Vec3 d = p - clamped;
  double outside = d.norm();
  if (outside > 0.0) {
    out.closest = clamped;
    out.normal = d / outside;
    out.signed_distance = outside;
    return out;
  }
  // inside: nearest face
  Vec3 gap = half_extents - p.cwiseAbs();
  int axis = 0;
  gap.minCoeff(&axis);
  double sign = p[axis] >= 0.0 ? 1.0 : -1.0;
  out.normal = Vec3::Zero();
  out.normal[axis] = sign;
  out.closest = p;
  out.closest[axis] = sign * half_extents[axis];
  out.signed_distance = -gap[axis];
  return out;
}

}  // namespace dexc
