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

#include "dexc/demo.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dexc/error.h"
#include "json_util.h"

namespace dexc {
namespace {

using internal::Json;

constexpr double kQuatTolerance = 1e-6;
constexpr double kLiftHeight = 0.12;
constexpr double kPalmSqueeze = 0.001;   // reference palm penetration
constexpr double kFingerSqueeze = 0.02;  // reference finger over-curl (rad)
constexpr double kLidPush = 0.002;       // palm penetration into the lid
constexpr double kFingerOpen = 0.0;

double Smoothstep(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

// Eased progress of a phase spanning [a, b] in normalized time.
double Phase(double u, double a, double b) { return Smoothstep((u - a) / (b - a)); }

struct ScriptTimeline {
  double lift_begin = 0.0, lift_end = 0.0;
  double turn_begin = 0.0, turn_end = 0.0, turn_angle = 0.0;
  double release_begin = 2.0, release_end = 3.0;
  double open_begin = 2.0, open_end = 3.0, open_angle = 0.0;
  double close_begin = 2.0, close_end = 3.0;
  double regrasp_begin = 2.0, regrasp_end = 3.0;
};

ScriptTimeline TimelineFor(DemoScript script) {
  ScriptTimeline s;
  switch (script) {
    case DemoScript::kLift:
      s.lift_begin = 0.1;
      s.lift_end = 0.5;
      break;
    case DemoScript::kLiftOpenClose:
      s.lift_begin = 0.05;
      s.lift_end = 0.25;
      s.release_begin = 0.28;
      s.release_end = 0.35;
      s.open_begin = 0.35;
      s.open_end = 0.55;
      s.open_angle = 0.8;
      s.close_begin = 0.58;
      s.close_end = 0.78;
      s.regrasp_begin = 0.80;
      s.regrasp_end = 0.87;
      break;
    case DemoScript::kLiftReorientOpen:
      s.lift_begin = 0.05;
      s.lift_end = 0.25;
      s.turn_begin = 0.27;
      s.turn_end = 0.45;
      s.turn_angle = 0.5;
      s.release_begin = 0.47;
      s.release_end = 0.54;
      s.open_begin = 0.55;
      s.open_end = 0.8;
      s.open_angle = 0.6;
      break;
  }
  return s;
}

double LidAngle(const ScriptTimeline& s, double u) {
  double opening = s.open_angle * Phase(u, s.open_begin, s.open_end);
  double closing = s.open_angle * Phase(u, s.close_begin, s.close_end);
  return opening - closing;
}

// Signed distance between a link sphere and the base box, object frame.
double SphereToBase(const ObjectModel& object, const Vec3& center,
                    double radius) {
  const PartModel& base = object.parts[0];
  return QueryBox(base.box_half_extents, center - base.box_center)
             .signed_distance -
         radius;
}

// Grasp configuration in the object frame (identity wrist rotation).
struct GraspPose {
  Vec3 wrist;
  VecX fingers;  // indexed like hand.fingers
};

GraspPose ComputeGrasp(const ObjectModel& object, const HandModel& hand) {
  const PartModel& base = object.parts[0];
  double side = hand.side == "right" ? 1.0 : -1.0;
  const LinkModel* palm = nullptr;
  for (const LinkModel& l : hand.links) {
    if (l.finger < 0) {
      palm = &l;
      break;
    }
  }
  double palm_radius = palm ? palm->radius : 0.0;
  GraspPose g;
  g.wrist = base.box_center +
            Vec3(0.0,
                 side * (base.box_half_extents.y() + palm_radius - kPalmSqueeze),
                 0.0);
  g.fingers = VecX::Zero(static_cast<Eigen::Index>(hand.fingers.size()));
  for (size_t f = 0; f < hand.fingers.size(); ++f) {
    const FingerModel& finger = hand.fingers[f];
    // deepest link on this finger decides contact
    const LinkModel* tip = nullptr;
    for (const LinkModel& l : hand.links) {
      if (l.finger == static_cast<int>(f) &&
          (!tip || l.distance > tip->distance)) {
        tip = &l;
      }
    }
    double lo = hand.lower[finger.joint];
    double hi = hand.upper[finger.joint];
    auto dist = [&](double q) {
      Vec3 c = g.wrist + finger.base +
               tip->distance * (std::cos(q) * finger.extend +
                                std::sin(q) * finger.curl);
      return SphereToBase(object, c, tip->radius);
    };
    double touch = hi;
    if (tip && dist(lo) > 0.0 && dist(hi) < 0.0) {
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        if (dist(mid) > 0.0) lo = mid; else hi = mid;
      }
      touch = 0.5 * (lo + hi);
    }
    g.fingers[static_cast<Eigen::Index>(f)] =
        std::min(touch + kFingerSqueeze, hand.upper[finger.joint]);
  }
  return g;
}

VecX HandJoints(const HandModel& hand, const ObjectState& obj,
                const Vec3& wrist_rel, const VecX& fingers) {
  VecX q = VecX::Zero(hand.num_joints());
  q.head<3>() = obj.position + obj.rotation * wrist_rel;
  q.segment<3>(3) = MatrixToEulerZyx(obj.rotation.toRotationMatrix());
  for (size_t f = 0; f < hand.fingers.size(); ++f) {
    q[hand.fingers[f].joint] = fingers[static_cast<Eigen::Index>(f)];
  }
  return q;
}

}  // namespace

int DemoClip::num_joints() const {
  if (hands[0].joints.empty()) return 0;
  return static_cast<int>(hands[0].joints.front().size());
}

int DemoClip::num_links() const {
  if (hands[0].keypoints.empty()) return 0;
  return static_cast<int>(hands[0].keypoints.front().size());
}

DemoScript ParseDemoScript(std::string_view name) {
  if (name == "lift") return DemoScript::kLift;
  if (name == "lift-open-close") return DemoScript::kLiftOpenClose;
  if (name == "lift-reorient-open") return DemoScript::kLiftReorientOpen;
  throw InvalidArgument("unknown script '" + std::string(name) +
                        "' (expected lift, lift-open-close, lift-reorient-open)");
}

std::string_view DemoScriptName(DemoScript script) {
  switch (script) {
    case DemoScript::kLift: return "lift";
    case DemoScript::kLiftOpenClose: return "lift-open-close";
    case DemoScript::kLiftReorientOpen: return "lift-reorient-open";
  }
  return "unknown";
}

DemoClip GenerateDemo(DemoScript script, const ObjectModel& object,
                      const std::array<HandModel, kNumHands>& hands,
                      int num_frames, double dt) {
  if (num_frames < 2) throw InvalidArgument("sequence too short: T must be >= 2");
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  object.Validate();
  for (const HandModel& h : hands) h.Validate();

  const ScriptTimeline s = TimelineFor(script);
  if (s.open_angle > object.joint.upper || 0.0 < object.joint.lower) {
    throw InvalidArgument("script '" + std::string(DemoScriptName(script)) +
                          "' violates the object's joint limits");
  }

  DemoClip clip;
  clip.object_id = object.id;
  clip.dt = dt;
  clip.metadata.name = std::string(DemoScriptName(script)) + "-" +
                       std::to_string(num_frames);
  clip.metadata.script = std::string(DemoScriptName(script));
  clip.metadata.start_frame = 0;
  clip.metadata.end_frame = num_frames;
  clip.metadata.joint_lower = object.joint.lower;
  clip.metadata.joint_upper = object.joint.upper;

  std::array<GraspPose, kNumHands> grasps = {ComputeGrasp(object, hands[0]),
                                             ComputeGrasp(object, hands[1])};
  // Right-hand lid pose: palm under the overhang, touching the lid.
  const PartModel& lid = object.parts[1];
  const PartModel& base = object.parts[0];
  double palm_radius = hands[1].links[0].radius;
  Vec3 lid_contact(0.0, base.box_center.y() + base.box_half_extents.y() +
                            palm_radius,
                   lid.box_center.z() - lid.box_half_extents.z() - palm_radius +
                       kLidPush);
  VecX open_fingers = VecX::Constant(grasps[1].fingers.size(), kFingerOpen);

  for (int t = 0; t < num_frames; ++t) {
    double u = static_cast<double>(t) / (num_frames - 1);
    ObjectState obj;
    obj.position = object.start_position +
                   Vec3(0.0, 0.0, kLiftHeight * Phase(u, s.lift_begin, s.lift_end));
    double yaw = s.turn_angle * (s.turn_angle != 0.0
                                     ? Phase(u, s.turn_begin, s.turn_end)
                                     : 0.0);
    obj.rotation = Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ()));
    obj.rotation = CanonicalQuat(obj.rotation);
    obj.joint_angle = LidAngle(s, u);
    clip.object_targets.push_back(obj);

    // left hand: grasp throughout
    clip.hands[0].joints.push_back(
        HandJoints(hands[0], obj, grasps[0].wrist, grasps[0].fingers));

    // right hand: grasp, release to the lid pose, follow the lid, regrasp
    double away = Phase(u, s.release_begin, s.release_end) -
                  Phase(u, s.regrasp_begin, s.regrasp_end);
    Quat hinge(Eigen::AngleAxisd(obj.joint_angle, object.joint.axis));
    Vec3 lid_pose = object.joint.anchor + hinge * (lid_contact - object.joint.anchor);
    Vec3 wrist = (1.0 - away) * grasps[1].wrist + away * lid_pose;
    VecX fingers = (1.0 - away) * grasps[1].fingers + away * open_fingers;
    clip.hands[1].joints.push_back(HandJoints(hands[1], obj, wrist, fingers));

    for (int h = 0; h < kNumHands; ++h) {
      clip.hands[h].keypoints.push_back(
          LinkCenters(hands[h], clip.hands[h].joints.back()));
    }
  }
  return clip;
}

std::vector<DemoViolation> ValidateDemo(const DemoClip& clip) {
  std::vector<DemoViolation> out;
  const int t_count = clip.num_frames();
  if (t_count < 2) out.push_back({"object_targets", -1, "sequence too short (T >= 2)"});
  if (!(clip.dt > 0.0)) out.push_back({"dt", -1, "dt must be positive"});
  if (clip.part_count != kNumParts) out.push_back({"N", -1, "part count must be 2"});

  for (int t = 0; t < t_count; ++t) {
    const ObjectState& s = clip.object_targets[t];
    if (std::abs(s.rotation.norm() - 1.0) > kQuatTolerance) {
      out.push_back({"object_targets.rotation", t, "quaternion must be unit"});
    }
    if (t > 0 && s.rotation.coeffs().dot(
                     clip.object_targets[t - 1].rotation.coeffs()) < 0.0) {
      out.push_back({"object_targets.rotation", t,
                     "quaternion continuity (dot with previous frame < 0)"});
    }
    if (s.joint_angle < clip.metadata.joint_lower ||
        s.joint_angle > clip.metadata.joint_upper) {
      out.push_back({"object_targets.joint_angle", t, "outside joint limits"});
    }
    if (!s.position.allFinite() || !std::isfinite(s.joint_angle)) {
      out.push_back({"object_targets", t, "non-finite value"});
    }
  }

  const int j = clip.num_joints();
  const int k = clip.num_links();
  for (int h = 0; h < kNumHands; ++h) {
    const std::string side = h == 0 ? "hands.left" : "hands.right";
    const HandSequence& seq = clip.hands[h];
    if (static_cast<int>(seq.joints.size()) != t_count) {
      out.push_back({side + ".joints", -1, "length differs from T"});
    }
    if (static_cast<int>(seq.keypoints.size()) != t_count) {
      out.push_back({side + ".keypoints", -1, "length differs from T"});
    }
    for (size_t t = 0; t < seq.joints.size(); ++t) {
      if (seq.joints[t].size() != j || !seq.joints[t].allFinite()) {
        out.push_back({side + ".joints", static_cast<int>(t), "ragged or non-finite row"});
      }
    }
    for (size_t t = 0; t < seq.keypoints.size(); ++t) {
      if (static_cast<int>(seq.keypoints[t].size()) != k) {
        out.push_back({side + ".keypoints", static_cast<int>(t), "ragged row"});
      }
    }
  }
  return out;
}

std::string FormatViolation(const DemoViolation& v) {
  std::ostringstream os;
  os << v.field;
  if (v.frame >= 0) os << " @frame " << v.frame;
  os << ": " << v.rule;
  return os.str();
}

void CanonicalizeQuaternions(DemoClip* clip) {
  auto& targets = clip->object_targets;
  for (size_t t = 0; t < targets.size(); ++t) {
    targets[t].rotation = t == 0 ? CanonicalQuat(targets[t].rotation)
                                 : NearestSign(targets[t].rotation,
                                               targets[t - 1].rotation);
  }
}

// ---------------------------------------------------------------------------

void SaveDemo(const DemoClip& clip, const std::filesystem::path& path) {
  Json j;
  j["schema_version"] = kDemoSchemaVersion;
  j["object_id"] = clip.object_id;
  j["dt"] = clip.dt;
  j["T"] = clip.num_frames();
  j["J"] = clip.num_joints();
  j["K"] = clip.num_links();
  j["N"] = clip.part_count;
  Json targets = Json::array();
  for (const ObjectState& s : clip.object_targets) {
    targets.push_back({s.position.x(), s.position.y(), s.position.z(),
                       s.rotation.w(), s.rotation.x(), s.rotation.y(),
                       s.rotation.z(), s.joint_angle});
  }
  j["object_targets"] = std::move(targets);
  const char* names[kNumHands] = {"left", "right"};
  for (int h = 0; h < kNumHands; ++h) {
    Json joints = Json::array();
    for (const VecX& q : clip.hands[h].joints) joints.push_back(internal::ToJson(q));
    Json keypoints = Json::array();
    for (const auto& frame : clip.hands[h].keypoints) {
      keypoints.push_back(internal::ToJson(frame));
    }
    j["hands"][names[h]] = {{"joints", std::move(joints)},
                            {"keypoints", std::move(keypoints)}};
  }
  j["metadata"] = {{"name", clip.metadata.name},
                   {"script", clip.metadata.script},
                   {"start_frame", clip.metadata.start_frame},
                   {"end_frame", clip.metadata.end_frame},
                   {"joint_lower", clip.metadata.joint_lower},
                   {"joint_upper", clip.metadata.joint_upper}};
  internal::WriteJsonFile(j, path);
}

DemoClip LoadDemo(const std::filesystem::path& path) {
  using internal::Require;
  using internal::RequireNumber;
  Json j = internal::ReadJsonFile(path);
  const std::string where = path.string();
  int version = static_cast<int>(RequireNumber(j, "schema_version", where));
  if (version != kDemoSchemaVersion) {
    throw SchemaError(where + ": unsupported schema_version " + std::to_string(version));
  }
  DemoClip clip;
  clip.object_id = Require(j, "object_id", where).get<std::string>();
  clip.dt = RequireNumber(j, "dt", where);
  const int t_count = static_cast<int>(RequireNumber(j, "T", where));
  const int j_count = static_cast<int>(RequireNumber(j, "J", where));
  const int k_count = static_cast<int>(RequireNumber(j, "K", where));
  clip.part_count = static_cast<int>(RequireNumber(j, "N", where));
  if (t_count < 2) throw SchemaError(where + ": sequence too short (T=" + std::to_string(t_count) + ")");
  if (clip.part_count != kNumParts) throw SchemaError(where + ": N must be 2");
  if (!(clip.dt > 0.0)) throw SchemaError(where + ": dt must be positive");

  const Json& targets = Require(j, "object_targets", where);
  if (!targets.is_array() || static_cast<int>(targets.size()) != t_count) {
    throw SchemaError(where + ": object_targets must have T rows");
  }
  for (int t = 0; t < t_count; ++t) {
    const Json& row = targets[t];
    if (!row.is_array() || row.size() != 8) {
      throw SchemaError(where + ": object_targets[" + std::to_string(t) + "] must have 8 entries");
    }
    ObjectState s;
    s.position = Vec3(row[0].get<double>(), row[1].get<double>(), row[2].get<double>());
    s.rotation = Quat(row[3].get<double>(), row[4].get<double>(),
                      row[5].get<double>(), row[6].get<double>());
    s.joint_angle = row[7].get<double>();
    if (std::abs(s.rotation.norm() - 1.0) > kQuatTolerance) {
      std::ostringstream os;
      os << where << ": non-unit quaternion at frame " << t << " (norm "
         << s.rotation.norm() << ")";
      throw SchemaError(os.str());
    }
    clip.object_targets.push_back(s);
  }

  const Json& hands = Require(j, "hands", where);
  const char* names[kNumHands] = {"left", "right"};
  for (int h = 0; h < kNumHands; ++h) {
    const Json& hj = Require(hands, names[h], where + ": hands");
    std::string hw = where + ": hands." + names[h];
    const Json& joints = Require(hj, "joints", hw);
    const Json& keypoints = Require(hj, "keypoints", hw);
    if (static_cast<int>(joints.size()) != t_count ||
        static_cast<int>(keypoints.size()) != t_count) {
      throw SchemaError(hw + ": ragged arrays (expected T rows)");
    }
    for (int t = 0; t < t_count; ++t) {
      VecX q = internal::VecXFromJson(joints[t], hw + ".joints");
      if (q.size() != j_count) {
        throw SchemaError(hw + ".joints: ragged row at frame " + std::to_string(t));
      }
      clip.hands[h].joints.push_back(std::move(q));
      auto pts = internal::PointsFromJson(keypoints[t], hw + ".keypoints");
      if (static_cast<int>(pts.size()) != k_count) {
        throw SchemaError(hw + ".keypoints: ragged row at frame " + std::to_string(t));
      }
      clip.hands[h].keypoints.push_back(std::move(pts));
    }
  }
  const Json& meta = Require(j, "metadata", where);
  clip.metadata.name = meta.value("name", std::string());
  clip.metadata.script = meta.value("script", std::string());
  clip.metadata.start_frame = meta.value("start_frame", 0);
  clip.metadata.end_frame = meta.value("end_frame", t_count);
  clip.metadata.joint_lower = RequireNumber(meta, "joint_lower", where + ": metadata");
  clip.metadata.joint_upper = RequireNumber(meta, "joint_upper", where + ": metadata");
  CanonicalizeQuaternions(&clip);
  return clip;
}

}  // namespace dexc
