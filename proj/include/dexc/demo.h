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

#ifndef DEXC_DEMO_H_
#define DEXC_DEMO_H_

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dexc/geometry.h"
#include "dexc/models.h"

namespace dexc {

inline constexpr int kDemoSchemaVersion = 1;

// Object base pose plus articulation angle.
struct ObjectState {
  Vec3 position = Vec3::Zero();
  Quat rotation = Quat::Identity();  // (w, x, y, z) on disk
  double joint_angle = 0.0;

  Pose BasePose() const { return {position, rotation}; }
};

// Per-hand reference: joints is T x J, keypoints is T x K points.
struct HandSequence {
  std::vector<VecX> joints;
  std::vector<std::vector<Vec3>> keypoints;
};

struct DemoMetadata {
  std::string name;
  std::string script;
  int start_frame = 0;
  int end_frame = 0;
  double joint_lower = 0.0;
  double joint_upper = 0.0;
};

struct DemoClip {
  std::string object_id;
  double dt = 0.02;
  std::vector<ObjectState> object_targets;
  std::array<HandSequence, kNumHands> hands;  // left, right
  int part_count = kNumParts;
  DemoMetadata metadata;

  int num_frames() const { return static_cast<int>(object_targets.size()); }
  int num_joints() const;
  int num_links() const;
};

enum class DemoScript { kLift, kLiftOpenClose, kLiftReorientOpen };

// Throws InvalidArgument for unknown names.
DemoScript ParseDemoScript(std::string_view name);
std::string_view DemoScriptName(DemoScript script);

// Scripted bimanual demonstration. Both hands hold the base with a pinch
// grasp; scripts with lid motion move the right hand under the lid overhang
// and push it along the hinge arc while the left hand keeps holding.
DemoClip GenerateDemo(DemoScript script, const ObjectModel& object,
                      const std::array<HandModel, kNumHands>& hands,
                      int num_frames, double dt);

struct DemoViolation {
  std::string field;
  int frame = -1;  // -1 when the rule is not frame-specific
  std::string rule;
};

// Every broken DemoClip invariant; empty iff the clip is valid.
std::vector<DemoViolation> ValidateDemo(const DemoClip& clip);
std::string FormatViolation(const DemoViolation& v);

// Forces w >= 0 at frame 0 and propagates the nearest sign forward.
void CanonicalizeQuaternions(DemoClip* clip);

DemoClip LoadDemo(const std::filesystem::path& path);
void SaveDemo(const DemoClip& clip, const std::filesystem::path& path);

}  // namespace dexc

#endif  // DEXC_DEMO_H_
