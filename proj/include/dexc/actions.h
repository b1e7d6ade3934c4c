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

#ifndef DEXC_ACTIONS_H_
#define DEXC_ACTIONS_H_

#include <string>
#include <string_view>

#include "dexc/demo.h"
#include "dexc/models.h"

namespace dexc {

enum class ActionMode { kHybrid, kAbsolute, kFullResidual };

ActionMode ParseActionMode(std::string_view name);
std::string_view ActionModeName(ActionMode mode);

struct ActionConfig {
  ActionMode mode = ActionMode::kHybrid;
  double translation_scale = 0.02;  // s_T, meters
  double rotation_scale = 0.1;      // s_R, radians
  // Full-residual mode: per wrist DoF min/max over the whole clip.
  VecX wrist_min, wrist_max;

  void Validate() const;
  bool has_wrist_range() const { return wrist_min.size() == kWristDofs; }
};

// Wrist range of one hand's reference over the clip, for full-residual mode.
ActionConfig WithWristRange(ActionConfig cfg, const DemoClip& clip, int hand);

// Hybrid map: wrist residuals around q_ref, fingers absolute over [l, u].
// The raw action is clipped to [-1, 1] and the result clamped to [l, u].
VecX ComposeTargets(const VecX& action, const VecX& q_ref,
                    const HandModel& hand, const ActionConfig& cfg);

// Affine map of every joint over its limits.
VecX AbsoluteTargets(const VecX& action, const HandModel& hand);

// Wrist residual scale per DoF is half the clip-wide range of that DoF.
VecX FullResidualTargets(const VecX& action, const VecX& q_ref,
                         const HandModel& hand, const ActionConfig& cfg);

// Dispatches on cfg.mode.
VecX JointTargets(const VecX& action, const VecX& q_ref, const HandModel& hand,
                  const ActionConfig& cfg);

}  // namespace dexc

#endif  // DEXC_ACTIONS_H_
