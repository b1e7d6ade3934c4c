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

#include "dexc/actions.h"

#include <string>

#include "dexc/error.h"

namespace dexc {
namespace {

void CheckDims(const VecX& action, const HandModel& hand) {
  if (action.size() != hand.num_joints()) {
    throw InvalidArgument("action has " + std::to_string(action.size()) +
                          " entries, hand has " +
                          std::to_string(hand.num_joints()) + " joints");
  }
}

VecX Clip(const VecX& a) { return a.cwiseMax(-1.0).cwiseMin(1.0); }

VecX ClampToLimits(const VecX& q, const HandModel& hand) {
  return q.cwiseMax(hand.lower).cwiseMin(hand.upper);
}

void FingerTargets(const VecX& a, const HandModel& hand, VecX* q) {
  for (int j = kWristDofs; j < hand.num_joints(); ++j) {
    (*q)[j] = hand.lower[j] + 0.5 * (hand.upper[j] - hand.lower[j]) * (a[j] + 1.0);
  }
}

}  // namespace

ActionMode ParseActionMode(std::string_view name) {
  if (name == "hybrid") return ActionMode::kHybrid;
  if (name == "absolute") return ActionMode::kAbsolute;
  if (name == "full-residual") return ActionMode::kFullResidual;
  throw InvalidArgument("unknown action mode '" + std::string(name) + "'");
}

std::string_view ActionModeName(ActionMode mode) {
  switch (mode) {
    case ActionMode::kHybrid: return "hybrid";
    case ActionMode::kAbsolute: return "absolute";
    case ActionMode::kFullResidual: return "full-residual";
  }
  return "unknown";
}

void ActionConfig::Validate() const {
  if (!(translation_scale > 0.0) || !(rotation_scale > 0.0)) {
    throw InvalidArgument("action scales s_T and s_R must be positive");
  }
  if (mode == ActionMode::kFullResidual && !has_wrist_range()) {
    throw InvalidArgument("full-residual actions need the clip's wrist range");
  }
}

ActionConfig WithWristRange(ActionConfig cfg, const DemoClip& clip, int hand) {
  const auto& joints = clip.hands[hand].joints;
  if (joints.empty()) throw InvalidArgument("clip has no hand frames");
  cfg.wrist_min = joints.front().head<kWristDofs>();
  cfg.wrist_max = cfg.wrist_min;
  for (const VecX& q : joints) {
    cfg.wrist_min = cfg.wrist_min.cwiseMin(q.head<kWristDofs>());
    cfg.wrist_max = cfg.wrist_max.cwiseMax(q.head<kWristDofs>());
  }
  return cfg;
}

VecX ComposeTargets(const VecX& action, const VecX& q_ref,
                    const HandModel& hand, const ActionConfig& cfg) {
  CheckDims(action, hand);
  CheckDims(q_ref, hand);
  VecX a = Clip(action);
  VecX q(hand.num_joints());
  q.head<3>() = q_ref.head<3>() + cfg.translation_scale * a.head<3>();
  q.segment<3>(3) = q_ref.segment<3>(3) + cfg.rotation_scale * a.segment<3>(3);
  FingerTargets(a, hand, &q);
  return ClampToLimits(q, hand);
}

VecX AbsoluteTargets(const VecX& action, const HandModel& hand) {
  CheckDims(action, hand);
  VecX a = Clip(action);
  return hand.lower.array() +
         0.5 * (hand.upper - hand.lower).array() * (a.array() + 1.0);
}

VecX FullResidualTargets(const VecX& action, const VecX& q_ref,
                         const HandModel& hand, const ActionConfig& cfg) {
  CheckDims(action, hand);
  CheckDims(q_ref, hand);
  if (!cfg.has_wrist_range()) {
    throw InvalidArgument("full-residual actions need the clip's wrist range");
  }
  VecX a = Clip(action);
  VecX q(hand.num_joints());
  VecX scale = 0.5 * (cfg.wrist_max - cfg.wrist_min);
  q.head<kWristDofs>() =
      q_ref.head<kWristDofs>() + scale.cwiseProduct(a.head<kWristDofs>());
  FingerTargets(a, hand, &q);
  return ClampToLimits(q, hand);
}

VecX JointTargets(const VecX& action, const VecX& q_ref, const HandModel& hand,
                  const ActionConfig& cfg) {
  switch (cfg.mode) {
    case ActionMode::kHybrid: return ComposeTargets(action, q_ref, hand, cfg);
    case ActionMode::kAbsolute: return AbsoluteTargets(action, hand);
    case ActionMode::kFullResidual:
      return FullResidualTargets(action, q_ref, hand, cfg);
  }
  throw InvalidArgument("unknown action mode");
}

}  // namespace dexc
