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

#include "doctest.h"
#include "dexc/actions.h"
#include "dexc/demo.h"
#include "dexc/error.h"
#include "test_util.h"

namespace dexc {
namespace {

VecX RandomRef(const HandModel& hand, testing::Gen* gen) {
  VecX q(hand.num_joints());
  for (int j = 0; j < q.size(); ++j) {
    q[j] = gen->Uniform(hand.lower[j], hand.upper[j]);
  }
  return q;
}

TEST_CASE("hybrid zero action holds the wrist reference and centers fingers") {
  HandModel hand = ToyHand();
  testing::Gen gen(1);
  VecX ref = RandomRef(hand, &gen);
  VecX q = ComposeTargets(VecX::Zero(hand.num_joints()), ref, hand, {});
  for (int j = 0; j < kWristDofs; ++j) CHECK(q[j] == ref[j]);
  for (int j = kWristDofs; j < hand.num_joints(); ++j) {
    CHECK(q[j] == doctest::Approx(0.5 * (hand.lower[j] + hand.upper[j])));
  }
}

TEST_CASE("hybrid finger action at +1 hits the upper limit exactly") {
  HandModel hand = ToyHand();
  VecX a = VecX::Zero(hand.num_joints());
  a[kWristDofs] = 1.0;
  VecX q = ComposeTargets(a, (hand.lower + hand.upper) / 2, hand, {});
  CHECK(q[kWristDofs] == hand.upper[kWristDofs]);
}

TEST_CASE("hybrid clips raw output before scaling") {
  HandModel hand = ToyHand();
  hand.lower[0] = -1.0;
  hand.upper[0] = 1.0;
  VecX ref = (hand.lower + hand.upper) / 2;
  ref[0] = 0.5;
  VecX a = VecX::Zero(hand.num_joints());
  a[0] = 3.7;
  ActionConfig cfg;
  cfg.translation_scale = 0.02;
  CHECK(ComposeTargets(a, ref, hand, cfg)[0] == doctest::Approx(0.52).epsilon(1e-15));
}

TEST_CASE("absolute mode maps the unit box onto the limits") {
  HandModel hand = ToyHand();
  const int n = hand.num_joints();
  VecX lo = AbsoluteTargets(VecX::Constant(n, -1.0), hand);
  VecX hi = AbsoluteTargets(VecX::Constant(n, 1.0), hand);
  VecX mid = AbsoluteTargets(VecX::Zero(n), hand);
  for (int j = 0; j < n; ++j) {
    CHECK(lo[j] == hand.lower[j]);
    CHECK(hi[j] == hand.upper[j]);
    CHECK(mid[j] == doctest::Approx(0.5 * (hand.lower[j] + hand.upper[j])));
  }
}

TEST_CASE("full residual scale is half the clip range") {
  std::array<HandModel, kNumHands> hands = ToyHandPair();
  DemoClip clip = GenerateDemo(DemoScript::kLiftOpenClose, ToyBoxObject(),
                               hands, 60, 0.02);
  // Force wrist x to span [0.1, 0.5].
  for (int t = 0; t < clip.num_frames(); ++t) {
    clip.hands[0].joints[t][0] = 0.1 + 0.4 * t / (clip.num_frames() - 1);
  }
  ActionConfig cfg = WithWristRange({}, clip, 0);
  cfg.mode = ActionMode::kFullResidual;
  CHECK(cfg.wrist_min[0] == doctest::Approx(0.1));
  CHECK(cfg.wrist_max[0] == doctest::Approx(0.5));
  HandModel hand = hands[0];
  hand.lower[0] = -2.0;
  hand.upper[0] = 2.0;
  VecX ref = clip.hands[0].joints[10];
  VecX a = VecX::Zero(hand.num_joints());
  CHECK(FullResidualTargets(a, ref, hand, cfg)[0] == ref[0]);
  a[0] = 1.0;
  CHECK(FullResidualTargets(a, ref, hand, cfg)[0] ==
        doctest::Approx(ref[0] + 0.2));
}

TEST_CASE("targets stay within limits for random actions in every mode") {
  std::array<HandModel, kNumHands> hands = ToyHandPair();
  DemoClip clip = GenerateDemo(DemoScript::kLiftReorientOpen, ToyBoxObject(),
                               hands, 60, 0.02);
  testing::Gen gen(17);
  for (ActionMode mode :
       {ActionMode::kHybrid, ActionMode::kAbsolute, ActionMode::kFullResidual}) {
    for (int h = 0; h < kNumHands; ++h) {
      ActionConfig cfg = WithWristRange({}, clip, h);
      cfg.mode = mode;
      const HandModel& hand = hands[h];
      for (int i = 0; i < 10000 / 6; ++i) {
        VecX a(hand.num_joints());
        for (int j = 0; j < a.size(); ++j) a[j] = gen.Uniform(-1.0, 1.0);
        VecX ref = clip.hands[h].joints[gen.Int(0, clip.num_frames() - 1)];
        VecX q = JointTargets(a, ref, hand, cfg);
        CHECK((q.array() >= hand.lower.array()).all());
        CHECK((q.array() <= hand.upper.array()).all());
      }
    }
  }
}

TEST_CASE("action config validation") {
  ActionConfig cfg;
  cfg.mode = ActionMode::kFullResidual;
  CHECK_THROWS_AS(cfg.Validate(), InvalidArgument);
  cfg = {};
  cfg.translation_scale = 0.0;
  CHECK_THROWS_AS(cfg.Validate(), InvalidArgument);
  CHECK(ParseActionMode("full-residual") == ActionMode::kFullResidual);
  CHECK(ActionModeName(ActionMode::kHybrid) == "hybrid");
  CHECK_THROWS(ParseActionMode("relative"));
  HandModel hand = ToyHand();
  CHECK_THROWS_AS(ComposeTargets(VecX::Zero(3), VecX::Zero(hand.num_joints()),
                                 hand, {}),
                  InvalidArgument);
}

}  // namespace
}  // namespace dexc
