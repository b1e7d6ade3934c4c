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

#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "dexc/demo.h"
#include "dexc/error.h"
#include "dexc/prep.h"
#include "test_util.h"

namespace dexc {
namespace {

// Greedy max-min selection recomputed from scratch at every pick.
std::vector<int> BruteFps(const std::vector<Vec3>& pts, int n) {
  std::vector<int> chosen;
  if (n >= static_cast<int>(pts.size())) {
    for (size_t i = 0; i < pts.size(); ++i) chosen.push_back(static_cast<int>(i));
    return chosen;
  }
  chosen.push_back(0);
  while (static_cast<int>(chosen.size()) < n) {
    int best = -1;
    double best_d = -1.0;
    for (size_t i = 0; i < pts.size(); ++i) {
      if (std::find(chosen.begin(), chosen.end(), static_cast<int>(i)) != chosen.end()) continue;
      double d = std::numeric_limits<double>::infinity();
      for (int c : chosen) d = std::min(d, (pts[i] - pts[c]).norm());
      if (d > best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    chosen.push_back(best);
  }
  return chosen;
}

FrameContacts BruteFrame(const std::vector<Vec3>& object, const std::vector<Vec3>& hand,
                         const std::vector<Vec3>& centers, double gamma, int n_c) {
  std::vector<Vec3> marked;
  for (const Vec3& p : object) {
    double d = std::numeric_limits<double>::infinity();
    for (const Vec3& h : hand) d = std::min(d, (p - h).norm());
    if (d < gamma) marked.push_back(p);
  }
  std::vector<Vec3> kept;
  if (!marked.empty()) {
    for (int i : BruteFps(marked, n_c)) kept.push_back(marked[i]);
  }
  const size_t k = centers.size();
  std::vector<Vec3> sum(k, Vec3::Zero());
  std::vector<int> count(k, 0);
  for (const Vec3& p : kept) {
    size_t best = 0;
    for (size_t j = 1; j < k; ++j) {
      if ((p - centers[j]).norm() < (p - centers[best]).norm()) best = j;
    }
    sum[best] += p;
    ++count[best];
  }
  FrameContacts out;
  for (size_t j = 0; j < k; ++j) {
    out.valid.push_back(count[j] > 0);
    out.position.push_back(count[j] > 0 ? Vec3(sum[j] / count[j]) : Vec3::Zero());
  }
  return out;
}

double MinPairwise(const std::vector<Vec3>& pts, const std::vector<int>& idx) {
  double d = std::numeric_limits<double>::infinity();
  for (size_t a = 0; a < idx.size(); ++a) {
    for (size_t b = a + 1; b < idx.size(); ++b) {
      d = std::min(d, (pts[idx[a]] - pts[idx[b]]).norm());
    }
  }
  return d;
}

TEST_CASE("fps picks the endpoints of collinear points") {
  std::vector<Vec3> pts = {Vec3(0, 0, 0), Vec3(0.5, 0, 0), Vec3(1, 0, 0)};
  CHECK(FarthestPointSubsample(pts, 2) == std::vector<int>{0, 2});
  CHECK(FarthestPointSubsample(pts, 3) == std::vector<int>{0, 1, 2});
  CHECK(FarthestPointSubsample(pts, 7) == std::vector<int>{0, 1, 2});
  CHECK_THROWS_AS(FarthestPointSubsample(pts, 0), InvalidArgument);
  CHECK_THROWS_AS(FarthestPointSubsample({}, 2), InvalidArgument);
}

TEST_CASE("fps matches the brute force greedy and avoids duplicates") {
  testing::Gen gen(61);
  for (int trial = 0; trial < 200; ++trial) {
    const int count = gen.Int(1, 10);
    std::vector<Vec3> pts;
    for (int i = 0; i < count; ++i) {
      pts.push_back(gen.Coin(0.4) && !pts.empty() ? pts[gen.Int(0, i - 1)] : gen.Point(1.0));
    }
    const int n = gen.Int(1, 10);
    std::vector<int> got = FarthestPointSubsample(pts, n);
    CHECK(got == BruteFps(pts, n));
    if (n == 2 && count >= 2) {
      bool distinct_exists = false;
      for (const Vec3& p : pts) distinct_exists |= !(p == pts[0]);
      if (distinct_exists) CHECK(!(pts[got[0]] == pts[got[1]]));
    }
  }
}

TEST_CASE("fps spreads better than random subsets") {
  testing::Gen gen(67);
  std::vector<Vec3> pts;
  for (int i = 0; i < 200; ++i) pts.push_back(gen.Point(0.1));
  std::vector<int> got = FarthestPointSubsample(pts, 50);
  REQUIRE(got.size() == 50);
  const double fps_min = MinPairwise(pts, got);
  std::vector<int> all(200);
  for (int i = 0; i < 200; ++i) all[i] = i;
  for (int s = 0; s < 100; ++s) {
    std::shuffle(all.begin(), all.end(), gen.engine());
    std::vector<int> subset(all.begin(), all.begin() + 50);
    CHECK(fps_min >= MinPairwise(pts, subset));
  }
}

TEST_CASE("frame contacts match the brute force pipeline") {
  testing::Gen gen(71);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Vec3> object, hand, centers;
    const int n_obj = gen.Int(1, 50), n_hand = gen.Int(1, 5), k = gen.Int(1, 4);
    for (int i = 0; i < n_obj; ++i) object.push_back(gen.Point(0.05));
    for (int i = 0; i < n_hand; ++i) hand.push_back(gen.Point(0.06));
    for (int i = 0; i < k; ++i) centers.push_back(gen.Point(0.06));
    const double gamma = gen.Uniform(0.005, 0.04);
    const int n_c = gen.Int(1, 20);
    FrameContacts got = ApproximateFrameContacts(object, hand, centers, gamma, n_c);
    FrameContacts want = BruteFrame(object, hand, centers, gamma, n_c);
    REQUIRE(got.valid.size() == want.valid.size());
    for (int j = 0; j < k; ++j) {
      CHECK(got.valid[j] == want.valid[j]);
      CHECK((got.position[j] - want.position[j]).norm() <= 1e-9);
    }
  }
}

TEST_CASE("single hand point on a surface point") {
  std::vector<Vec3> object = {Vec3(0, 0, 0), Vec3(0.5, 0, 0), Vec3(1, 0, 0)};
  std::vector<Vec3> hand = {Vec3(0.5, 0, 0)};
  std::vector<Vec3> centers = {Vec3(-1, 0, 0), Vec3(0.6, 0, 0)};
  FrameContacts c = ApproximateFrameContacts(object, hand, centers, 0.01, 50);
  CHECK_FALSE(c.valid[0]);
  CHECK(c.valid[1]);
  CHECK(c.position[1] == Vec3(0.5, 0, 0));
  CHECK(c.position[0] == Vec3::Zero());
  CHECK_THROWS_AS(ApproximateFrameContacts(object, hand, centers, 0.0, 50), InvalidArgument);
  CHECK_THROWS_AS(ApproximateFrameContacts({}, hand, centers, 0.01, 50), InvalidArgument);
}

TEST_CASE("parked hands produce no contacts") {
  std::array<HandModel, kNumHands> hands = ToyHandPair();
  ObjectModel object = ToyBoxObject();
  DemoClip clip = GenerateDemo(DemoScript::kLift, object, hands, 12, 0.02);
  for (int h = 0; h < kNumHands; ++h) {
    for (int t = 0; t < clip.num_frames(); ++t) {
      clip.hands[h].joints[t].head(3) = Vec3(h ? -1.0 : 1.0, 1.0, 1.0);
      clip.hands[h].keypoints[t] = LinkCenters(hands[h], clip.hands[h].joints[t]);
    }
    ContactAnnotation a = ApproximateContacts(clip, object, hands[h], h);
    CHECK(a.num_frames == 12);
    CHECK(a.mask.size() == static_cast<size_t>(12 * kNumParts * 3));
    CHECK(a.contacts.size() == a.mask.size());
    CHECK(std::none_of(a.mask.begin(), a.mask.end(), [](char m) { return m != 0; }));
  }
}

TEST_CASE("annotation shapes and contact locality on a grasp clip") {
  std::array<HandModel, kNumHands> hands = ToyHandPair();
  ObjectModel object = ToyBoxObject();
  DemoClip clip = GenerateDemo(DemoScript::kLiftOpenClose, object, hands, 80, 0.02);
  int valid = 0;
  for (int h = 0; h < kNumHands; ++h) {
    ContactAnnotation a = ApproximateContacts(clip, object, hands[h], h);
    for (int t = 0; t < a.num_frames; ++t) {
      for (int n = 0; n < kNumParts; ++n) {
        const Pose pose = object.PartPose(n, clip.object_targets[t].BasePose(),
                                          clip.object_targets[t].joint_angle);
        const PartModel& part = object.parts[n];
        const double diameter = 2.0 * part.box_half_extents.norm();
        for (int k = 0; k < a.num_links; ++k) {
          if (!a.M(t, n, k)) {
            CHECK(a.C(t, n, k) == Vec3::Zero());
            continue;
          }
          ++valid;
          Vec3 local = pose.Inverse().Apply(a.C(t, n, k)) - part.box_center;
          double d = QueryBox(part.box_half_extents, local).signed_distance;
          CHECK(std::abs(d) <= a.gamma + diameter);
        }
      }
    }
  }
  CHECK(valid > 0);
}

TEST_CASE("replay keeps a collision free pose") {
  std::array<HandModel, kNumHands> hands = ToyHandPair();
  ObjectModel object = ToyBoxObject();
  DemoClip clip = GenerateDemo(DemoScript::kLift, object, hands, 10, 0.02);
  for (int h = 0; h < kNumHands; ++h) {
    for (int t = 0; t < clip.num_frames(); ++t) {
      clip.hands[h].joints[t].head(3) = Vec3(h ? -0.6 : 0.6, 0.5, 0.5);
      clip.hands[h].keypoints[t] = LinkCenters(hands[h], clip.hands[h].joints[t]);
    }
  }
  Simulator sim(object, hands);
  RetargetResult r = ReplayRetarget(clip, sim);
  for (int h = 0; h < kNumHands; ++h) {
    REQUIRE(r.hands[h].joints.size() == 10u);
    REQUIRE(r.hands[h].keypoints.size() == 10u);
    for (int t = 0; t < 10; ++t) {
      CHECK((r.hands[h].joints[t] - clip.hands[h].joints[t]).cwiseAbs().maxCoeff() <= 0.01);
    }
  }
  DemoClip applied = ApplyRetarget(clip, r);
  CHECK(applied.dt == clip.dt);
  CHECK(applied.num_frames() == clip.num_frames());
}

TEST_CASE("replay pushes a penetrating palm out of a pinned part") {
  std::array<HandModel, kNumHands> hands = ToyHandPair();
  ObjectModel object = ToyBoxObject();
  DemoClip clip = GenerateDemo(DemoScript::kLift, object, hands, 3, 0.02);
  const double top = object.start_position.z() + object.parts[1].box_center.z() +
                     object.parts[1].box_half_extents.z();
  const double r = hands[0].links[0].radius;
  for (int t = 0; t < 3; ++t) {
    clip.object_targets[t] = {object.start_position, Quat::Identity(), 0.0};
    VecX q = VecX::Zero(8);
    q << 0.0, 0.015, top + r - 0.005, 0, 0, 0, 0, 0;
    clip.hands[0].joints[t] = q;
    clip.hands[0].keypoints[t] = LinkCenters(hands[0], q);
    VecX far = VecX::Zero(8);
    far << -1.0, -1.0, 1.0, 0, 0, 0, 0, 0;
    clip.hands[1].joints[t] = far;
    clip.hands[1].keypoints[t] = LinkCenters(hands[1], far);
  }
  RetargetResult res = ReplayRetarget(clip, Simulator(object, hands));
  CHECK(res.max_penetration <= 1e-3);
  for (int t = 0; t < 3; ++t) {
    const double palm_z = res.hands[0].keypoints[t][0].z();
    CHECK(top - (palm_z - r) <= 1e-3);
  }
}

TEST_CASE("sidecars round trip and are byte stable") {
  auto dir = testing::TempDir("prep_sidecars");
  std::array<HandModel, kNumHands> hands = ToyHandPair();
  ObjectModel object = ToyBoxObject();
  DemoClip clip = GenerateDemo(DemoScript::kLiftOpenClose, object, hands, 40, 0.02);
  SaveDemo(clip, dir / "d.json");
  RetargetResult r = ReplayRetarget(clip, Simulator(object, hands));
  std::array<ContactAnnotation, kNumHands> c;
  for (int h = 0; h < kNumHands; ++h) {
    c[h] = ApproximateContacts(ApplyRetarget(clip, r), object, hands[h], h, 0.02, 30, 0.1);
  }
  SaveContacts(c, ContactsPath(dir / "d.json"), "abc");
  SaveRetarget(r, RetargetPath(dir / "d.json"), "abc");
  CHECK(ContactsPath(dir / "d.json").filename() == "d.contacts.json");
  auto back = LoadContacts(ContactsPath(dir / "d.json"));
  auto rback = LoadRetarget(RetargetPath(dir / "d.json"));
  for (int h = 0; h < kNumHands; ++h) {
    CHECK(back[h].gamma == 0.02);
    CHECK(back[h].max_contacts == 30);
    CHECK(back[h].mask == c[h].mask);
    for (size_t i = 0; i < c[h].contacts.size(); ++i) {
      CHECK((back[h].contacts[i] - c[h].contacts[i]).norm() <= 1e-12);
    }
    for (size_t t = 0; t < r.hands[h].joints.size(); ++t) {
      CHECK((rback.hands[h].joints[t] - r.hands[h].joints[t]).norm() <= 1e-12);
    }
  }
  CHECK(rback.max_penetration == r.max_penetration);
}

}  // namespace
}  // namespace dexc
