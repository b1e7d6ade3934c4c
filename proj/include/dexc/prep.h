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

#ifndef DEXC_PREP_H_
#define DEXC_PREP_H_

#include <array>
#include <filesystem>
#include <span>
#include <vector>

#include "dexc/demo.h"
#include "dexc/models.h"
#include "dexc/sim.h"

namespace dexc {

inline constexpr double kDefaultContactGamma = 0.01;
inline constexpr int kDefaultContactCount = 50;
inline constexpr double kDefaultMismatchDistance = 0.10;
inline constexpr int kDefaultSettleSteps = 8;

// Approximate demonstration contacts of one hand: C is T x N x K x 3 and M
// is T x N x K, both flattened in (t, n, k) order. Entries with a false
// mask hold the zero vector and must not be read.
struct ContactAnnotation {
  int num_frames = 0;
  int num_parts = kNumParts;
  int num_links = 0;
  double gamma = kDefaultContactGamma;
  int max_contacts = kDefaultContactCount;
  double d_max = kDefaultMismatchDistance;
  std::vector<Vec3> contacts;
  std::vector<char> mask;

  int Index(int t, int n, int k) const {
    return (t * num_parts + n) * num_links + k;
  }
  const Vec3& C(int t, int n, int k) const { return contacts[Index(t, n, k)]; }
  bool M(int t, int n, int k) const { return mask[Index(t, n, k)] != 0; }
};

// Achieved joints and keypoints after collision-aware replay.
struct RetargetResult {
  std::array<HandSequence, kNumHands> hands;
  double max_penetration = 0.0;  // deepest link penetration over all frames
};

// For each frame the object is pinned at its target, the reference joints
// become PD targets and the hands settle for `settle_steps` simulator steps
// starting from the reference pose. Frames are independent.
RetargetResult ReplayRetarget(const DemoClip& clip, const Simulator& sim,
                              int settle_steps = kDefaultSettleSteps);

// Clip whose hand references are replaced by the achieved ones.
DemoClip ApplyRetarget(const DemoClip& clip, const RetargetResult& result);

// Greedy max-min selection seeded at index 0; ties go to the lowest index.
// Returns all indices in order when n >= points.size().
std::vector<int> FarthestPointSubsample(std::span<const Vec3> points, int n);

struct FrameContacts {
  std::vector<Vec3> position;  // per link
  std::vector<char> valid;
};

// Contacts of one hand with one part for one frame: marks object points
// closer than gamma to the hand cloud, subsamples to max_contacts, assigns
// each to the nearest link center and averages per link.
FrameContacts ApproximateFrameContacts(std::span<const Vec3> object_points,
                                       std::span<const Vec3> hand_points,
                                       std::span<const Vec3> link_centers,
                                       double gamma, int max_contacts);

ContactAnnotation ApproximateContacts(const DemoClip& clip,
                                      const ObjectModel& object,
                                      const HandModel& hand, int hand_index,
                                      double gamma = kDefaultContactGamma,
                                      int max_contacts = kDefaultContactCount,
                                      double d_max = kDefaultMismatchDistance);

// Sidecar files.
void SaveContacts(const std::array<ContactAnnotation, kNumHands>& contacts,
                  const std::filesystem::path& path,
                  const std::string& config_hash);
std::array<ContactAnnotation, kNumHands> LoadContacts(
    const std::filesystem::path& path);
void SaveRetarget(const RetargetResult& result, const std::filesystem::path& path,
                  const std::string& config_hash);
RetargetResult LoadRetarget(const std::filesystem::path& path);

std::filesystem::path ContactsPath(const std::filesystem::path& demo);
std::filesystem::path RetargetPath(const std::filesystem::path& demo);

}  // namespace dexc

#endif  // DEXC_PREP_H_
