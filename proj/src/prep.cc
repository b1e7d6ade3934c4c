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

#include "dexc/prep.h"

#include <algorithm>
#include <limits>
#include <string>

#include "dexc/error.h"
#include "json_util.h"

namespace dexc {

using internal::Json;

RetargetResult ReplayRetarget(const DemoClip& clip, const Simulator& sim,
                              int settle_steps) {
  if (settle_steps < 1) throw InvalidArgument("settle budget must be >= 1");
  const auto& hands = sim.hands();
  if (clip.num_joints() != hands[0].num_joints() ||
      clip.num_links() != hands[0].num_links()) {
    throw InvalidArgument("clip and hand model disagree on J or K");
  }
  RetargetResult out;
  const VirtualGains no_gains;
  for (int t = 0; t < clip.num_frames(); ++t) {
    const ObjectState& target = clip.object_targets[t];
    HandTargets q_ref = {clip.hands[0].joints[t], clip.hands[1].joints[t]};
    SimState s = sim.Reset(target, q_ref);
    try {
      for (int i = 0; i < settle_steps; ++i) {
        s = sim.Step(s, q_ref, target, no_gains, /*pin_object=*/true);
      }
    } catch (const DivergenceError& e) {
      throw DivergenceError("replay diverged at frame " + std::to_string(t) +
                            ": " + e.what());
    }
    std::array<VecX, kNumHands> dist = sim.FingerObjectDistances(s);
    for (int h = 0; h < kNumHands; ++h) {
      out.hands[h].joints.push_back(s.hands[h].q);
      out.hands[h].keypoints.push_back(LinkCenters(hands[h], s.hands[h].q));
      out.max_penetration = std::max(out.max_penetration, -dist[h].minCoeff());
    }
  }
  return out;
}

DemoClip ApplyRetarget(const DemoClip& clip, const RetargetResult& result) {
  DemoClip out = clip;
  for (int h = 0; h < kNumHands; ++h) {
    if (static_cast<int>(result.hands[h].joints.size()) != clip.num_frames()) {
      throw InvalidArgument("retarget result length differs from clip");
    }
    out.hands[h] = result.hands[h];
  }
  return out;
}

std::vector<int> FarthestPointSubsample(std::span<const Vec3> points, int n) {
  if (n < 1) throw InvalidArgument("subsample count must be >= 1");
  if (points.empty()) throw InvalidArgument("cannot subsample an empty set");
  const int count = static_cast<int>(points.size());
  std::vector<int> out;
  if (n >= count) {
    for (int i = 0; i < count; ++i) out.push_back(i);
    return out;
  }
  std::vector<double> nearest(count, std::numeric_limits<double>::infinity());
  std::vector<char> taken(count, 0);
  int current = 0;
  for (int picked = 0; picked < n; ++picked) {
    out.push_back(current);
    taken[current] = 1;
    int next = -1;
    double best = -1.0;
    for (int i = 0; i < count; ++i) {
      if (taken[i]) continue;
      nearest[i] = std::min(nearest[i], (points[i] - points[current]).squaredNorm());
      if (nearest[i] > best) {
        best = nearest[i];
        next = i;
      }
    }
    current = next;
  }
  return out;
}

FrameContacts ApproximateFrameContacts(std::span<const Vec3> object_points,
                                       std::span<const Vec3> hand_points,
                                       std::span<const Vec3> link_centers,
                                       double gamma, int max_contacts) {
  if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  if (object_points.empty()) throw InvalidArgument("empty object surface point set");
  if (max_contacts < 1) throw InvalidArgument("n_c must be >= 1");
  const size_t num_links = link_centers.size();
  FrameContacts out;
  out.position.assign(num_links, Vec3::Zero());
  out.valid.assign(num_links, 0);

  std::vector<Vec3> marked;
  for (const Vec3& p : object_points) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& hp : hand_points) best = std::min(best, (p - hp).norm());
    if (best < gamma) marked.push_back(p);
  }
  if (marked.empty()) return out;
  std::vector<int> keep = FarthestPointSubsample(marked, max_contacts);

  std::vector<int> assigned(num_links, 0);
  for (int idx : keep) {
    const Vec3& p = marked[idx];
    size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (size_t m = 0; m < num_links; ++m) {
      double d = (p - link_centers[m]).norm();
      if (d < best) {
        best = d;
        nearest = m;
      }
    }
    out.position[nearest] += p;
    assigned[nearest] += 1;
  }
  for (size_t m = 0; m < num_links; ++m) {
    if (assigned[m] > 0) {
      out.position[m] /= assigned[m];
      out.valid[m] = 1;
    }
  }
  return out;
}

ContactAnnotation ApproximateContacts(const DemoClip& clip,
                                      const ObjectModel& object,
                                      const HandModel& hand, int hand_index,
                                      double gamma, int max_contacts,
                                      double d_max) {
  if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  if (!(d_max > 0.0)) throw InvalidArgument("d_max must be positive");
  if (hand_index < 0 || hand_index >= kNumHands) {
    throw InvalidArgument("hand index must be 0 (left) or 1 (right)");
  }
  const HandSequence& seq = clip.hands[hand_index];
  if (clip.num_links() != hand.num_links()) {
    throw InvalidArgument("clip keypoints do not match the hand's links");
  }
  ContactAnnotation ann;
  ann.num_frames = clip.num_frames();
  ann.num_links = hand.num_links();
  ann.gamma = gamma;
  ann.max_contacts = max_contacts;
  ann.d_max = d_max;
  ann.contacts.assign(static_cast<size_t>(ann.num_frames) * kNumParts * ann.num_links,
                      Vec3::Zero());
  ann.mask.assign(ann.contacts.size(), 0);

  for (int t = 0; t < ann.num_frames; ++t) {
    const std::vector<Vec3>& centers = seq.keypoints[t];
    std::vector<Vec3> cloud = HandPointCloud(hand, centers);
    Pose base = clip.object_targets[t].BasePose();
    for (int n = 0; n < kNumParts; ++n) {
      Pose pose = object.PartPose(n, base, clip.object_targets[t].joint_angle);
      std::vector<Vec3> world;
      world.reserve(object.parts[n].surface_points.size());
      for (const Vec3& p : object.parts[n].surface_points) world.push_back(pose.Apply(p));
      FrameContacts fc =
          ApproximateFrameContacts(world, cloud, centers, gamma, max_contacts);
      for (int k = 0; k < ann.num_links; ++k) {
        if (!fc.valid[k]) continue;
        ann.contacts[ann.Index(t, n, k)] = fc.position[k];
        ann.mask[ann.Index(t, n, k)] = 1;
      }
    }
  }
  return ann;
}

// ---------------------------------------------------------------------------

std::filesystem::path ContactsPath(const std::filesystem::path& demo) {
  std::filesystem::path p = demo;
  return p.replace_extension(".contacts.json");
}

std::filesystem::path RetargetPath(const std::filesystem::path& demo) {
  std::filesystem::path p = demo;
  return p.replace_extension(".retarget.json");
}

void SaveContacts(const std::array<ContactAnnotation, kNumHands>& contacts,
                  const std::filesystem::path& path,
                  const std::string& config_hash) {
  const ContactAnnotation& first = contacts[0];
  Json j;
  j["config_hash"] = config_hash;
  j["gamma"] = first.gamma;
  j["n_c"] = first.max_contacts;
  j["d_max"] = first.d_max;
  j["shape"] = {first.num_frames, first.num_parts, first.num_links};
  const char* names[kNumHands] = {"left", "right"};
  for (int h = 0; h < kNumHands; ++h) {
    Json c = Json::array();
    Json m = Json::array();
    for (size_t i = 0; i < contacts[h].contacts.size(); ++i) {
      const Vec3& p = contacts[h].contacts[i];
      c.push_back(p.x());
      c.push_back(p.y());
      c.push_back(p.z());
      m.push_back(contacts[h].mask[i] ? 1 : 0);
    }
    j["hands"][names[h]] = {{"C", std::move(c)}, {"M", std::move(m)}};
  }
  internal::WriteJsonFile(j, path);
}

std::array<ContactAnnotation, kNumHands> LoadContacts(
    const std::filesystem::path& path) {
  using internal::Require;
  using internal::RequireNumber;
  Json j = internal::ReadJsonFile(path);
  const std::string where = path.string();
  const Json& shape = Require(j, "shape", where);
  if (!shape.is_array() || shape.size() != 3) {
    throw SchemaError(where + ": shape must be [T, N, K]");
  }
  std::array<ContactAnnotation, kNumHands> out;
  const char* names[kNumHands] = {"left", "right"};
  for (int h = 0; h < kNumHands; ++h) {
    ContactAnnotation& ann = out[h];
    ann.num_frames = shape[0].get<int>();
    ann.num_parts = shape[1].get<int>();
    ann.num_links = shape[2].get<int>();
    ann.gamma = RequireNumber(j, "gamma", where);
    ann.max_contacts = static_cast<int>(RequireNumber(j, "n_c", where));
    ann.d_max = RequireNumber(j, "d_max", where);
    const Json& hj = Require(Require(j, "hands", where), names[h], where);
    const Json& c = Require(hj, "C", where);
    const Json& m = Require(hj, "M", where);
    size_t count = static_cast<size_t>(ann.num_frames) * ann.num_parts * ann.num_links;
    if (c.size() != 3 * count || m.size() != count) {
      throw SchemaError(where + ": contact arrays do not match the shape header");
    }
    ann.contacts.resize(count);
    ann.mask.resize(count);
    for (size_t i = 0; i < count; ++i) {
      ann.contacts[i] = Vec3(c[3 * i].get<double>(), c[3 * i + 1].get<double>(),
                             c[3 * i + 2].get<double>());
      ann.mask[i] = m[i].get<int>() != 0;
      if (!ann.mask[i] && !ann.contacts[i].isZero(0.0)) {
        throw SchemaError(where + ": invalid contact entry is not the zero sentinel");
      }
    }
  }
  return out;
}

void SaveRetarget(const RetargetResult& result, const std::filesystem::path& path,
                  const std::string& config_hash) {
  Json j;
  j["config_hash"] = config_hash;
  j["max_penetration"] = result.max_penetration;
  const char* names[kNumHands] = {"left", "right"};
  for (int h = 0; h < kNumHands; ++h) {
    Json joints = Json::array();
    for (const VecX& q : result.hands[h].joints) joints.push_back(internal::ToJson(q));
    Json keypoints = Json::array();
    for (const auto& frame : result.hands[h].keypoints) {
      keypoints.push_back(internal::ToJson(frame));
    }
    j["hands"][names[h]] = {{"joints", std::move(joints)},
                            {"keypoints", std::move(keypoints)}};
  }
  internal::WriteJsonFile(j, path);
}

RetargetResult LoadRetarget(const std::filesystem::path& path) {
  using internal::Require;
  Json j = internal::ReadJsonFile(path);
  const std::string where = path.string();
  RetargetResult out;
  out.max_penetration = j.value("max_penetration", 0.0);
  const char* names[kNumHands] = {"left", "right"};
  for (int h = 0; h < kNumHands; ++h) {
    const Json& hj = Require(Require(j, "hands", where), names[h], where);
    for (const Json& row : Require(hj, "joints", where)) {
      out.hands[h].joints.push_back(internal::VecXFromJson(row, where));
    }
    for (const Json& row : Require(hj, "keypoints", where)) {
      out.hands[h].keypoints.push_back(internal::PointsFromJson(row, where));
    }
    if (out.hands[h].joints.size() != out.hands[h].keypoints.size()) {
      throw SchemaError(where + ": ragged retarget arrays");
    }
  }
  return out;
}

}  // namespace dexc
