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
#include <numeric>

#include "doctest.h"
#include "dexc/rewards.h"
#include "test_util.h"

namespace dexc {
namespace {

// Scalar-loop references written straight from the definitions.
double NaiveImitation(const std::vector<Vec3>& a, const std::vector<Vec3>& b,
                      double beta) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d2 = 0.0;
    for (int c = 0; c < 3; ++c) d2 += (a[i][c] - b[i][c]) * (a[i][c] - b[i][c]);
    sum += std::exp(-beta * std::sqrt(d2));
  }
  return sum / a.size();
}

double NaiveBc(const VecX& a, const VecX& b, double beta) {
  double sum = 0.0;
  for (int i = 0; i < a.size(); ++i) sum += std::exp(-beta * std::fabs(a[i] - b[i]));
  return sum / a.size();
}

struct HandContacts {
  std::vector<Vec3> pos;
  std::vector<char> mask;
};

double NaiveContact(const std::array<HandContacts, 2>& pol,
                    const std::array<HandContacts, 2>& demo, double beta,
                    double d_max) {
  double sum = 0.0;
  int count = 0;
  for (int h = 0; h < 2; ++h) {
    for (size_t i = 0; i < pol[h].pos.size(); ++i) {
      double d;
      if (pol[h].mask[i] && demo[h].mask[i]) {
        d = std::sqrt((pol[h].pos[i] - demo[h].pos[i]).squaredNorm());
      } else if (pol[h].mask[i] != demo[h].mask[i]) {
        d = d_max;
      } else {
        d = 0.0;
      }
      sum += std::exp(-beta * d);
      ++count;
    }
  }
  return sum / count;
}

std::array<ContactView, 2> Views(const std::array<HandContacts, 2>& c) {
  return {ContactView{c[0].pos, c[0].mask}, ContactView{c[1].pos, c[1].mask}};
}

HandContacts RandomContacts(testing::Gen* gen, int n) {
  HandContacts c;
  for (int i = 0; i < n; ++i) {
    bool m = gen->Coin();
    c.mask.push_back(m);
    c.pos.push_back(m ? gen->Point(0.2) : Vec3::Zero());
  }
  return c;
}

ObjectState RandomState(testing::Gen* gen) {
  return {gen->Point(0.5), gen->Rotation(), gen->Uniform(0.0, 1.5)};
}

TEST_CASE("task reward examples") {
  RewardConfig cfg;
  ObjectState s{Vec3(0.1, 0.2, 0.3), Quat::Identity(), 0.4};
  CHECK(TaskReward(s, s, cfg).r_task == 1.0);
  cfg.beta_pos = 10.0;
  ObjectState off = s;
  off.position.z() += 0.1;
  CHECK(TaskReward(off, s, cfg).r_task == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("task reward matches the product of exponentials") {
  testing::Gen gen(21);
  RewardConfig cfg;
  for (int i = 0; i < 1000; ++i) {
    ObjectState a = RandomState(&gen), b = RandomState(&gen);
    TaskRewardTerms t = TaskReward(a, b, cfg);
    const double dp = std::sqrt((a.position - b.position).squaredNorm());
    const double dot = std::fabs(a.rotation.w() * b.rotation.w() +
                                 a.rotation.x() * b.rotation.x() +
                                 a.rotation.y() * b.rotation.y() +
                                 a.rotation.z() * b.rotation.z());
    const double dr = 2.0 * std::acos(std::min(1.0, dot));
    const double da = std::fabs(a.joint_angle - b.joint_angle);
    const double ref = std::exp(-cfg.beta_pos * dp) * std::exp(-cfg.beta_rot * dr) *
                       std::exp(-cfg.beta_ang * da);
    CHECK(std::fabs(t.r_task - ref) <= 1e-12);
    CHECK(std::fabs(t.r_task - t.r_pos * t.r_rot * t.r_angle) <= 1e-12);
    CHECK(t.r_task > 0.0);
    CHECK(t.r_task <= 1.0);
  }
}

TEST_CASE("task reward strictly decreases in each distance") {
  RewardConfig cfg;
  ObjectState target{Vec3::Zero(), Quat::Identity(), 0.5};
  double prev = 2.0;
  for (int i = 0; i < 20; ++i) {
    ObjectState a = target;
    a.position.x() = 0.01 * i;
    double r = TaskReward(a, target, cfg).r_task;
    CHECK(r < prev);
    prev = r;
  }
  prev = 2.0;
  for (int i = 0; i < 20; ++i) {
    ObjectState a = target;
    a.rotation = Quat(Eigen::AngleAxisd(0.1 * i, Vec3::UnitY()));
    double r = TaskReward(a, target, cfg).r_task;
    CHECK(r < prev);
    prev = r;
  }
  prev = 2.0;
  for (int i = 0; i < 20; ++i) {
    ObjectState a = target;
    a.joint_angle = 0.5 + 0.05 * i;
    double r = TaskReward(a, target, cfg).r_task;
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("rotation distance is left invariant") {
  testing::Gen gen(23);
  for (int i = 0; i < 500; ++i) {
    Quat q = gen.Rotation(), r = gen.Rotation();
    Quat qr = q * r;
    qr.normalize();
    CHECK(RotDistance(q, qr) == doctest::Approx(RotDistance(Quat::Identity(), r)).epsilon(1e-9));
  }
}

TEST_CASE("imitation and bc examples") {
  std::vector<Vec3> x = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
  CHECK(ImitationReward(x, x, 30.0) == 1.0);
  const double beta = 30.0;
  const double d = std::log(2.0) / beta;
  std::vector<Vec3> y = x;
  y[0].y() += d;
  CHECK(ImitationReward(y, x, beta) == doctest::Approx(0.75).epsilon(1e-14));
  VecX q = VecX::LinSpaced(8, 0.0, 1.0);
  CHECK(BcReward(q, q, 5.0) == 1.0);
  CHECK_THROWS(ImitationReward(std::vector<Vec3>(3), x, 1.0));
  CHECK_THROWS(BcReward(VecX::Zero(3), VecX::Zero(4), 1.0));
}

TEST_CASE("imitation and bc match scalar loops") {
  testing::Gen gen(29);
  for (int i = 0; i < 1000; ++i) {
    const int k = gen.Int(1, 8);
    std::vector<Vec3> a, b;
    for (int j = 0; j < k; ++j) {
      a.push_back(gen.Point(0.3));
      b.push_back(a.back() + gen.Point(gen.Uniform(0.0, 0.1)));
    }
    const double beta = gen.Uniform(0.1, 50.0);
    CHECK(std::fabs(ImitationReward(a, b, beta) - NaiveImitation(a, b, beta)) <= 1e-12);
    const int n = gen.Int(1, 16);
    VecX qa(n), qb(n);
    for (int j = 0; j < n; ++j) {
      qa[j] = gen.Uniform(-2, 2);
      qb[j] = qa[j] + gen.Uniform(-0.5, 0.5);
    }
    CHECK(std::fabs(BcReward(qa, qb, beta) - NaiveBc(qa, qb, beta)) <= 1e-12);
  }
}

TEST_CASE("contact reward examples") {
  const int nk = 2 * 3;
  std::array<HandContacts, 2> none;
  for (auto& h : none) {
    h.pos.assign(nk, Vec3::Zero());
    h.mask.assign(nk, 0);
  }
  CHECK(ContactReward(Views(none), Views(none), 30.0, 0.1) == 1.0);
  std::array<HandContacts, 2> all = none;
  for (auto& h : all) h.mask.assign(nk, 1);
  CHECK(ContactReward(Views(all), Views(none), 10.0, 0.1) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("contact reward matches a per-pair loop and ignores ordering") {
  testing::Gen gen(31);
  for (int i = 0; i < 1000; ++i) {
    const int nk = 2 * gen.Int(1, 5);
    std::array<HandContacts, 2> pol = {RandomContacts(&gen, nk), RandomContacts(&gen, nk)};
    std::array<HandContacts, 2> demo = {RandomContacts(&gen, nk), RandomContacts(&gen, nk)};
    const double beta = gen.Uniform(1.0, 50.0), d_max = gen.Uniform(0.01, 0.3);
    const double r = ContactReward(Views(pol), Views(demo), beta, d_max);
    CHECK(std::fabs(r - NaiveContact(pol, demo, beta, d_max)) <= 1e-12);
    // Same permutation on both sides.
    std::vector<int> perm(nk);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen.engine());
    auto pol2 = pol, demo2 = demo;
    for (int h = 0; h < 2; ++h) {
      for (int j = 0; j < nk; ++j) {
        pol2[h].pos[j] = pol[h].pos[perm[j]];
        pol2[h].mask[j] = pol[h].mask[perm[j]];
        demo2[h].pos[j] = demo[h].pos[perm[j]];
        demo2[h].mask[j] = demo[h].mask[perm[j]];
      }
    }
    CHECK(ContactReward(Views(pol2), Views(demo2), beta, d_max) ==
          doctest::Approx(r).epsilon(1e-14));
  }
}

TEST_CASE("total reward examples") {
  RewardConfig cfg;
  cfg.lambda_task = 1.0;
  cfg.lambda_imi = cfg.lambda_bc = cfg.lambda_con = 0.1;
  TaskRewardTerms one;
  one.r_task = one.r_pos = one.r_rot = one.r_angle = 1.0;
  CHECK(TotalReward(one, 1.0, 1.0, 1.0, cfg).r_total == doctest::Approx(1.3).epsilon(1e-15));
  TaskRewardTerms zero;
  CHECK(TotalReward(zero, 0.0, 0.0, 0.0, cfg).r_total == 0.0);
  cfg.lambda_imi = cfg.lambda_bc = cfg.lambda_con = 0.0;
  TaskRewardTerms half;
  half.r_task = 0.5;
  CHECK(TotalReward(half, 0.9, 0.8, 0.7, cfg).r_total == 0.5);
}

TEST_CASE("reward config validation") {
  RewardConfig cfg;
  cfg.Validate();
  cfg.beta_con = 0.0;
  CHECK_THROWS(cfg.Validate());
  cfg = {};
  cfg.lambda_bc = -0.1;
  CHECK_THROWS(cfg.Validate());
}

}  // namespace
}  // namespace dexc
