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

#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "dexc/demo.h"
#include "dexc/eval.h"
#include "test_util.h"

namespace dexc {
namespace {

TEST_CASE("tracking error examples") {
  ObjectState a{Vec3(0.1, 0.2, 0.3), Quat(Eigen::AngleAxisd(0.3, Vec3::UnitX())), 0.4};
  TrackingErrors e = TrackingError(a, a);
  CHECK(e.d_pos == 0.0);
  CHECK(e.d_rot == 0.0);
  CHECK(e.d_ang == 0.0);
  ObjectState b = a;
  b.position.z() += 0.05;
  e = TrackingError(b, a);
  CHECK(e.d_pos == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(e.d_rot == 0.0);
  CHECK(e.d_ang == 0.0);
  testing::Gen gen(81);
  for (int i = 0; i < 100; ++i) {
    ObjectState x{gen.Point(1), gen.Rotation(), gen.Uniform(0, 1)};
    ObjectState y{gen.Point(1), gen.Rotation(), gen.Uniform(0, 1)};
    TrackingErrors p = TrackingError(x, y), q = TrackingError(y, x);
    CHECK(p.d_pos == doctest::Approx(q.d_pos).epsilon(1e-14));
    CHECK(p.d_rot == doctest::Approx(q.d_rot).epsilon(1e-12));
    CHECK(p.d_ang == q.d_ang);
  }
}

TEST_CASE("per part ADD examples") {
  testing::Gen gen(83);
  std::vector<Vec3> pts;
  for (int i = 0; i < 9; ++i) pts.push_back(gen.Point(0.3));
  Pose target{gen.Point(0.5), gen.Rotation()};
  CHECK(AddPerPart(target, target, pts) == 0.0);
  Pose shifted{Vec3(0.02, 0, 0), Quat::Identity()};
  Pose moved = shifted * target;
  CHECK(AddPerPart(moved, target, pts) == doctest::Approx(0.02).epsilon(1e-12));
  // Unit square corners rotated 90 degrees about their centroid.
  std::vector<Vec3> corners = {Vec3(0.5, 0.5, 0), Vec3(-0.5, 0.5, 0),
                               Vec3(-0.5, -0.5, 0), Vec3(0.5, -0.5, 0)};
  Pose rot{Vec3::Zero(), Quat(Eigen::AngleAxisd(std::numbers::pi / 2, Vec3::UnitZ()))};
  Pose id;
  double direct = 0.0;
  for (const Vec3& c : corners) direct += (rot.Apply(c) - c).norm() / 4;
  CHECK(direct == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(AddPerPart(rot, id, corners) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS(AddPerPart(id, id, {}));
}

TEST_CASE("ADD-AUC analytic cases") {
  std::vector<double> zeros(37, 0.0);
  CHECK(AddAuc(zeros, 0.1, 100) == 1.0);
  std::vector<double> above(20, 0.1000001);
  CHECK(AddAuc(above, 0.1, 100) == 0.0);
  std::vector<double> inf(5, std::numeric_limits<double>::infinity());
  CHECK(AddAuc(inf, 0.1, 100) == 0.0);
  std::vector<double> half(50, 0.05);
  CHECK(AddAuc(half, 0.1, 100) == 0.51);
  // Constant c: count of thresholds at or above c, over n.
  testing::Gen gen(89);
  for (int i = 0; i < 200; ++i) {
    const int n = gen.Int(1, 200);
    const double max = gen.Uniform(0.01, 0.5);
    const double c = gen.Uniform(0.0, 1.2 * max);
    int count = 0;
    for (int k = 1; k <= n; ++k) count += (max * k / n >= c);
    std::vector<double> series(13, c);
    CHECK(AddAuc(series, max, n) == static_cast<double>(count) / n);
  }
}

TEST_CASE("accuracy curve is a monotone staircase") {
  testing::Gen gen(97);
  std::vector<double> s;
  for (int i = 0; i < 300; ++i) s.push_back(gen.Uniform(0.0, 0.15));
  std::vector<double> acc = AccuracyCurve(s, 0.1, 50);
  for (size_t i = 1; i < acc.size(); ++i) CHECK(acc[i] >= acc[i - 1]);
  for (size_t i = 0; i < acc.size(); ++i) {
    const double tau = 0.1 * (i + 1) / 50;
    int below = 0;
    for (double v : s) below += v <= tau;
    CHECK(acc[i] == static_cast<double>(below) / s.size());
  }
  CHECK_THROWS(AccuracyCurve({}, 0.1, 10));
  CHECK_THROWS(AucThresholds(0.0, 10));
}

Task SmallTask(DemoScript script, int frames) {
  ObjectModel object = ToyBoxObject();
  auto hands = ToyHandPair();
  DemoClip clip = GenerateDemo(script, object, hands, frames, 0.02);
  return PrepareTask(object, hands, clip, SimParams{});
}

TEST_CASE("baseline evaluations") {
  Task task = SmallTask(DemoScript::kLiftOpenClose, 300);
  EvalConfig cfg;
  cfg.n_episodes = 2;
  EvalReport kin = Evaluate(EvalMode::kKinematicsOnly, nullptr, task, {}, cfg);
  VirtualGains g{1e4, CriticalDamping(1e4, task.object.TotalMass())};
  EvalReport ctl = Evaluate(EvalMode::kControllerOnly, nullptr, task, {}, cfg, g);
  CHECK(ctl.auc >= 0.95);
  CHECK(ctl.completion == 1.0);
  CHECK(kin.auc < ctl.auc);
  CHECK(kin.max_applied_kp == 0.0);
  CHECK(ctl.mode == "controller-only");
  CHECK(kin.reference_points[0] >= 8);
  CHECK(kin.reference_points[1] >= 8);
  CHECK_THROWS(Evaluate(EvalMode::kPolicy, nullptr, task, {}, cfg));
}

TEST_CASE("evaluation repeats exactly and reports round trip") {
  Task task = SmallTask(DemoScript::kLift, 60);
  EvalConfig cfg;
  cfg.n_episodes = 1;
  cfg.seed = 4;
  EvalReport a = Evaluate(EvalMode::kKinematicsOnly, nullptr, task, {}, cfg);
  EvalReport b = Evaluate(EvalMode::kKinematicsOnly, nullptr, task, {}, cfg);
  CHECK(a.auc == b.auc);
  CHECK(a.episodes[0].avg_add == b.episodes[0].avg_add);
  auto dir = testing::TempDir("eval_report");
  a.method = "kinematics-only";
  a.config_hash = "0123";
  SaveReport(a, dir / "report.json");
  EvalReport back = LoadReport(dir / "report.json");
  CHECK(back.auc == a.auc);
  CHECK(back.method == a.method);
  CHECK(back.config_hash == "0123");
  CHECK(back.episodes.size() == a.episodes.size());
  for (size_t i = 0; i < a.episodes[0].avg_add.size(); ++i) {
    const double x = a.episodes[0].avg_add[i], y = back.episodes[0].avg_add[i];
    CHECK((x == y || (std::isinf(x) && std::isinf(y))));
  }
  CHECK(SummaryCsvRow(a).rfind("kinematics-only,", 0) == 0);
  CHECK(SummaryCsvHeader().rfind("method,task,seed,add_auc", 0) == 0);
}

TEST_CASE("mode names") {
  for (EvalMode m : {EvalMode::kPolicy, EvalMode::kKinematicsOnly, EvalMode::kControllerOnly}) {
    CHECK(ParseEvalMode(EvalModeName(m)) == m);
  }
  CHECK_THROWS(ParseEvalMode("oracle"));
}

}  // namespace
}  // namespace dexc
