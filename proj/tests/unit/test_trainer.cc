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
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dexc/demo.h"
#include "dexc/trainer.h"
#include "test_util.h"

namespace dexc {
namespace {

// Backward loop over each column with explicit episode cuts.
void NaiveGae(const MatX& r, const MatX& v, const MatX& d, double g, double l,
              MatX* adv, MatX* ret) {
  const int h = static_cast<int>(r.rows()), e = static_cast<int>(r.cols());
  adv->resize(h, e);
  ret->resize(h, e);
  for (int j = 0; j < e; ++j) {
    double next = 0.0;
    for (int t = h - 1; t >= 0; --t) {
      const double live = 1.0 - d(t, j);
      const double delta = r(t, j) + g * v(t + 1, j) * live - v(t, j);
      next = delta + g * l * live * next;
      (*adv)(t, j) = next;
      (*ret)(t, j) = next + v(t, j);
    }
  }
}

TEST_CASE("gae matches a naive backward loop") {
  testing::Gen gen(101);
  for (int trial = 0; trial < 50; ++trial) {
    const int h = gen.Int(1, 40), e = gen.Int(1, 6);
    MatX r(h, e), v(h + 1, e), d(h, e);
    for (int i = 0; i < h; ++i) {
      for (int j = 0; j < e; ++j) {
        r(i, j) = gen.Uniform(-1, 2);
        d(i, j) = gen.Coin(0.1);
      }
    }
    for (int i = 0; i <= h; ++i) {
      for (int j = 0; j < e; ++j) v(i, j) = gen.Uniform(-3, 3);
    }
    const double g = gen.Uniform(0.0, 0.999), l = gen.Uniform(0.0, 1.0);
    GaeResult got = GaeAdvantages(r, v, d, g, l);
    MatX adv, ret;
    NaiveGae(r, v, d, g, l, &adv, &ret);
    CHECK((got.advantages - adv).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((got.returns - ret).cwiseAbs().maxCoeff() <= 1e-10);
    if (h * e > 1) {
      CHECK(std::abs(got.normalized.mean()) <= 1e-10);
    }
  }
}

TEST_CASE("gae recursion base cases") {
  MatX r(3, 1), v(4, 1), d = MatX::Zero(3, 1);
  r << 1.0, 2.0, 3.0;
  v << 0.5, -0.5, 0.25, 1.0;
  GaeResult td = GaeAdvantages(r, v, d, 0.9, 0.0);
  for (int t = 0; t < 3; ++t) {
    CHECK(td.advantages(t, 0) == doctest::Approx(r(t, 0) + 0.9 * v(t + 1, 0) - v(t, 0)));
  }
  GaeResult myopic = GaeAdvantages(r, v, d, 0.0, 0.95);
  for (int t = 0; t < 3; ++t) CHECK(myopic.returns(t, 0) == doctest::Approx(r(t, 0)));
}

Task SmallTask(int frames) {
  ObjectModel object = ToyBoxObject();
  auto hands = ToyHandPair();
  DemoClip clip = GenerateDemo(DemoScript::kLiftOpenClose, object, hands, frames, 0.02);
  return PrepareTask(object, hands, clip, SimParams{});
}

TrainConfig SmallConfig() {
  TrainConfig cfg;
  cfg.n_envs = 4;
  cfg.horizon = 16;
  cfg.max_iterations = 3;
  cfg.hidden = {8};
  cfg.seed = 5;
  cfg.gains.window = 4;
  return cfg;
}

std::string Slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int CountLines(const std::filesystem::path& p) {
  std::string s = Slurp(p);
  return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

TEST_CASE("rollout batch shapes") {
  Task task = SmallTask(60);
  TrainConfig cfg = SmallConfig();
  cfg.horizon = 128;
  Trainer trainer(cfg, &task, "h");
  RolloutBatch b = trainer.Collect();
  CHECK(b.Grid(b.rewards).rows() == 128);
  CHECK(b.Grid(b.rewards).cols() == 4);
  CHECK(b.obs.rows() == ObservationDim(8, 3));
  CHECK(b.actions.rows() == 16);
  CHECK(b.episodes.size() >= 4u * 2);  // 59-step episodes
}

TEST_CASE("deterministic collection repeats exactly") {
  Task task = SmallTask(40);
  Trainer a(SmallConfig(), &task, "h"), b(SmallConfig(), &task, "h");
  RolloutBatch x = a.Collect(true), y = b.Collect(true);
  CHECK(x.obs == y.obs);
  CHECK(x.rewards == y.rewards);
  CHECK(x.actions == y.actions);
}

TEST_CASE("zero actions with full gains track the object") {
  Task task = SmallTask(120);
  TrackingEnv env(&task, EnvConfig{});
  Rng rng(1);
  env.Reset(&rng);
  VirtualGains g{1e4, CriticalDamping(1e4, task.object.TotalMass())};
  double sum = 0.0;
  int n = 0;
  for (;;) {
    StepOutcome o = env.Step(VecX::Zero(env.action_dim()), g);
    sum += o.reward.r_task;
    ++n;
    if (o.done) break;
  }
  CHECK(n == 119);
  CHECK(sum / n > 0.9);
}

TEST_CASE("curriculum modes share the environment noise stream") {
  Task task = SmallTask(40);
  TrainConfig a = SmallConfig(), b = SmallConfig();
  a.curriculum = CurriculumMode::kDexMachina;
  b.curriculum = CurriculumMode::kNone;
  Trainer ta(a, &task, "h"), tb(b, &task, "h");
  RolloutBatch x = ta.Collect(), y = tb.Collect();
  // The first observation of every env depends only on the reset noise.
  CHECK(x.obs.leftCols(a.n_envs) == y.obs.leftCols(a.n_envs));
  CHECK(ta.CurrentGains().kp == a.gains.kp);
  CHECK(tb.CurrentGains().kp == 0.0);
}

TEST_CASE("zero iterations leave the initial policy and empty logs") {
  Task task = SmallTask(40);
  TrainConfig cfg = SmallConfig();
  cfg.max_iterations = 0;
  auto dir = testing::TempDir("trainer_zero");
  Trainer t(cfg, &task, "h", dir);
  const VecX before = t.policy().actor.params();
  t.Run();
  CHECK(t.policy().actor.params() == before);
  CHECK(t.logs().empty());
  CHECK(CountLines(dir / "train.csv") == 1);
  CHECK(std::filesystem::exists(dir / "checkpoint_last.json"));
}

TEST_CASE("training is reproducible, logs one row per iteration and resumes") {
  Task task = SmallTask(40);
  TrainConfig cfg = SmallConfig();
  auto d1 = testing::TempDir("trainer_a"), d2 = testing::TempDir("trainer_b");
  Trainer(cfg, &task, "h", d1).Run();
  Trainer(cfg, &task, "h", d2).Run();
  for (const char* f : {"train.csv", "curriculum.csv", "checkpoint_last.json"}) {
    CHECK(Slurp(d1 / f) == Slurp(d2 / f));
  }
  CHECK(CountLines(d1 / "train.csv") == 1 + 3);
  CHECK(CountLines(d1 / "curriculum.csv") == 1 + 3);

  TrainConfig five = cfg;
  five.max_iterations = 5;
  Trainer resumed(five, &task, "h", d1);
  resumed.Resume(d1 / "checkpoint_last.json");
  CHECK(resumed.iteration() == 3);
  resumed.Run();
  CHECK(resumed.iteration() == 5);
  CHECK(CountLines(d1 / "train.csv") == 1 + 5);
  CHECK(Slurp(d1 / "train.csv").find("\n4,") != std::string::npos);

  Trainer other(cfg, &task, "different", testing::TempDir("trainer_d"));
  CHECK_THROWS(other.Resume(d1 / "checkpoint_last.json"));
}

TEST_CASE("policy snapshots load from checkpoints") {
  Task task = SmallTask(40);
  auto dir = testing::TempDir("trainer_policy");
  Trainer t(SmallConfig(), &task, "h", dir);
  t.Run();
  std::string hash;
  PolicySnapshot p = LoadPolicy(dir / "checkpoint_last.json", &hash);
  CHECK(hash == "h");
  CHECK(p.ac.actor.params() == t.policy().actor.params());
  VecX obs = VecX::Constant(ObservationDim(8, 3), 0.1);
  CHECK(p.MeanAction(obs) == t.Snapshot().MeanAction(obs));
}

TEST_CASE("mode names and config validation") {
  for (CurriculumMode m : {CurriculumMode::kNone, CurriculumMode::kDexMachina,
                           CurriculumMode::kBaselineSchedule}) {
    CHECK(ParseCurriculumMode(CurriculumModeName(m)) == m);
  }
  TrainConfig cfg;
  cfg.n_envs = 0;
  CHECK_THROWS(cfg.Validate());
  cfg = {};
  cfg.ppo.clip = 0.0;
  CHECK_THROWS(cfg.Validate());
}

}  // namespace
}  // namespace dexc
