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

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dexc/demo.h"
#include "dexc/error.h"
#include "dexc/pipeline.h"
#include "json.hpp"
#include "test_util.h"

namespace dexc {
namespace {

std::string Slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST_CASE("prep is idempotent and records its parameters") {
  auto dir = testing::TempDir("pipeline_prep");
  DemoClip clip = GenerateDemo(DemoScript::kLift, ToyBoxObject(), ToyHandPair(), 40, 0.02);
  SaveDemo(clip, dir / "d.json");
  RunConfig cfg = ParseRunConfig("", {{"prep.gamma", "0.015"}});
  PrepSummary a = RunPrep(dir / "d.json", cfg);
  const std::string c1 = Slurp(a.contacts_path), r1 = Slurp(a.retarget_path);
  RunPrep(dir / "d.json", cfg);
  CHECK(Slurp(a.contacts_path) == c1);
  CHECK(Slurp(a.retarget_path) == r1);
  nlohmann::json j = nlohmann::json::parse(c1);
  CHECK(j["gamma"].get<double>() == 0.015);
  CHECK(j.contains("config_hash"));
  RunConfig missing = ParseRunConfig("", {{"assets.hand", (dir / "nope.json").string()}});
  try {
    RunPrep(dir / "d.json", missing);
    FAIL("expected an error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("nope.json") != std::string::npos);
  }
}

TEST_CASE("tasks need preprocessing artifacts") {
  auto dir = testing::TempDir("pipeline_task");
  DemoClip clip = GenerateDemo(DemoScript::kLift, ToyBoxObject(), ToyHandPair(), 30, 0.02);
  SaveDemo(clip, dir / "d.json");
  RunConfig cfg = ParseRunConfig("", {{"task.demo", (dir / "d.json").string()}});
  try {
    BuildTask(cfg);
    FAIL("expected an error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("preprocessing artifact") != std::string::npos);
  }
  RunPrep(dir / "d.json", cfg);
  Task from_files = BuildTask(cfg);
  RunConfig scripted = ParseRunConfig("", {{"task.script", "lift"}, {"task.frames", "30"}});
  Task in_memory = BuildTask(scripted);
  CHECK(from_files.clip.num_frames() == 30);
  for (int t = 0; t < 30; ++t) {
    CHECK((from_files.clip.hands[0].joints[t] - in_memory.clip.hands[0].joints[t]).norm() <= 1e-12);
  }
  CHECK(from_files.contacts[1].mask == in_memory.contacts[1].mask);
}

EvalReport FakeReport(const std::string& method, double auc, const std::string& reward_hash) {
  EvalReport r;
  r.method = method;
  r.task = "lift-open-close";
  r.auc = auc;
  r.completion = 1.0;
  r.reward_hash = reward_hash;
  return r;
}

TEST_CASE("report groups by method and task") {
  std::vector<EvalReport> reports = {
      FakeReport("dexmachina", 0.6, "r"), FakeReport("dexmachina", 0.7, "r"),
      FakeReport("dexmachina", 0.8, "r"), FakeReport("none", 0.3, "r")};
  auto rows = AggregateReports(reports, false);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].method == "dexmachina");
  CHECK(rows[0].n == 3);
  CHECK(rows[0].mean_auc == doctest::Approx(0.7));
  CHECK(rows[0].std_auc == doctest::Approx(0.1));
  CHECK(rows[1].n == 1);
  CHECK(rows[1].std_auc == 0.0);
  reports.push_back(FakeReport("none", 0.4, "other"));
  CHECK_THROWS_AS(AggregateReports(reports, false), InvalidArgument);
  CHECK(AggregateReports(reports, true)[1].n == 2);
  CHECK(ReportCsv(rows).rfind("method,task,n,mean_auc,std_auc", 0) == 0);
}

TEST_CASE("collect reports walks directories") {
  auto dir = testing::TempDir("pipeline_collect");
  for (int seed = 0; seed < 3; ++seed) {
    auto sub = dir / ("seed" + std::to_string(seed)) / "eval";
    std::filesystem::create_directories(sub);
    SaveReport(FakeReport("dexmachina", 0.5 + 0.1 * seed, "r"), sub / "report.json");
  }
  auto reports = CollectReports({dir});
  CHECK(reports.size() == 3);
  CHECK_THROWS(CollectReports({dir / "missing"}));
}

}  // namespace
}  // namespace dexc
