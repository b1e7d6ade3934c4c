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

#include "dexc/pipeline.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <utility>

#include "dexc/error.h"

namespace dexc {
namespace {

void RequireFile(const std::filesystem::path& path, const std::string& what) {
  if (!std::filesystem::is_regular_file(path)) {
    throw InvalidArgument(what + " not found: " + path.string());
  }
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

Assets LoadAssets(const RunConfig& cfg) {
  Assets a;
  if (cfg.object_asset.empty()) {
    a.object = ToyBoxObject();
  } else {
    RequireFile(cfg.object_asset, "object asset");
    a.object = LoadObjectModel(cfg.object_asset);
  }
  if (cfg.hand_asset.empty()) {
    a.hands = ToyHandPair();
  } else {
    RequireFile(cfg.hand_asset, "hand asset");
    a.hands = HandPair(LoadHandModel(cfg.hand_asset));
  }
  return a;
}

Task LoadTask(const std::filesystem::path& demo, const Assets& assets) {
  RequireFile(demo, "demo");
  const std::filesystem::path retarget = RetargetPath(demo);
  const std::filesystem::path contacts = ContactsPath(demo);
  RequireFile(retarget, "preprocessing artifact (run prep first)");
  RequireFile(contacts, "preprocessing artifact (run prep first)");
  Task task;
  task.object = assets.object;
  task.hands = assets.hands;
  DemoClip clip = LoadDemo(demo);
  RetargetResult replay = LoadRetarget(retarget);
  if (static_cast<int>(replay.hands[0].joints.size()) != clip.num_frames()) {
    throw SchemaError(retarget.string() + ": frame count differs from the demo");
  }
  task.clip = ApplyRetarget(clip, replay);
  task.contacts = LoadContacts(contacts);
  if (task.contacts[0].num_frames != clip.num_frames()) {
    throw SchemaError(contacts.string() + ": frame count differs from the demo");
  }
  return task;
}

Task BuildTask(const RunConfig& cfg) {
  Assets assets = LoadAssets(cfg);
  if (!cfg.demo.empty()) return LoadTask(cfg.demo, assets);
  DemoClip raw = GenerateDemo(ParseDemoScript(cfg.script), assets.object,
                              assets.hands, cfg.frames, cfg.dt);
  return PrepareTask(assets.object, assets.hands, raw, cfg.train.env.sim,
                     cfg.prep);
}

std::string PrepHash(const RunConfig& cfg) {
  std::string canonical = CanonicalConfig(cfg);
  std::string text;
  size_t pos = 0;
  std::string section;
  while (pos < canonical.size()) {
    size_t end = canonical.find('\n', pos);
    std::string line = canonical.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.front() == '[') section = line;
    if (section == "[prep]" || section == "[sim]" || section == "[assets]") {
      text += line + "\n";
    }
  }
  return Fnv1aHex(text);
}

PrepSummary RunPrep(const std::filesystem::path& demo, const RunConfig& cfg) {
  Assets assets = LoadAssets(cfg);
  RequireFile(demo, "demo");
  DemoClip clip = LoadDemo(demo);
  Simulator sim(assets.object, assets.hands, cfg.train.env.sim);
  RetargetResult replay = ReplayRetarget(clip, sim, cfg.prep.settle_steps);
  DemoClip achieved = ApplyRetarget(clip, replay);
  std::array<ContactAnnotation, kNumHands> contacts;
  for (int h = 0; h < kNumHands; ++h) {
    contacts[h] = ApproximateContacts(achieved, assets.object, assets.hands[h], h,
                                      cfg.prep.gamma, cfg.prep.max_contacts,
                                      cfg.prep.d_max);
  }
  const std::string hash = PrepHash(cfg);
  PrepSummary s;
  s.retarget_path = RetargetPath(demo);
  s.contacts_path = ContactsPath(demo);
  s.max_penetration = replay.max_penetration;
  SaveRetarget(replay, s.retarget_path, hash);
  SaveContacts(contacts, s.contacts_path, hash);
  return s;
}

std::filesystem::path RunTrain(const RunConfig& cfg, const Task& task,
                               const std::filesystem::path& out_dir,
                               const std::filesystem::path& resume) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "config.toml", std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write " + (out_dir / "config.toml").string());
    out << CanonicalConfig(cfg);
  }
  Trainer trainer(cfg.train, &task, ConfigHash(cfg), out_dir);
  if (!resume.empty()) {
    RequireFile(resume, "checkpoint");
    trainer.Resume(resume);
  }
  trainer.Run();
  std::filesystem::path best = out_dir / "checkpoint_best.json";
  if (std::filesystem::exists(best)) return best;
  return out_dir / "checkpoint_last.json";
}

EvalReport RunEval(const RunConfig& cfg, const Task& task, EvalMode mode,
                   const std::filesystem::path& checkpoint,
                   const std::filesystem::path& out_dir) {
  PolicySnapshot policy;
  const PolicySnapshot* policy_ptr = nullptr;
  if (mode == EvalMode::kPolicy) {
    if (checkpoint.empty()) {
      throw InvalidArgument("policy evaluation needs --checkpoint");
    }
    RequireFile(checkpoint, "checkpoint");
    policy = LoadPolicy(checkpoint);
    policy_ptr = &policy;
  }
  VirtualGains gains;
  if (mode == EvalMode::kControllerOnly) {
    gains.kp = cfg.train.gains.kp;
    gains.kv = cfg.train.gains.kv > 0.0
                   ? cfg.train.gains.kv
                   : CriticalDamping(gains.kp, task.object.TotalMass());
  }
  EvalReport report =
      Evaluate(mode, policy_ptr, task, cfg.train.env, cfg.eval, gains);
  report.method = mode == EvalMode::kPolicy ? cfg.MethodName()
                                            : std::string(EvalModeName(mode));
  report.config_hash = ConfigHash(cfg);
  report.reward_hash = RewardHash(cfg);
  std::filesystem::create_directories(out_dir);
  SaveReport(report, out_dir / "report.json");
  std::ofstream csv(out_dir / "summary.csv", std::ios::trunc);
  csv << SummaryCsvHeader() << "\n" << SummaryCsvRow(report) << "\n";
  return report;
}

std::vector<EvalReport> CollectReports(
    const std::vector<std::filesystem::path>& inputs) {
  std::vector<std::filesystem::path> files;
  for (const auto& in : inputs) {
    if (std::filesystem::is_regular_file(in)) {
      files.push_back(in);
    } else if (std::filesystem::is_directory(in)) {
      for (const auto& entry : std::filesystem::recursive_directory_iterator(in)) {
        if (entry.is_regular_file() && entry.path().filename() == "report.json") {
          files.push_back(entry.path());
        }
      }
    } else {
      throw InvalidArgument("report input not found: " + in.string());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<EvalReport> reports;
  for (const auto& f : files) reports.push_back(LoadReport(f));
  return reports;
}

std::vector<ReportRow> AggregateReports(const std::vector<EvalReport>& reports,
                                        bool allow_mixed) {
  if (reports.empty()) throw InvalidArgument("no reports to aggregate");
  std::set<std::string> reward_hashes;
  for (const EvalReport& r : reports) reward_hashes.insert(r.reward_hash);
  if (reward_hashes.size() > 1 && !allow_mixed) {
    throw InvalidArgument(
        "reports use different reward configs; pass --allow-mixed to combine");
  }
  std::map<std::pair<std::string, std::string>, std::vector<const EvalReport*>>
      groups;
  for (const EvalReport& r : reports) groups[{r.method, r.task}].push_back(&r);
  std::vector<ReportRow> rows;
  for (const auto& [key, members] : groups) {
    ReportRow row;
    row.method = key.first;
    row.task = key.second;
    row.n = static_cast<int>(members.size());
    for (const EvalReport* r : members) {
      row.mean_auc += r->auc / row.n;
      row.mean_completion += r->completion / row.n;
    }
    double var = 0.0;
    for (const EvalReport* r : members) {
      var += (r->auc - row.mean_auc) * (r->auc - row.mean_auc);
    }
    row.std_auc = row.n > 1 ? std::sqrt(var / (row.n - 1)) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

std::string ReportCsv(const std::vector<ReportRow>& rows) {
  std::string out = "method,task,n,mean_auc,std_auc,mean_completion\n";
  for (const ReportRow& r : rows) {
    out += r.method + "," + r.task + "," + std::to_string(r.n) + "," +
           Num(r.mean_auc) + "," + Num(r.std_auc) + "," +
           Num(r.mean_completion) + "\n";
  }
  return out;
}

}  // namespace dexc
