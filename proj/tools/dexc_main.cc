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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dexc/config.h"
#include "dexc/demo.h"
#include "dexc/error.h"
#include "dexc/eval.h"
#include "dexc/models.h"
#include "dexc/pipeline.h"

namespace fs = std::filesystem;

namespace {

using dexc::RunConfig;

struct CommonFlags {
  std::string config;
  std::vector<std::string> sets;
};

void AddCommon(CLI::App* cmd, CommonFlags* flags) {
  cmd->add_option("--config", flags->config, "Run config file");
  cmd->add_option("--set", flags->sets, "Override, section.key=value")
      ->take_all();
}

RunConfig ResolveConfig(const CommonFlags& flags,
                        dexc::ConfigOverrides extra = {},
                        const fs::path& fallback_config = {}) {
  dexc::ConfigOverrides overrides;
  for (const std::string& s : flags.sets) {
    overrides.push_back(dexc::ParseOverride(s));
  }
  overrides.insert(overrides.end(), extra.begin(), extra.end());
  if (!flags.config.empty()) return dexc::LoadRunConfig(flags.config, overrides);
  if (!fallback_config.empty() && fs::exists(fallback_config)) {
    return dexc::LoadRunConfig(fallback_config, overrides);
  }
  return dexc::ParseRunConfig("", overrides);
}

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bimanual functional retargeting with a decaying virtual "
               "object controller"};
  app.require_subcommand(1);

  // gen-demo
  CLI::App* gen = app.add_subcommand("gen-demo", "Write a scripted demo clip");
  std::string gen_script;
  int gen_frames = 300;
  double gen_dt = 0.02;
  std::string gen_out;
  bool gen_force = false;
  std::string gen_object, gen_hand;
  gen->add_option("--script", gen_script,
                  "lift | lift-open-close | lift-reorient-open")
      ->required();
  gen->add_option("--frames", gen_frames, "Frame count T")
      ->check(CLI::PositiveNumber);
  gen->add_option("--dt", gen_dt, "Frame interval in seconds")
      ->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out, "Output demo JSON");
  gen->add_option("--object", gen_object, "Object asset JSON");
  gen->add_option("--hand", gen_hand, "Left hand asset JSON");
  gen->add_flag("--force", gen_force, "Overwrite an existing file");

  // prep
  CLI::App* prep = app.add_subcommand("prep", "Replay and contact sidecars");
  CommonFlags prep_flags;
  std::string prep_demo;
  std::string prep_object, prep_hand;
  std::optional<double> prep_gamma, prep_dmax;
  std::optional<int> prep_nc;
  AddCommon(prep, &prep_flags);
  prep->add_option("--demo", prep_demo, "Demo JSON")->required();
  prep->add_option("--object", prep_object, "Object asset JSON");
  prep->add_option("--hand", prep_hand, "Left hand asset JSON");
  prep->add_option("--gamma", prep_gamma, "Contact proximity in meters");
  prep->add_option("--n-c", prep_nc, "Contacts kept per pair");
  prep->add_option("--d-max", prep_dmax, "Mismatch distance in meters");

  // train
  CLI::App* train = app.add_subcommand("train", "Train a policy");
  CommonFlags train_flags;
  std::optional<int> train_seed;
  std::string train_out, train_resume;
  AddCommon(train, &train_flags);
  train->add_option("--seed", train_seed, "Seed");
  train->add_option("--out", train_out, "Run directory");
  train->add_option("--resume", train_resume, "Checkpoint to resume from");

  // eval
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a policy or baseline");
  CommonFlags eval_flags;
  std::string eval_mode = "policy";
  std::string eval_ckpt, eval_out, eval_method;
  std::optional<int> eval_episodes, eval_seed;
  AddCommon(eval, &eval_flags);
  eval->add_option("--mode", eval_mode,
                   "policy | kinematics-only | controller-only");
  eval->add_option("--checkpoint", eval_ckpt, "Policy checkpoint");
  eval->add_option("--episodes", eval_episodes, "Episode count");
  eval->add_option("--seed", eval_seed, "Seed");
  eval->add_option("--method", eval_method, "Method label in the report");
  eval->add_option("--out", eval_out, "Report directory");

  // report
  CLI::App* report = app.add_subcommand("report", "Aggregate eval reports");
  std::vector<std::string> report_inputs;
  std::string report_out;
  bool allow_mixed = false;
  report->add_option("inputs", report_inputs, "report.json files or dirs")
      ->required();
  report->add_option("--out", report_out, "Aggregated CSV path");
  report->add_flag("--allow-mixed", allow_mixed,
                   "Combine reports with different reward configs");

  // export-assets
  CLI::App* assets = app.add_subcommand("export-assets",
                                        "Write the built-in toy box and hand");
  std::string assets_out = "assets";
  assets->add_option("--out", assets_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  }

  try {
    if (gen->parsed()) {
      RunConfig cfg;
      cfg.object_asset = gen_object;
      cfg.hand_asset = gen_hand;
      dexc::Assets assets = dexc::LoadAssets(cfg);
      const dexc::DemoScript script = dexc::ParseDemoScript(gen_script);
      fs::path out = gen_out.empty()
                         ? dexc::OutputRoot(".") / (gen_script + ".demo.json")
                         : fs::path(gen_out);
      if (fs::exists(out) && !gen_force) {
        throw dexc::InvalidArgument(out.string() +
                                    " exists; pass --force to overwrite");
      }
      dexc::DemoClip clip = dexc::GenerateDemo(script, assets.object,
                                               assets.hands, gen_frames, gen_dt);
      if (out.has_parent_path()) fs::create_directories(out.parent_path());
      dexc::SaveDemo(clip, out);
      std::cout << "T=" << clip.num_frames() << " dt=" << clip.dt
                << " script=" << dexc::DemoScriptName(script) << " -> "
                << out.string() << "\n";
    } else if (prep->parsed()) {
      dexc::ConfigOverrides extra;
      if (!prep_object.empty()) extra.push_back({"assets.object", prep_object});
      if (!prep_hand.empty()) extra.push_back({"assets.hand", prep_hand});
      if (prep_gamma) extra.push_back({"prep.gamma", std::to_string(*prep_gamma)});
      if (prep_nc) extra.push_back({"prep.n_c", std::to_string(*prep_nc)});
      if (prep_dmax) extra.push_back({"prep.d_max", std::to_string(*prep_dmax)});
      RunConfig cfg = ResolveConfig(prep_flags, extra);
      dexc::PrepSummary s = dexc::RunPrep(prep_demo, cfg);
      std::cout << "max_penetration=" << s.max_penetration << " -> "
                << s.retarget_path.string() << ", " << s.contacts_path.string()
                << "\n";
    } else if (train->parsed()) {
      dexc::ConfigOverrides extra;
      if (train_seed) extra.push_back({"run.seed", std::to_string(*train_seed)});
      RunConfig cfg = ResolveConfig(train_flags, extra);
      fs::path out = train_out.empty()
                         ? dexc::OutputRoot(cfg.output) /
                               (cfg.MethodName() + "_seed" +
                                std::to_string(cfg.train.seed))
                         : fs::path(train_out);
      dexc::Task task = dexc::BuildTask(cfg);
      fs::path ckpt = dexc::RunTrain(cfg, task, out, train_resume);
      std::cout << "checkpoint=" << ckpt.string() << "\n";
    } else if (eval->parsed()) {
      const dexc::EvalMode mode = dexc::ParseEvalMode(eval_mode);
      dexc::ConfigOverrides extra;
      if (eval_seed) extra.push_back({"eval.seed", std::to_string(*eval_seed)});
      if (eval_episodes) {
        extra.push_back({"eval.n_episodes", std::to_string(*eval_episodes)});
      }
      if (!eval_method.empty()) extra.push_back({"run.method", eval_method});
      fs::path run_config;
      if (!eval_ckpt.empty()) {
        run_config = fs::path(eval_ckpt).parent_path() / "config.toml";
      }
      RunConfig cfg = ResolveConfig(eval_flags, extra, run_config);
      fs::path out;
      if (!eval_out.empty()) {
        out = eval_out;
      } else if (!eval_ckpt.empty()) {
        out = fs::path(eval_ckpt).parent_path() / "eval";
      } else {
        out = dexc::OutputRoot(cfg.output) /
              (std::string(dexc::EvalModeName(mode)) + "_seed" +
               std::to_string(cfg.eval.seed));
      }
      dexc::Task task = dexc::BuildTask(cfg);
      dexc::EvalReport r = dexc::RunEval(cfg, task, mode, eval_ckpt, out);
      std::cout << "method=" << r.method << " add_auc=" << Fixed(r.auc)
                << " completion=" << Fixed(r.completion) << " -> "
                << (out / "report.json").string() << "\n";
    } else if (assets->parsed()) {
      fs::path dir(assets_out);
      fs::create_directories(dir);
      dexc::SaveObjectModel(dexc::ToyBoxObject(), dir / "toy_box.json");
      dexc::SaveHandModel(dexc::ToyHandPair()[0], dir / "toy_hand.json");
      std::cout << "wrote " << (dir / "toy_box.json").string() << ", "
                << (dir / "toy_hand.json").string() << "\n";
    } else if (report->parsed()) {
      std::vector<fs::path> inputs(report_inputs.begin(), report_inputs.end());
      auto rows = dexc::AggregateReports(dexc::CollectReports(inputs),
                                         allow_mixed);
      for (const dexc::ReportRow& row : rows) {
        std::cout << row.method << " " << row.task << ": AUC "
                  << Fixed(row.mean_auc) << " +- " << Fixed(row.std_auc)
                  << " (n=" << row.n << ")\n";
      }
      if (!report_out.empty()) {
        fs::path out(report_out);
        if (out.has_parent_path()) fs::create_directories(out.parent_path());
        std::ofstream f(out, std::ios::trunc);
        if (!f) throw dexc::InvalidArgument("cannot write " + out.string());
        f << dexc::ReportCsv(rows);
      }
    }
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (char& c : msg) {
      if (c == '\n') c = ' ';
    }
    std::cerr << "error: " << msg << "\n";
    return 1;
  }
  return 0;
}
