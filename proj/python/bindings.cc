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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dexc/config.h"
#include "dexc/demo.h"
#include "dexc/error.h"
#include "dexc/eval.h"
#include "dexc/models.h"
#include "dexc/pipeline.h"
#include "dexc/rewards.h"

namespace py = pybind11;

namespace dexc {
using Path = std::filesystem::path;
}  // namespace dexc

namespace dexc {
namespace {

// Quaternions cross the boundary as (w, x, y, z).
Quat ToQuat(const std::array<double, 4>& q) { return Quat(q[0], q[1], q[2], q[3]); }

ObjectState ToState(const std::array<double, 3>& position,
                    const std::array<double, 4>& rotation, double angle) {
  return ObjectState{Vec3(position[0], position[1], position[2]), ToQuat(rotation),
                     angle};
}

py::object Finite(double v) {
  return std::isfinite(v) ? py::object(py::float_(v)) : py::object(py::none());
}

py::dict ReportDict(const EvalReport& r) {
  py::dict d;
  d["method"] = r.method;
  d["task"] = r.task;
  d["mode"] = r.mode;
  d["seed"] = r.seed;
  d["config_hash"] = r.config_hash;
  d["reward_hash"] = r.reward_hash;
  d["add_auc"] = r.auc;
  d["completion"] = r.completion;
  d["max_applied_kp"] = r.max_applied_kp;
  py::list episodes;
  for (const EpisodeEval& e : r.episodes) {
    py::list series;
    for (double v : e.avg_add) series.append(Finite(v));
    py::dict ep;
    ep["auc"] = e.auc;
    ep["terminated"] = e.terminated;
    ep["avg_add"] = series;
    episodes.append(ep);
  }
  d["episodes"] = episodes;
  return d;
}

RunConfig Config(const std::string& text, const ConfigOverrides& overrides) {
  return ParseRunConfig(text, overrides);
}

}  // namespace
}  // namespace dexc

PYBIND11_MODULE(_dexc, m) {
  using namespace dexc;
  m.doc() = "Functional retargeting of bimanual demonstrations.";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", error.ptr());
  py::register_exception<SchemaError>(m, "SchemaError", error.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", error.ptr());

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init([](const std::string& text, const ConfigOverrides& overrides) {
             return Config(text, overrides);
           }),
           py::arg("text") = "", py::arg("overrides") = ConfigOverrides{})
      .def_static("load", &LoadRunConfig, py::arg("path"),
                  py::arg("overrides") = ConfigOverrides{})
      .def("canonical", &CanonicalConfig)
      .def("hash", &ConfigHash)
      .def("reward_hash", &RewardHash)
      .def_property_readonly("method", &RunConfig::MethodName)
      .def_readonly("script", &RunConfig::script)
      .def_readonly("frames", &RunConfig::frames)
      .def_readonly("dt", &RunConfig::dt);

  m.def("rot_distance",
        [](const std::array<double, 4>& a, const std::array<double, 4>& b) {
          return RotDistance(ToQuat(a), ToQuat(b));
        },
        py::arg("q1"), py::arg("q2"));

  m.def("task_reward",
        [](const std::array<double, 3>& pos, const std::array<double, 4>& rot, double angle,
           const std::array<double, 3>& target_pos, const std::array<double, 4>& target_rot,
           double target_angle, const RunConfig& cfg) {
          TaskRewardTerms t = TaskReward(ToState(pos, rot, angle),
                                         ToState(target_pos, target_rot, target_angle),
                                         cfg.train.env.reward);
          py::dict d;
          d["r_task"] = t.r_task;
          d["r_pos"] = t.r_pos;
          d["r_rot"] = t.r_rot;
          d["r_angle"] = t.r_angle;
          d["d_pos"] = t.d_pos;
          d["d_rot"] = t.d_rot;
          d["d_ang"] = t.d_ang;
          return d;
        },
        py::arg("position"), py::arg("rotation"), py::arg("angle"),
        py::arg("target_position"), py::arg("target_rotation"), py::arg("target_angle"),
        py::arg("config") = RunConfig{});

  m.def("add_auc",
        [](const std::vector<double>& series, double max_threshold, int n_thresholds) {
          return AddAuc(series, max_threshold, n_thresholds);
        },
        py::arg("series"), py::arg("max_threshold") = 0.10, py::arg("n_thresholds") = 100);
  m.def("auc_thresholds", &AucThresholds, py::arg("max_threshold") = 0.10,
        py::arg("n_thresholds") = 100);

  m.def("generate_demo",
        [](const std::string& script, int frames, double dt,
           const std::filesystem::path& out) {
          DemoClip clip = GenerateDemo(ParseDemoScript(script), ToyBoxObject(),
                                       ToyHandPair(), frames, dt);
          SaveDemo(clip, out);
          return clip.num_frames();
        },
        py::arg("script"), py::arg("frames"), py::arg("dt"), py::arg("out"),
        "Writes a scripted demonstration and returns its frame count.");

  m.def("prep",
        [](const std::filesystem::path& demo, const RunConfig& cfg) {
          PrepSummary s = RunPrep(demo, cfg);
          py::dict d;
          d["retarget"] = s.retarget_path;
          d["contacts"] = s.contacts_path;
          d["max_penetration"] = s.max_penetration;
          return d;
        },
        py::arg("demo"), py::arg("config") = RunConfig{});

  m.def("train",
        [](const RunConfig& cfg, const std::filesystem::path& out_dir,
           const std::optional<std::filesystem::path>& resume) {
          py::gil_scoped_release release;
          return RunTrain(cfg, BuildTask(cfg), out_dir, resume.value_or(Path{}));
        },
        py::arg("config"), py::arg("out_dir"), py::arg("resume") = py::none(),
        "Trains a policy and returns the checkpoint to evaluate.");

  m.def("evaluate",
        [](const RunConfig& cfg, const std::string& mode, const std::filesystem::path& out_dir,
           const std::optional<std::filesystem::path>& checkpoint) {
          EvalReport r;
          {
            py::gil_scoped_release release;
            r = RunEval(cfg, BuildTask(cfg), ParseEvalMode(mode), checkpoint.value_or(Path{}),
                        out_dir);
          }
          return ReportDict(r);
        },
        py::arg("config"), py::arg("mode"), py::arg("out_dir"),
        py::arg("checkpoint") = py::none());

  m.def("load_report", [](const std::filesystem::path& p) { return ReportDict(LoadReport(p)); },
        py::arg("path"));

  m.def("aggregate",
        [](const std::vector<std::filesystem::path>& inputs, bool allow_mixed) {
          py::list rows;
          for (const ReportRow& r : AggregateReports(CollectReports(inputs), allow_mixed)) {
            py::dict d;
            d["method"] = r.method;
            d["task"] = r.task;
            d["n"] = r.n;
            d["mean_auc"] = r.mean_auc;
            d["std_auc"] = r.std_auc;
            d["mean_completion"] = r.mean_completion;
            rows.append(d);
          }
          return rows;
        },
        py::arg("inputs"), py::arg("allow_mixed") = false);
}
