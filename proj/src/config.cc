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

#include "dexc/config.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "dexc/error.h"

namespace dexc {
namespace {

struct Field {
  std::string key;
  std::function<void(const std::string&)> set;
  std::function<std::string()> get;
};

std::string Trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double ToDouble(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::logic_error&) {
  }
  throw InvalidArgument("config key " + key + ": '" + v + "' is not a number");
}

long ToLong(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    long n = std::stol(v, &used);
    if (used == v.size()) return n;
  } catch (const std::logic_error&) {
  }
  throw InvalidArgument("config key " + key + ": '" + v + "' is not an integer");
}

bool ToBool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw InvalidArgument("config key " + key + ": '" + v + "' is not a boolean");
}

std::string Unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    return v.substr(1, v.size() - 2);
  }
  return v;
}

std::string Quote(const std::string& v) { return "\"" + v + "\""; }

std::vector<int> ToIntList(const std::string& key, const std::string& v) {
  std::string s = v;
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') {
    s = s.substr(1, s.size() - 2);
  }
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(static_cast<int>(ToLong(key, item)));
  }
  if (out.empty()) throw InvalidArgument("config key " + key + " is empty");
  return out;
}

std::string FormatIntList(const std::vector<int>& v) {
  std::string s = "[";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i > 0) s += ", ";
    s += std::to_string(v[i]);
  }
  return s + "]";
}

Field Real(std::string key, double* p) {
  return {key, [key, p](const std::string& v) { *p = ToDouble(key, v); },
          [p] { return FormatDouble(*p); }};
}
Field Int(std::string key, int* p) {
  return {key,
          [key, p](const std::string& v) { *p = static_cast<int>(ToLong(key, v)); },
          [p] { return std::to_string(*p); }};
}
Field Long(std::string key, long* p) {
  return {key, [key, p](const std::string& v) { *p = ToLong(key, v); },
          [p] { return std::to_string(*p); }};
}
Field Text(std::string key, std::string* p) {
  return {key, [p](const std::string& v) { *p = Unquote(v); },
          [p] { return Quote(*p); }};
}

std::vector<Field> Fields(RunConfig* c) {
  TrainConfig& t = c->train;
  EnvConfig& e = t.env;
  SimParams& s = e.sim;
  RewardConfig& r = e.reward;
  CurriculumConfig& g = t.gains;
  std::vector<Field> f = {
      Text("task.script", &c->script),
      Int("task.frames", &c->frames),
      Real("task.dt", &c->dt),
      Text("task.demo", &c->demo),
      Text("assets.object", &c->object_asset),
      Text("assets.hand", &c->hand_asset),
      Real("sim.control_dt", &s.control_dt),
      Int("sim.substeps", &s.substeps),
      {"sim.gravity_z", [&s](const std::string& v) { s.gravity.z() = ToDouble("sim.gravity_z", v); },
       [&s] { return FormatDouble(s.gravity.z()); }},
      Real("sim.friction", &s.friction),
      Real("sim.contact_stiffness", &s.contact_stiffness),
      Real("sim.contact_damping", &s.contact_damping),
      {"sim.ground", [&s](const std::string& v) { s.ground_enabled = ToBool("sim.ground", v); },
       [&s] { return std::string(s.ground_enabled ? "true" : "false"); }},
      Real("sim.rotation_gain_ratio", &s.rotation_gain_ratio),
      Real("sim.virtual_force_cap", &s.virtual_force_cap),
      Real("sim.velocity_limit", &s.velocity_limit),
      Real("prep.gamma", &c->prep.gamma),
      Int("prep.n_c", &c->prep.max_contacts),
      Real("prep.d_max", &c->prep.d_max),
      Int("prep.settle_steps", &c->prep.settle_steps),
      {"action.mode",
       [&e](const std::string& v) { e.action.mode = ParseActionMode(Unquote(v)); },
       [&e] { return Quote(std::string(ActionModeName(e.action.mode))); }},
      Real("action.s_t", &e.action.translation_scale),
      Real("action.s_r", &e.action.rotation_scale),
      Real("reward.beta_pos", &r.beta_pos),
      Real("reward.beta_rot", &r.beta_rot),
      Real("reward.beta_ang", &r.beta_ang),
      Real("reward.beta_imi", &r.beta_imi),
      Real("reward.beta_bc", &r.beta_bc),
      Real("reward.beta_con", &r.beta_con),
      Real("reward.lambda_task", &r.lambda_task),
      Real("reward.lambda_imi", &r.lambda_imi),
      Real("reward.lambda_bc", &r.lambda_bc),
      Real("reward.lambda_con", &r.lambda_con),
      {"curriculum.mode",
       [&t](const std::string& v) { t.curriculum = ParseCurriculumMode(Unquote(v)); },
       [&t] { return Quote(std::string(CurriculumModeName(t.curriculum))); }},
      Real("curriculum.kp", &g.kp),
      Real("curriculum.kv", &g.kv),
      Real("curriculum.phi_p", &g.phi_p),
      Real("curriculum.phi_v", &g.phi_v),
      Real("curriculum.sigma_task", &g.thresholds[kTermTask]),
      Real("curriculum.sigma_imi", &g.thresholds[kTermImi]),
      Real("curriculum.sigma_bc", &g.thresholds[kTermBc]),
      Real("curriculum.sigma_con", &g.thresholds[kTermCon]),
      Int("curriculum.window", &g.window),
      Real("curriculum.zero_threshold", &g.zero_threshold),
      Long("curriculum.schedule_iterations", &t.schedule_iterations),
      Long("curriculum.schedule_interval", &t.schedule_interval),
      Int("train.n_envs", &t.n_envs),
      Int("train.horizon", &t.horizon),
      Long("train.max_iterations", &t.max_iterations),
      {"train.hidden", [&t](const std::string& v) { t.hidden = ToIntList("train.hidden", v); },
       [&t] { return FormatIntList(t.hidden); }},
      Real("train.init_log_std", &t.init_log_std),
      Int("train.epochs", &t.ppo.epochs),
      Int("train.minibatches", &t.ppo.minibatches),
      Real("train.clip", &t.ppo.clip),
      Real("train.gamma", &t.ppo.gamma),
      Real("train.lambda", &t.ppo.lambda),
      Real("train.actor_lr", &t.ppo.actor_learning_rate),
      Real("train.critic_lr", &t.ppo.critic_learning_rate),
      Real("train.entropy_coef", &t.ppo.entropy_coef),
      Real("train.max_grad_norm", &t.ppo.max_grad_norm),
      Real("train.value_scale", &t.ppo.value_scale),
      Real("train.early_position", &e.early_position),
      Real("train.early_rotation", &e.early_rotation),
      Real("train.force_scale", &e.force_scale),
      Real("train.reset_noise", &e.reset_noise),
      Int("train.best_window", &t.best_window),
      Long("train.checkpoint_interval", &t.checkpoint_interval),
      Int("eval.n_episodes", &c->eval.n_episodes),
      Real("eval.max_threshold", &c->eval.max_threshold),
      Int("eval.n_thresholds", &c->eval.n_thresholds),
      {"run.seed",
       [c](const std::string& v) {
         long seed = ToLong("run.seed", v);
         if (seed < 0) throw InvalidArgument("run.seed must be >= 0");
         c->train.seed = static_cast<uint64_t>(seed);
         c->eval.seed = c->train.seed;
       },
       [c] { return std::to_string(c->train.seed); }},
      Text("run.output", &c->output),
      Text("run.method", &c->method),
  };
  return f;
}

void Apply(RunConfig* cfg, const std::string& key, const std::string& value) {
  for (Field& f : Fields(cfg)) {
    if (f.key == key) {
      f.set(value);
      return;
    }
  }
  throw InvalidArgument("unknown config key '" + key + "'");
}

void Validate(const RunConfig& c) {
  if (c.demo.empty()) ParseDemoScript(c.script);
  if (c.frames < 2) throw InvalidArgument("task.frames must be >= 2");
  if (!(c.dt > 0.0)) throw InvalidArgument("task.dt must be positive");
  if (!(c.prep.gamma > 0.0) || c.prep.max_contacts < 1 ||
      !(c.prep.d_max > 0.0) || c.prep.settle_steps < 1) {
    throw InvalidArgument("prep parameters must be positive");
  }
  c.train.Validate();
  c.eval.Validate();
}

}  // namespace

std::string RunConfig::MethodName() const {
  return method.empty() ? std::string(CurriculumModeName(train.curriculum))
                        : method;
}

std::pair<std::string, std::string> ParseOverride(std::string_view arg) {
  size_t eq = arg.find('=');
  const size_t dot = arg.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos ||
      dot == 0 || dot + 1 >= eq) {
    throw InvalidArgument("override '" + std::string(arg) +
                          "' is not of the form section.key=value");
  }
  return {Trim(arg.substr(0, eq)), Trim(arg.substr(eq + 1))};
}

RunConfig ParseRunConfig(std::string_view text,
                         const ConfigOverrides& overrides) {
  RunConfig cfg;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string body = line;
    bool quoted = false;
    for (size_t i = 0; i < body.size(); ++i) {
      if (body[i] == '"') quoted = !quoted;
      if (body[i] == '#' && !quoted) {
        body.resize(i);
        break;
      }
    }
    body = Trim(body);
    if (body.empty()) continue;
    if (body.front() == '[' && body.back() == ']' &&
        body.find('=') == std::string::npos) {
      section = Trim(std::string_view(body).substr(1, body.size() - 2));
      continue;
    }
    size_t eq = body.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(line_no) +
                            ": expected key = value");
    }
    std::string key = Trim(std::string_view(body).substr(0, eq));
    std::string value = Trim(std::string_view(body).substr(eq + 1));
    if (!section.empty()) key = section + "." + key;
    Apply(&cfg, key, value);
  }
  for (const auto& [key, value] : overrides) Apply(&cfg, key, value);
  Validate(cfg);
  return cfg;
}

RunConfig LoadRunConfig(const std::filesystem::path& path,
                        const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseRunConfig(ss.str(), overrides);
}

std::string CanonicalConfig(const RunConfig& cfg) {
  RunConfig copy = cfg;
  std::string out;
  std::string section;
  for (const Field& f : Fields(&copy)) {
    size_t dot = f.key.find('.');
    std::string sec = f.key.substr(0, dot);
    if (sec != section) {
      if (!out.empty()) out += "\n";
      out += "[" + sec + "]\n";
      section = sec;
    }
    out += f.key.substr(dot + 1) + " = " + f.get() + "\n";
  }
  return out;
}

std::string Fnv1aHex(std::string_view text) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ConfigHash(const RunConfig& cfg) {
  return Fnv1aHex(CanonicalConfig(cfg));
}

std::string RewardHash(const RunConfig& cfg) {
  RunConfig copy = cfg;
  std::string text;
  for (const Field& f : Fields(&copy)) {
    if (f.key.rfind("reward.", 0) == 0 || f.key == "prep.d_max") {
      text += f.key + "=" + f.get() + "\n";
    }
  }
  return Fnv1aHex(text);
}

std::filesystem::path OutputRoot(const std::filesystem::path& fallback) {
  const char* env = std::getenv("DEXC_OUT");
  if (env != nullptr && env[0] != '\0') return env;
  return fallback;
}

}  // namespace dexc
