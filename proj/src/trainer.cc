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

#include "dexc/trainer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>

#include "dexc/error.h"
#include "json_util.h"

namespace dexc {
namespace {

using internal::Json;

constexpr char kCheckpointFormat[] = "dexc-checkpoint";
constexpr int kCheckpointVersion = 1;

uint64_t SplitMix(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double ClipNorm(VecX* g, double max_norm) {
  double norm = g->norm();
  if (max_norm > 0.0 && norm > max_norm) *g *= max_norm / norm;
  return norm;
}

std::string Num(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

Json AdamToJson(const Adam& a) {
  return {{"m", internal::ToJson(a.m())},
          {"v", internal::ToJson(a.v())},
          {"steps", a.steps()}};
}

void AdamFromJson(const Json& j, Adam* a) {
  VecX m = internal::VecXFromJson(internal::Require(j, "m", "adam"), "adam.m");
  VecX v = internal::VecXFromJson(internal::Require(j, "v", "adam"), "adam.v");
  if (m.size() != a->m().size() || v.size() != a->v().size()) {
    throw SchemaError("optimizer state has the wrong size");
  }
  a->m() = m;
  a->v() = v;
  a->steps() = internal::Require(j, "steps", "adam").get<long>();
}

struct ParsedCheckpoint {
  Json j;
  PolicySnapshot policy;
};

ParsedCheckpoint ParseCheckpoint(const std::filesystem::path& path) {
  ParsedCheckpoint out;
  out.j = internal::ReadJsonFile(path);
  const Json& j = out.j;
  const std::string where = path.string();
  if (!j.is_object() || j.value("format", "") != kCheckpointFormat) {
    throw SchemaError(where + ": not a checkpoint");
  }
  if (j.value("version", 0) != kCheckpointVersion) {
    throw SchemaError(where + ": unsupported checkpoint version");
  }
  int obs_dim = internal::Require(j, "obs_dim", where).get<int>();
  int act_dim = internal::Require(j, "act_dim", where).get<int>();
  auto hidden = internal::Require(j, "hidden", where).get<std::vector<int>>();
  ActorCritic ac(obs_dim, act_dim, hidden);
  VecX actor = internal::VecXFromJson(internal::Require(j, "actor", where), "actor");
  VecX critic = internal::VecXFromJson(internal::Require(j, "critic", where), "critic");
  VecX log_std =
      internal::VecXFromJson(internal::Require(j, "log_std", where), "log_std");
  if (actor.size() != ac.actor.num_params() ||
      critic.size() != ac.critic.num_params() || log_std.size() != act_dim) {
    throw SchemaError(where + ": parameter sizes do not match the network");
  }
  ac.actor.params() = actor;
  ac.critic.params() = critic;
  ac.log_std = log_std;
  const Json& norm = internal::Require(j, "normalizer", where);
  RunningNormalizer n(obs_dim);
  n.mean() = internal::VecXFromJson(internal::Require(norm, "mean", where), "mean");
  n.var() = internal::VecXFromJson(internal::Require(norm, "var", where), "var");
  n.count() = internal::RequireNumber(norm, "count", where);
  if (n.mean().size() != obs_dim || n.var().size() != obs_dim) {
    throw SchemaError(where + ": normalizer size mismatch");
  }
  out.policy = {std::move(ac), std::move(n)};
  return out;
}

}  // namespace

CurriculumMode ParseCurriculumMode(std::string_view name) {
  if (name == "none") return CurriculumMode::kNone;
  if (name == "dexmachina") return CurriculumMode::kDexMachina;
  if (name == "baseline-schedule") return CurriculumMode::kBaselineSchedule;
  throw InvalidArgument("unknown curriculum mode '" + std::string(name) + "'");
}

std::string_view CurriculumModeName(CurriculumMode mode) {
  switch (mode) {
    case CurriculumMode::kNone: return "none";
    case CurriculumMode::kDexMachina: return "dexmachina";
    case CurriculumMode::kBaselineSchedule: return "baseline-schedule";
  }
  return "unknown";
}

void PpoConfig::Validate() const {
  if (!(clip > 0.0) || !(gamma >= 0.0 && gamma <= 1.0) ||
      !(lambda >= 0.0 && lambda <= 1.0)) {
    throw InvalidArgument("PPO needs clip > 0 and gamma, lambda in [0, 1]");
  }
  if (epochs < 1 || minibatches < 1) {
    throw InvalidArgument("PPO needs epochs >= 1 and minibatches >= 1");
  }
  if (!(actor_learning_rate > 0.0) || !(critic_learning_rate > 0.0)) {
    throw InvalidArgument("learning rates must be positive");
  }
  if (!(max_grad_norm >= 0.0) || !(value_scale >= 0.0) ||
      !(entropy_coef >= 0.0)) {
    throw InvalidArgument("PPO coefficients must be nonnegative");
  }
}

void TrainConfig::Validate() const {
  if (n_envs < 1 || horizon < 1) {
    throw InvalidArgument("training needs n_envs >= 1 and horizon >= 1");
  }
  if (max_iterations < 0) throw InvalidArgument("max_iterations must be >= 0");
  if (hidden.empty()) throw InvalidArgument("networks need a hidden layer");
  if (!(init_log_std >= kLogStdMin && init_log_std <= kLogStdMax)) {
    throw InvalidArgument("initial log-std outside [-5, 1]");
  }
  if (best_window < 1) throw InvalidArgument("best_window must be >= 1");
  if (schedule_iterations < 0 || schedule_interval < 1) {
    throw InvalidArgument("schedule needs I >= 0 and v >= 1");
  }
  ppo.Validate();
  gains.Validate();
  env.Validate();
}

MatX RolloutBatch::Grid(const VecX& flat) const {
  MatX g(horizon, n_envs);
  for (int t = 0; t < horizon; ++t) {
    for (int e = 0; e < n_envs; ++e) g(t, e) = flat[t * n_envs + e];
  }
  return g;
}

GaeResult GaeAdvantages(const MatX& rewards, const MatX& values,
                        const MatX& dones, double gamma, double lambda) {
  const Eigen::Index h = rewards.rows(), e = rewards.cols();
  if (values.rows() != h + 1 || values.cols() != e || dones.rows() != h ||
      dones.cols() != e) {
    throw InvalidArgument("GAE inputs have mismatched shapes");
  }
  GaeResult out;
  out.advantages = MatX::Zero(h, e);
  VecX next_adv = VecX::Zero(e);
  for (Eigen::Index t = h - 1; t >= 0; --t) {
    for (Eigen::Index j = 0; j < e; ++j) {
      const double live = 1.0 - dones(t, j);
      double delta = rewards(t, j) + gamma * values(t + 1, j) * live - values(t, j);
      next_adv[j] = delta + gamma * lambda * live * next_adv[j];
      out.advantages(t, j) = next_adv[j];
    }
  }
  out.returns = out.advantages + values.topRows(h);
  out.normalized.resize(h * e);
  for (Eigen::Index t = 0; t < h; ++t) {
    for (Eigen::Index j = 0; j < e; ++j) {
      out.normalized[t * e + j] = out.advantages(t, j);
    }
  }
  const double mean = out.normalized.mean();
  const double var = (out.normalized.array() - mean).square().mean();
  out.normalized = (out.normalized.array() - mean) / (std::sqrt(var) + 1e-8);
  return out;
}

PpoLosses PpoLoss(ActorCritic* ac, const PpoSamples& s, const PpoConfig& cfg,
                  VecX* actor_grad, VecX* critic_grad) {
  const Eigen::Index b = s.obs.cols();
  if (b == 0 || s.actions.cols() != b || s.old_log_probs.size() != b ||
      s.advantages.size() != b || s.value_targets.size() != b) {
    throw InvalidArgument("PPO samples have mismatched sizes");
  }
  const double inv_b = 1.0 / static_cast<double>(b);
  PpoLosses out;

  MatX mean = ac->actor.Forward(s.obs);
  VecX logp = GaussianLogProb(mean, ac->log_std, s.actions);
  VecX ratio = (logp - s.old_log_probs).array().exp();
  VecX dlogp(b);
  double surrogate = 0.0, kl = 0.0, clipped = 0.0;
  for (Eigen::Index i = 0; i < b; ++i) {
    const double r = ratio[i], a = s.advantages[i];
    const double unclipped = r * a;
    const double clip_r = std::clamp(r, 1.0 - cfg.clip, 1.0 + cfg.clip);
    const double clipped_term = clip_r * a;
    if (unclipped <= clipped_term) {
      surrogate += unclipped;
      dlogp[i] = -unclipped * inv_b;
    } else {
      surrogate += clipped_term;
      dlogp[i] = 0.0;
    }
    kl += (r - 1.0) - std::log(r);
    if (std::abs(r - 1.0) > cfg.clip) clipped += 1.0;
  }
  out.entropy = GaussianEntropy(ac->log_std);
  out.actor = -surrogate * inv_b - cfg.entropy_coef * out.entropy;
  out.approx_kl = kl * inv_b;
  out.clip_fraction = clipped * inv_b;

  if (actor_grad != nullptr) {
    const Eigen::Index act = ac->log_std.size();
    VecX inv_var = (-2.0 * ac->log_std.array()).exp();
    MatX diff = s.actions - mean;
    MatX dmean = diff.array().colwise() * inv_var.array();
    dmean.array().rowwise() *= dlogp.transpose().array();
    VecX g_net = VecX::Zero(ac->actor.num_params());
    ac->actor.Backward(dmean, &g_net);
    MatX z2 = diff.array().square().colwise() * inv_var.array();
    VecX g_std = (z2.array() - 1.0).matrix() * dlogp;
    g_std.array() -= cfg.entropy_coef;
    actor_grad->resize(g_net.size() + act);
    *actor_grad << g_net, g_std;
  }

  VecX v = ac->critic.Forward(s.obs).row(0).transpose();
  VecX verr = v - s.value_targets;
  out.critic = 0.5 * verr.squaredNorm() * inv_b;
  if (critic_grad != nullptr) {
    *critic_grad = VecX::Zero(ac->critic.num_params());
    MatX dv = (verr * inv_b).transpose();
    ac->critic.Backward(dv, critic_grad);
  }
  if (!std::isfinite(out.actor) || !std::isfinite(out.critic)) {
    throw DivergenceError("non-finite PPO loss");
  }
  return out;
}

PpoStats PpoUpdate(ActorCritic* ac, Adam* actor_opt, Adam* critic_opt,
                   const PpoSamples& samples, const PpoConfig& cfg,
                   Rng* shuffle) {
  const int b = static_cast<int>(samples.obs.cols());
  const int mb_count = std::min(cfg.minibatches, b);
  std::vector<int> order(b);
  PpoStats stats;
  int updates = 0;
  VecX flat_actor(ac->num_actor_params());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    for (int i = b - 1; i > 0; --i) {
      int j = static_cast<int>(shuffle->Next() % static_cast<uint64_t>(i + 1));
      std::swap(order[i], order[j]);
    }
    for (int m = 0; m < mb_count; ++m) {
      const int begin = static_cast<int>(static_cast<long>(b) * m / mb_count);
      const int end = static_cast<int>(static_cast<long>(b) * (m + 1) / mb_count);
      const int n = end - begin;
      PpoSamples mb;
      mb.obs.resize(samples.obs.rows(), n);
      mb.actions.resize(samples.actions.rows(), n);
      mb.old_log_probs.resize(n);
      mb.advantages.resize(n);
      mb.value_targets.resize(n);
      for (int k = 0; k < n; ++k) {
        const int c = order[begin + k];
        mb.obs.col(k) = samples.obs.col(c);
        mb.actions.col(k) = samples.actions.col(c);
        mb.old_log_probs[k] = samples.old_log_probs[c];
        mb.advantages[k] = samples.advantages[c];
        mb.value_targets[k] = samples.value_targets[c];
      }
      VecX g_actor, g_critic;
      PpoLosses l = PpoLoss(ac, mb, cfg, &g_actor, &g_critic);
      stats.actor_grad_norm += ClipNorm(&g_actor, cfg.max_grad_norm);
      ClipNorm(&g_critic, cfg.max_grad_norm);
      flat_actor << ac->actor.params(), ac->log_std;
      actor_opt->Step(g_actor, &flat_actor);
      ac->actor.params() = flat_actor.head(ac->actor.num_params());
      ac->log_std = flat_actor.tail(ac->log_std.size());
      ac->ClampLogStd();
      critic_opt->Step(g_critic, &ac->critic.params());
      stats.actor += l.actor;
      stats.critic += l.critic;
      stats.entropy += l.entropy;
      stats.approx_kl += l.approx_kl;
      stats.clip_fraction += l.clip_fraction;
      ++updates;
    }
  }
  if (updates > 0) {
    const double inv = 1.0 / updates;
    stats.actor *= inv;
    stats.critic *= inv;
    stats.entropy *= inv;
    stats.approx_kl *= inv;
    stats.clip_fraction *= inv;
    stats.actor_grad_norm *= inv;
  }
  return stats;
}

std::string TrainCsvHeader() {
  return "iteration,env_steps,episodes,mean_episode_length,r_task,r_imi,r_bc,"
         "r_con,r_total,episode_task_return,actor_loss,critic_loss,entropy,"
         "approx_kl,clip_fraction,k_p,k_v,early_terminations";
}

std::string ToCsvRow(const IterationLog& l) {
  std::string row = std::to_string(l.iteration) + "," +
                    std::to_string(l.env_steps) + "," +
                    std::to_string(l.episodes) + "," + Num(l.mean_episode_length);
  for (double r : l.mean_rewards) row += "," + Num(r);
  row += "," + Num(l.mean_total_reward) + "," + Num(l.episode_task_return) +
         "," + Num(l.stats.actor) + "," + Num(l.stats.critic) + "," +
         Num(l.stats.entropy) + "," + Num(l.stats.approx_kl) + "," +
         Num(l.stats.clip_fraction) + "," + Num(l.kp) + "," + Num(l.kv) + "," +
         std::to_string(l.early_terminations);
  return row;
}

VecX PolicySnapshot::MeanAction(const VecX& obs) const {
  return ac.actor.Predict(normalizer.Normalize(obs)).col(0);
}

Trainer::Trainer(TrainConfig cfg, const Task* task, std::string config_hash,
                 std::filesystem::path out_dir)
    : cfg_(std::move(cfg)), task_(task), config_hash_(std::move(config_hash)),
      out_dir_(std::move(out_dir)),
      env_rng_(SplitMix(cfg_.seed * 4 + 1)),
      policy_rng_(SplitMix(cfg_.seed * 4 + 2)),
      shuffle_rng_(SplitMix(cfg_.seed * 4 + 3)) {
  cfg_.Validate();
  envs_.reserve(cfg_.n_envs);
  for (int e = 0; e < cfg_.n_envs; ++e) envs_.emplace_back(task_, cfg_.env);
  const int obs_dim = envs_[0].obs_dim();
  const int act_dim = envs_[0].action_dim();
  ac_ = ActorCritic(obs_dim, act_dim, cfg_.hidden);
  Rng init_rng(SplitMix(cfg_.seed * 4));
  ac_.Initialize(&init_rng, cfg_.init_log_std);
  normalizer_ = RunningNormalizer(obs_dim);
  AdamConfig actor_adam, critic_adam;
  actor_adam.learning_rate = cfg_.ppo.actor_learning_rate;
  critic_adam.learning_rate = cfg_.ppo.critic_learning_rate;
  actor_opt_ = Adam(ac_.num_actor_params(), actor_adam);
  critic_opt_ = Adam(ac_.critic.num_params(), critic_adam);

  const int max_length = envs_[0].max_length();
  CurriculumConfig gains = cfg_.gains;
  if (cfg_.curriculum != CurriculumMode::kDexMachina) gains.kp = 0.0;
  double kv0 = gains.kv > 0.0 ? gains.kv
                              : CriticalDamping(gains.kp, task_->object.TotalMass());
  curriculum_ = GainCurriculum(gains, kv0, max_length);
  long horizon_i = cfg_.schedule_iterations > 0 ? cfg_.schedule_iterations
                                                : std::max(1L, cfg_.max_iterations);
  schedule_ = BaselineSchedule::Default(horizon_i, cfg_.schedule_interval);
  schedule_.Validate();

  value_scale_ = cfg_.ppo.value_scale > 0.0
                     ? cfg_.ppo.value_scale
                     : cfg_.env.reward.LambdaSum() /
                           std::max(1e-3, 1.0 - cfg_.ppo.gamma);
  for (TrackingEnv& env : envs_) env.Reset(&env_rng_);
}

void Trainer::OpenLogs(bool append) {
  if (out_dir_.empty() || logs_open_) return;
  logs_open_ = true;
  std::filesystem::create_directories(out_dir_);
  auto mode = append ? std::ios::app : std::ios::trunc;
  train_log_.open(out_dir_ / "train.csv", std::ios::out | mode);
  curriculum_log_.open(out_dir_ / "curriculum.csv", std::ios::out | mode);
  if (!train_log_ || !curriculum_log_) {
    throw InvalidArgument("cannot write logs under " + out_dir_.string());
  }
  if (!append) {
    train_log_ << TrainCsvHeader() << "\n";
    curriculum_log_ << CurriculumCsvHeader() << "\n";
    train_log_.flush();
    curriculum_log_.flush();
  }
}

VirtualGains Trainer::CurrentGains() const {
  return {curriculum_.kp(), curriculum_.kv()};
}

void Trainer::ApplySchedule() {
  if (cfg_.curriculum != CurriculumMode::kBaselineSchedule) return;
  const double gz = AppliedGravity(schedule_, iteration_);
  const double mu = ScheduledValue(schedule_, ScheduledParam::kFriction, iteration_);
  const double eps_p = ScheduledValue(
      schedule_, ScheduledParam::kObjectPositionTolerance, iteration_);
  const double eps_r = ScheduledValue(
      schedule_, ScheduledParam::kObjectRotationTolerance, iteration_);
  const double eps_f =
      ScheduledValue(schedule_, ScheduledParam::kFingerTolerance, iteration_);
  for (TrackingEnv& env : envs_) {
    SimParams& p = env.simulator().mutable_params();
    p.gravity = Vec3(0.0, 0.0, gz);
    p.friction = mu;
    env.config().early_position = eps_p;
    env.config().early_rotation = eps_r;
    env.config().early_finger = eps_f;
  }
}

RolloutBatch Trainer::Collect(bool deterministic) {
  const int h = cfg_.horizon, e = cfg_.n_envs;
  const int obs_dim = envs_[0].obs_dim(), act_dim = envs_[0].action_dim();
  const VirtualGains gains = CurrentGains();
  RolloutBatch batch;
  batch.horizon = h;
  batch.n_envs = e;
  batch.obs.resize(obs_dim, h * e);
  batch.actions.resize(act_dim, h * e);
  batch.log_probs.resize(h * e);
  batch.values.resize(h * e);
  batch.rewards.resize(h * e);
  batch.dones.resize(h * e);
  for (VecX& t : batch.terms) t.resize(h * e);
  const VecX std_dev = ac_.log_std.array().exp();
  MatX raw(obs_dim, e);
  for (int step = 0; step < h; ++step) {
    for (int j = 0; j < e; ++j) raw.col(j) = envs_[j].Observe();
    normalizer_.Update(raw);
    MatX obs = normalizer_.Normalize(raw);
    MatX mean = ac_.actor.Predict(obs);
    if (!mean.allFinite()) {
      throw DivergenceError("policy produced a non-finite action mean at step " +
                            std::to_string(step) + " of iteration " +
                            std::to_string(iteration_));
    }
    MatX actions = mean;
    if (!deterministic) {
      for (int j = 0; j < e; ++j) {
        for (int d = 0; d < act_dim; ++d) {
          actions(d, j) += std_dev[d] * policy_rng_.Normal();
        }
      }
    }
    VecX logp = GaussianLogProb(mean, ac_.log_std, actions);
    VecX values = ac_.critic.Predict(obs).row(0).transpose() * value_scale_;
    const int base = step * e;
    batch.obs.middleCols(base, e) = obs;
    batch.actions.middleCols(base, e) = actions;
    batch.log_probs.segment(base, e) = logp;
    batch.values.segment(base, e) = values;
    for (int j = 0; j < e; ++j) {
      StepOutcome out = envs_[j].Step(actions.col(j), gains);
      batch.rewards[base + j] = out.reward.r_total;
      batch.terms[kTermTask][base + j] = out.reward.r_task;
      batch.terms[kTermImi][base + j] = out.reward.r_imi;
      batch.terms[kTermBc][base + j] = out.reward.r_bc;
      batch.terms[kTermCon][base + j] = out.reward.r_con;
      batch.dones[base + j] = out.done ? 1.0 : 0.0;
      if (out.done) {
        batch.episodes.push_back(envs_[j].episode());
        envs_[j].Reset(&env_rng_);
      }
    }
  }
  for (int j = 0; j < e; ++j) raw.col(j) = envs_[j].Observe();
  batch.bootstrap =
      ac_.critic.Predict(normalizer_.Normalize(raw)).row(0).transpose() *
      value_scale_;
  return batch;
}

bool Trainer::BestEligible() const {
  if (curriculum_.kp() != 0.0) return false;
  if (cfg_.curriculum == CurriculumMode::kBaselineSchedule) {
    return iteration_ >= schedule_.max_iteration;
  }
  return true;
}

IterationLog Trainer::Iterate() {
  ApplySchedule();
  IterationLog log;
  log.iteration = iteration_;
  RolloutBatch batch = Collect();

  for (const EpisodeRecord& ep : batch.episodes) {
    curriculum_.RecordEpisode(ep.length, ep.returns);
  }
  if (cfg_.curriculum == CurriculumMode::kDexMachina) curriculum_.MaybeDecay();

  MatX values(batch.horizon + 1, batch.n_envs);
  values.topRows(batch.horizon) = batch.Grid(batch.values);
  values.row(batch.horizon) = batch.bootstrap.transpose();
  GaeResult gae = GaeAdvantages(batch.Grid(batch.rewards), values,
                                batch.Grid(batch.dones), cfg_.ppo.gamma,
                                cfg_.ppo.lambda);
  PpoSamples samples;
  samples.obs = std::move(batch.obs);
  samples.actions = std::move(batch.actions);
  samples.old_log_probs = batch.log_probs;
  samples.advantages = gae.normalized;
  samples.value_targets.resize(gae.returns.size());
  for (int t = 0; t < batch.horizon; ++t) {
    for (int j = 0; j < batch.n_envs; ++j) {
      samples.value_targets[t * batch.n_envs + j] = gae.returns(t, j) / value_scale_;
    }
  }
  log.stats = PpoUpdate(&ac_, &actor_opt_, &critic_opt_, samples, cfg_.ppo,
                        &shuffle_rng_);

  ++iteration_;
  log.env_steps = static_cast<long>(iteration_) * cfg_.horizon * cfg_.n_envs;
  log.episodes = static_cast<int>(batch.episodes.size());
  for (int z = 0; z < kNumTerms; ++z) log.mean_rewards[z] = batch.terms[z].mean();
  log.mean_total_reward = batch.rewards.mean();
  log.episode_task_return = std::numeric_limits<double>::quiet_NaN();
  if (!batch.episodes.empty()) {
    double len = 0.0, task = 0.0;
    for (const EpisodeRecord& ep : batch.episodes) {
      len += ep.length;
      task += ep.returns[kTermTask];
      if (ep.terminated) ++log.early_terminations;
    }
    log.mean_episode_length = len / batch.episodes.size();
    log.episode_task_return = task / batch.episodes.size();
  }
  log.kp = curriculum_.kp();
  log.kv = curriculum_.kv();
  logs_.push_back(log);

  if (!out_dir_.empty()) {
    OpenLogs(append_logs_);
    train_log_ << ToCsvRow(log) << "\n";
    curriculum_log_ << ToCsvRow(dexc::Snapshot(curriculum_, log.iteration)) << "\n";
    train_log_.flush();
    curriculum_log_.flush();
  }

  if (!BestEligible()) {
    recent_task_returns_.clear();
  } else if (!std::isnan(log.episode_task_return)) {
    recent_task_returns_.push_back(log.episode_task_return);
    while (static_cast<int>(recent_task_returns_.size()) > cfg_.best_window) {
      recent_task_returns_.pop_front();
    }
    if (static_cast<int>(recent_task_returns_.size()) == cfg_.best_window) {
      double metric = std::accumulate(recent_task_returns_.begin(),
                                      recent_task_returns_.end(), 0.0) /
                      cfg_.best_window;
      if (!best_metric_ || metric > *best_metric_) {
        best_metric_ = metric;
        if (!out_dir_.empty()) SaveCheckpoint(out_dir_ / "checkpoint_best.json");
      }
    }
  }
  if (!out_dir_.empty() && cfg_.checkpoint_interval > 0 &&
      iteration_ % cfg_.checkpoint_interval == 0) {
    SaveCheckpoint(out_dir_ / "checkpoint_last.json");
  }
  return log;
}

void Trainer::Run() {
  OpenLogs(append_logs_);
  while (iteration_ < cfg_.max_iterations) Iterate();
  if (!out_dir_.empty()) SaveCheckpoint(out_dir_ / "checkpoint_last.json");
}

std::string Trainer::CheckpointJson() const {
  Json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["config_hash"] = config_hash_;
  j["seed"] = cfg_.seed;
  j["iteration"] = iteration_;
  j["curriculum_mode"] = std::string(CurriculumModeName(cfg_.curriculum));
  j["obs_dim"] = ac_.actor.input_dim();
  j["act_dim"] = ac_.actor.output_dim();
  j["hidden"] = cfg_.hidden;
  j["actor"] = internal::ToJson(ac_.actor.params());
  j["critic"] = internal::ToJson(ac_.critic.params());
  j["log_std"] = internal::ToJson(ac_.log_std);
  j["normalizer"] = {{"mean", internal::ToJson(normalizer_.mean())},
                     {"var", internal::ToJson(normalizer_.var())},
                     {"count", normalizer_.count()}};
  j["adam_actor"] = AdamToJson(actor_opt_);
  j["adam_critic"] = AdamToJson(critic_opt_);
  Json history = Json::array();
  for (int z = 0; z < kNumTerms; ++z) {
    history.push_back(std::vector<double>(curriculum_.history(z).begin(),
                                          curriculum_.history(z).end()));
  }
  j["curriculum"] = {{"k_p", curriculum_.kp()},
                     {"k_v", curriculum_.kv()},
                     {"zeroed", curriculum_.zeroed()},
                     {"decay_events", curriculum_.decay_events()},
                     {"history", history}};
  j["rng"] = {{"env", env_rng_.State()},
              {"policy", policy_rng_.State()},
              {"shuffle", shuffle_rng_.State()}};
  j["best"] = {{"metric", best_metric_ ? Json(*best_metric_) : Json(nullptr)},
               {"recent", std::vector<double>(recent_task_returns_.begin(),
                                              recent_task_returns_.end())}};
  return j.dump() + "\n";
}

void Trainer::SaveCheckpoint(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write checkpoint " + path.string());
  out << CheckpointJson();
}

void Trainer::Resume(const std::filesystem::path& checkpoint) {
  ParsedCheckpoint parsed = ParseCheckpoint(checkpoint);
  const Json& j = parsed.j;
  const std::string where = checkpoint.string();
  if (j.value("config_hash", "") != config_hash_) {
    throw SchemaError(where + ": config hash differs from the current config");
  }
  if (parsed.policy.ac.actor.sizes() != ac_.actor.sizes()) {
    throw SchemaError(where + ": network shape differs from the current config");
  }
  ac_ = parsed.policy.ac;
  normalizer_ = parsed.policy.normalizer;
  AdamFromJson(internal::Require(j, "adam_actor", where), &actor_opt_);
  AdamFromJson(internal::Require(j, "adam_critic", where), &critic_opt_);
  const Json& c = internal::Require(j, "curriculum", where);
  std::array<std::deque<double>, kNumTerms> history;
  const Json& hist = internal::Require(c, "history", where);
  if (!hist.is_array() || hist.size() != kNumTerms) {
    throw SchemaError(where + ": curriculum history needs four deques");
  }
  for (int z = 0; z < kNumTerms; ++z) {
    auto v = hist[z].get<std::vector<double>>();
    history[z] = std::deque<double>(v.begin(), v.end());
  }
  curriculum_.Restore(internal::RequireNumber(c, "k_p", where),
                      internal::RequireNumber(c, "k_v", where),
                      internal::Require(c, "zeroed", where).get<bool>(),
                      internal::Require(c, "decay_events", where).get<int>(),
                      history);
  const Json& rng = internal::Require(j, "rng", where);
  env_rng_.SetState(internal::Require(rng, "env", where).get<std::string>());
  policy_rng_.SetState(internal::Require(rng, "policy", where).get<std::string>());
  shuffle_rng_.SetState(internal::Require(rng, "shuffle", where).get<std::string>());
  const Json& best = internal::Require(j, "best", where);
  best_metric_.reset();
  if (!best["metric"].is_null()) best_metric_ = best["metric"].get<double>();
  auto recent = best["recent"].get<std::vector<double>>();
  recent_task_returns_ = std::deque<double>(recent.begin(), recent.end());
  iteration_ = internal::Require(j, "iteration", where).get<long>();
  for (TrackingEnv& env : envs_) env.Reset(&env_rng_);
  append_logs_ = true;
}

PolicySnapshot LoadPolicy(const std::filesystem::path& checkpoint,
                          std::string* config_hash) {
  ParsedCheckpoint parsed = ParseCheckpoint(checkpoint);
  if (config_hash != nullptr) *config_hash = parsed.j.value("config_hash", "");
  return std::move(parsed.policy);
}

}  // namespace dexc
