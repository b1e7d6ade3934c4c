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

#ifndef DEXC_TRAINER_H_
#define DEXC_TRAINER_H_

#include <array>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dexc/curriculum.h"
#include "dexc/env.h"
#include "dexc/nn.h"

namespace dexc {

enum class CurriculumMode { kNone, kDexMachina, kBaselineSchedule };

CurriculumMode ParseCurriculumMode(std::string_view name);
std::string_view CurriculumModeName(CurriculumMode mode);

struct PpoConfig {
  double clip = 0.2;
  double gamma = 0.99;
  double lambda = 0.95;
  int epochs = 5;
  int minibatches = 4;
  double actor_learning_rate = 3e-4;
  double critic_learning_rate = 1e-3;
  double entropy_coef = 0.0;
  double max_grad_norm = 1.0;
  // Critic targets are returns divided by this; 0 picks the largest
  // possible discounted return.
  double value_scale = 0.0;

  void Validate() const;
};

struct TrainConfig {
  int n_envs = 64;
  int horizon = 128;
  long max_iterations = 500;
  uint64_t seed = 0;
  std::vector<int> hidden = {256, 256};
  double init_log_std = -1.0;
  PpoConfig ppo;
  CurriculumMode curriculum = CurriculumMode::kDexMachina;
  CurriculumConfig gains;
  long schedule_iterations = 0;  // I of the baseline schedule; 0 = max_iterations
  long schedule_interval = 10;   // v
  EnvConfig env;
  int best_window = 10;
  long checkpoint_interval = 0;  // extra snapshots every n iterations; 0 = off

  void Validate() const;
};

// Tensors of one collection phase, flattened with column index
// step * n_envs + env.
struct RolloutBatch {
  int horizon = 0;
  int n_envs = 0;
  MatX obs;          // normalized observations, obs_dim x (H * E)
  MatX actions;      // act_dim x (H * E)
  VecX log_probs;    // H * E
  VecX values;       // H * E, in return units
  VecX rewards;      // H * E
  VecX dones;        // H * E, 1 when the step ended an episode
  VecX bootstrap;    // E, value of the state after the last step
  std::array<VecX, kNumTerms> terms;  // per-term rewards, H * E
  std::vector<EpisodeRecord> episodes;

  // Reshapes a flat H * E vector into an H x E matrix.
  MatX Grid(const VecX& flat) const;
};

struct GaeResult {
  MatX advantages;      // H x E, before normalization
  MatX returns;         // H x E
  VecX normalized;      // flat, zero mean and unit variance
};

// values has H + 1 rows; the last row bootstraps the final state.
GaeResult GaeAdvantages(const MatX& rewards, const MatX& values,
                        const MatX& dones, double gamma, double lambda);

struct PpoSamples {
  MatX obs;
  MatX actions;
  VecX old_log_probs;
  VecX advantages;
  VecX value_targets;  // returns / value_scale
};

struct PpoLosses {
  double actor = 0.0;
  double critic = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
};

// Clipped surrogate and value losses. When non-null, actor_grad receives
// d(actor loss)/d[actor params, log_std] and critic_grad the critic's.
PpoLosses PpoLoss(ActorCritic* ac, const PpoSamples& s, const PpoConfig& cfg,
                  VecX* actor_grad, VecX* critic_grad);

struct PpoStats : PpoLosses {
  double actor_grad_norm = 0.0;
};

PpoStats PpoUpdate(ActorCritic* ac, Adam* actor_opt, Adam* critic_opt,
                   const PpoSamples& samples, const PpoConfig& cfg, Rng* shuffle);

struct IterationLog {
  long iteration = 0;
  long env_steps = 0;
  int episodes = 0;
  double mean_episode_length = 0.0;
  std::array<double, kNumTerms> mean_rewards = {};
  double mean_total_reward = 0.0;
  double episode_task_return = 0.0;  // NaN when no episode finished
  PpoStats stats;
  double kp = 0.0;
  double kv = 0.0;
  int early_terminations = 0;
};

std::string TrainCsvHeader();
std::string ToCsvRow(const IterationLog& log);

// Policy plus the observation statistics it was trained with.
struct PolicySnapshot {
  ActorCritic ac;
  RunningNormalizer normalizer;

  VecX MeanAction(const VecX& obs) const;
};

class Trainer {
 public:
  // Writes logs and checkpoints under out_dir when it is non-empty.
  Trainer(TrainConfig cfg, const Task* task, std::string config_hash,
          std::filesystem::path out_dir = {});

  // Restores the state of a checkpoint written by this configuration; logs
  // are then appended to.
  void Resume(const std::filesystem::path& checkpoint);

  // One collection phase with the current policy and virtual gains.
  RolloutBatch Collect(bool deterministic = false);
  IterationLog Iterate();
  // Iterates until max_iterations and saves the final checkpoint.
  void Run();

  long iteration() const { return iteration_; }
  const GainCurriculum& curriculum() const { return curriculum_; }
  const ActorCritic& policy() const { return ac_; }
  const RunningNormalizer& normalizer() const { return normalizer_; }
  const std::vector<IterationLog>& logs() const { return logs_; }
  const TrainConfig& config() const { return cfg_; }
  VirtualGains CurrentGains() const;
  PolicySnapshot Snapshot() const { return {ac_, normalizer_}; }
  std::optional<double> best_metric() const { return best_metric_; }

  std::string CheckpointJson() const;
  void SaveCheckpoint(const std::filesystem::path& path) const;

 private:
  void ApplySchedule();
  bool BestEligible() const;
  void OpenLogs(bool append);

  TrainConfig cfg_;
  const Task* task_;
  std::string config_hash_;
  std::filesystem::path out_dir_;
  std::vector<TrackingEnv> envs_;
  ActorCritic ac_;
  RunningNormalizer normalizer_;
  Adam actor_opt_, critic_opt_;
  GainCurriculum curriculum_;
  BaselineSchedule schedule_;
  Rng env_rng_, policy_rng_, shuffle_rng_;
  long iteration_ = 0;
  double value_scale_ = 1.0;
  std::vector<IterationLog> logs_;
  std::deque<double> recent_task_returns_;
  std::optional<double> best_metric_;
  std::ofstream train_log_, curriculum_log_;
  bool logs_open_ = false;
  bool append_logs_ = false;
};

// Loads the policy part of a checkpoint.
PolicySnapshot LoadPolicy(const std::filesystem::path& checkpoint,
                          std::string* config_hash = nullptr);

}  // namespace dexc

#endif  // DEXC_TRAINER_H_
