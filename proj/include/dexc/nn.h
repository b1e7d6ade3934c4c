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

#ifndef DEXC_NN_H_
#define DEXC_NN_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dexc {

using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

// Seeded generator with a portable normal sampler and a text state.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(seed) {}
  double Uniform();  // [0, 1)
  double Normal();
  uint64_t Next() { return engine_(); }
  std::string State() const;
  void SetState(const std::string& state);

 private:
  std::mt19937_64 engine_;
};

// Fully connected network, tanh hidden layers and a linear output. All
// weights live in one flat vector: per layer W (out x in, column-major)
// then b.
class Mlp {
 public:
  Mlp() = default;
  Mlp(int input, const std::vector<int>& hidden, int output);

  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  int num_params() const { return static_cast<int>(params_.size()); }
  const std::vector<int>& sizes() const { return sizes_; }
  VecX& params() { return params_; }
  const VecX& params() const { return params_; }

  // Scaled uniform init; the output layer is scaled by output_gain.
  void Initialize(Rng* rng, double output_gain);

  // x is input x batch. Caches activations for Backward.
  MatX Forward(const MatX& x);
  MatX Predict(const MatX& x) const;
  // Accumulates dL/dparams into grad given dL/doutput; returns dL/dinput.
  MatX Backward(const MatX& grad_output, VecX* grad) const;

 private:
  int WeightOffset(int layer) const { return offsets_[layer]; }

  std::vector<int> sizes_;
  std::vector<int> offsets_;
  VecX params_;
  std::vector<MatX> activations_;
};

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam() = default;
  Adam(int size, AdamConfig cfg);
  void Step(const VecX& grad, VecX* params);

  VecX& m() { return m_; }
  VecX& v() { return v_; }
  long& steps() { return steps_; }
  const VecX& m() const { return m_; }
  const VecX& v() const { return v_; }
  long steps() const { return steps_; }
  AdamConfig& config() { return cfg_; }

 private:
  AdamConfig cfg_;
  VecX m_, v_;
  long steps_ = 0;
};

// Running mean and variance, applied as clipped standardization.
class RunningNormalizer {
 public:
  RunningNormalizer() = default;
  explicit RunningNormalizer(int dim, double clip = 5.0);
  void Update(const MatX& batch);  // dim x batch
  MatX Normalize(const MatX& x) const;

  VecX& mean() { return mean_; }
  VecX& var() { return var_; }
  double& count() { return count_; }
  const VecX& mean() const { return mean_; }
  const VecX& var() const { return var_; }
  double count() const { return count_; }

 private:
  VecX mean_, var_;
  double count_ = 0.0;
  double clip_ = 5.0;
};

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 1.0;

// Diagonal Gaussian actor with a state-independent log-std, and a critic.
struct ActorCritic {
  Mlp actor;
  Mlp critic;
  VecX log_std;

  ActorCritic() = default;
  ActorCritic(int obs_dim, int act_dim, const std::vector<int>& hidden);
  void Initialize(Rng* rng, double init_log_std);
  void ClampLogStd();

  int num_actor_params() const {
    return actor.num_params() + static_cast<int>(log_std.size());
  }
};

// Log-density of actions (act x batch) under N(mean, exp(log_std)^2).
VecX GaussianLogProb(const MatX& mean, const VecX& log_std,
                     const MatX& actions);
double GaussianEntropy(const VecX& log_std);

}  // namespace dexc

#endif  // DEXC_NN_H_
