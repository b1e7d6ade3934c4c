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

#include "dexc/nn.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dexc/error.h"

namespace dexc {

double Rng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::Normal() {
  double u1 = Uniform();
  double u2 = Uniform();
  return std::sqrt(-2.0 * std::log1p(-u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::string Rng::State() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

void Rng::SetState(const std::string& state) {
  std::istringstream is(state);
  is >> engine_;
  if (is.fail()) throw SchemaError("malformed RNG state");
}

Mlp::Mlp(int input, const std::vector<int>& hidden, int output) {
  if (input < 1 || output < 1) throw InvalidArgument("MLP sizes must be >= 1");
  sizes_.push_back(input);
  for (int h : hidden) {
    if (h < 1) throw InvalidArgument("MLP sizes must be >= 1");
    sizes_.push_back(h);
  }
  sizes_.push_back(output);
  int total = 0;
  for (size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
  }
  params_ = VecX::Zero(total);
}

void Mlp::Initialize(Rng* rng, double output_gain) {
  const int layers = static_cast<int>(sizes_.size()) - 1;
  for (int l = 0; l < layers; ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    double bound = std::sqrt(6.0 / (in + out));
    if (l == layers - 1) bound *= output_gain;
    for (int i = 0; i < in * out; ++i) {
      params_[offsets_[l] + i] = bound * (2.0 * rng->Uniform() - 1.0);
    }
    params_.segment(offsets_[l] + in * out, out).setZero();
  }
}

MatX Mlp::Forward(const MatX& x) {
  const int layers = static_cast<int>(sizes_.size()) - 1;
  activations_.assign(1, x);
  for (int l = 0; l < layers; ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    Eigen::Map<const MatX> w(params_.data() + offsets_[l], out, in);
    Eigen::Map<const VecX> b(params_.data() + offsets_[l] + in * out, out);
    MatX z = w * activations_.back();
    z.colwise() += b;
    if (l < layers - 1) z = z.array().tanh();
    activations_.push_back(std::move(z));
  }
  return activations_.back();
}

MatX Mlp::Predict(const MatX& x) const {
  const int layers = static_cast<int>(sizes_.size()) - 1;
  MatX a = x;
  for (int l = 0; l < layers; ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    Eigen::Map<const MatX> w(params_.data() + offsets_[l], out, in);
    Eigen::Map<const VecX> b(params_.data() + offsets_[l] + in * out, out);
    MatX z = w * a;
    z.colwise() += b;
    if (l < layers - 1) z = z.array().tanh();
    a = std::move(z);
  }
  return a;
}

MatX Mlp::Backward(const MatX& grad_output, VecX* grad) const {
  const int layers = static_cast<int>(sizes_.size()) - 1;
  if (static_cast<int>(activations_.size()) != layers + 1) {
    throw InvalidArgument("Backward called before Forward");
  }
  if (grad->size() != params_.size()) *grad = VecX::Zero(params_.size());
  MatX delta = grad_output;
  for (int l = layers - 1; l >= 0; --l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    if (l < layers - 1) {
      delta.array() *= 1.0 - activations_[l + 1].array().square();
    }
    Eigen::Map<MatX> gw(grad->data() + offsets_[l], out, in);
    Eigen::Map<VecX> gb(grad->data() + offsets_[l] + in * out, out);
    gw.noalias() += delta * activations_[l].transpose();
    gb += delta.rowwise().sum();
    Eigen::Map<const MatX> w(params_.data() + offsets_[l], out, in);
    delta = w.transpose() * delta;
  }
  return delta;
}

Adam::Adam(int size, AdamConfig cfg)
    : cfg_(cfg), m_(VecX::Zero(size)), v_(VecX::Zero(size)) {}

void Adam::Step(const VecX& grad, VecX* params) {
  if (grad.size() != m_.size() || params->size() != m_.size()) {
    throw InvalidArgument("Adam state and gradient sizes differ");
  }
  ++steps_;
  m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * grad;
  v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(steps_));
  *params -= (cfg_.learning_rate / c1) *
             (m_.array() / ((v_.array() / c2).sqrt() + cfg_.epsilon)).matrix();
}

RunningNormalizer::RunningNormalizer(int dim, double clip)
    : mean_(VecX::Zero(dim)), var_(VecX::Ones(dim)), clip_(clip) {}

void RunningNormalizer::Update(const MatX& batch) {
  const double n = static_cast<double>(batch.cols());
  if (n == 0) return;
  VecX batch_mean = batch.rowwise().mean();
  VecX batch_var =
      (batch.colwise() - batch_mean).array().square().rowwise().sum() / n;
  const double total = count_ + n;
  VecX delta = batch_mean - mean_;
  mean_ += delta * (n / total);
  var_ = (var_ * count_ + batch_var * n +
          delta.cwiseAbs2() * (count_ * n / total)) /
         total;
  count_ = total;
}

MatX RunningNormalizer::Normalize(const MatX& x) const {
  VecX inv_std = (var_.array() + 1e-8).rsqrt();
  MatX out = (x.colwise() - mean_).array().colwise() * inv_std.array();
  return out.cwiseMax(-clip_).cwiseMin(clip_);
}

ActorCritic::ActorCritic(int obs_dim, int act_dim,
                         const std::vector<int>& hidden)
    : actor(obs_dim, hidden, act_dim),
      critic(obs_dim, hidden, 1),
      log_std(VecX::Zero(act_dim)) {}

void ActorCritic::Initialize(Rng* rng, double init_log_std) {
  actor.Initialize(rng, 0.01);
  critic.Initialize(rng, 1.0);
  log_std.setConstant(init_log_std);
  ClampLogStd();
}

void ActorCritic::ClampLogStd() {
  log_std = log_std.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
}

VecX GaussianLogProb(const MatX& mean, const VecX& log_std,
                     const MatX& actions) {
  VecX inv_std = (-log_std.array()).exp();
  MatX z = (actions - mean).array().colwise() * inv_std.array();
  const double norm = log_std.sum() +
                      0.5 * std::log(2.0 * std::numbers::pi) *
                          static_cast<double>(log_std.size());
  return (-0.5 * z.array().square().colwise().sum()).matrix().transpose()
             .array() - norm;
}

double GaussianEntropy(const VecX& log_std) {
  return log_std.sum() + static_cast<double>(log_std.size()) *
                             (0.5 + 0.5 * std::log(2.0 * std::numbers::pi));
}

}  // namespace dexc
