// Copyright 2026 The imitlab Authors.
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

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "common/rng.hpp"
#include "envsim/dynamics.hpp"
#include "neuralcore/optim.hpp"
#include "sacagent/gaussian_policy.hpp"

namespace imitlab {

/// Two independent Q networks over (obs ++ action).
struct TwinCritic {
  Mlp q1;
  Mlp q2;

  friend bool operator==(const TwinCritic&, const TwinCritic&) = default;
};

TwinCritic make_twin_critic(int obs_dim, int act_dim, int hidden, Rng& rng);

/// Stacks obs (obs_dim x B) over actions (act_dim x B).
Eigen::MatrixXd critic_input(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions);

struct SacConfig {
  double gamma = 0.99;
  double tau = 0.005;
  double lr = 3e-4;
  int batch_size = 256;
  int buffer_capacity = 100000;
  int total_steps = 30000;
  int warmup_steps = 1000;
  std::optional<double> target_entropy;  // defaults to -(action dim)
  double alpha_init = 1.0;
  int hidden = 256;
};

void validate_sac_config(const SacConfig& c);

/// Fixed-capacity ring buffer of transitions. `done` marks true terminal
/// states only; horizon truncation is stored as not done.
class ReplayBuffer {
 public:
  struct Batch {
    Eigen::MatrixXd obs;
    Eigen::MatrixXd actions;
    Eigen::MatrixXd next_obs;
    Eigen::VectorXd rewards;
    Eigen::VectorXd done;
  };

  ReplayBuffer(int capacity, int obs_dim, int act_dim);

  void add(const Eigen::VectorXd& obs, const Eigen::VectorXd& action, double reward,
           const Eigen::VectorXd& next_obs, bool done);
  /// Uniform sampling with replacement over stored entries.
  Batch sample(int batch_size, Rng& rng) const;
  Batch gather(const std::vector<int>& indices) const;

  int size() const { return size_; }
  int capacity() const { return capacity_; }

 private:
  int capacity_;
  int size_ = 0;
  int next_ = 0;
  Eigen::MatrixXd obs_;
  Eigen::MatrixXd actions_;
  Eigen::MatrixXd next_obs_;
  Eigen::VectorXd rewards_;
  Eigen::VectorXd done_;
};

/// y = r + (1 - done) * gamma * (min_i Qbar_i(s', a') - alpha * log pi(a'|s'))
/// with a' drawn from `noise` (act_dim x B).
Eigen::VectorXd value_target(const TwinCritic& target, const GaussianPolicy& policy,
                             const Eigen::MatrixXd& next_obs, const Eigen::VectorXd& rewards,
                             const Eigen::VectorXd& done, double gamma, double alpha,
                             const Eigen::MatrixXd& noise);
Eigen::VectorXd value_target(const TwinCritic& target, const GaussianPolicy& policy,
                             const Eigen::MatrixXd& next_obs, const Eigen::VectorXd& rewards,
                             const Eigen::VectorXd& done, double gamma, double alpha, Rng& rng);

struct CriticLoss {
  double loss = 0.0;
  Gradients q1;
  Gradients q2;
};

/// Mean over batch and both critics of (Q(s,a) - y)^2; y is a constant.
CriticLoss critic_loss(const TwinCritic& critics, const Eigen::MatrixXd& obs,
                       const Eigen::MatrixXd& actions, const Eigen::VectorXd& targets);

struct PolicyLoss {
  double loss = 0.0;
  double mean_log_prob = 0.0;
  Eigen::VectorXd log_probs;
  Gradients mean_net;
  Gradients log_std_head;
};

/// mean(alpha * log pi(a|s) - min(Q1, Q2)(s, a)) with a reparameterized from
/// `noise`; critics are frozen.
PolicyLoss policy_loss(const GaussianPolicy& policy, const TwinCritic& critics,
                       const Eigen::MatrixXd& obs, double alpha, const Eigen::MatrixXd& noise);

/// Temperature stored as log(alpha) and optimized with Adam.
struct AlphaState {
  double log_alpha = 0.0;
  ScalarAdam opt;

  double alpha() const;
  static AlphaState from_alpha(double alpha);
};

/// mean(-log_alpha * (log_probs + target_entropy)).
double alpha_loss(double log_alpha, const Eigen::VectorXd& log_probs, double target_entropy);
/// d alpha_loss / d log_alpha.
double alpha_loss_grad(const Eigen::VectorXd& log_probs, double target_entropy);
void alpha_update(AlphaState& st, const Eigen::VectorXd& log_probs, double target_entropy, double lr);

/// target <- (1 - tau) * target + tau * online.
void polyak_update(Mlp& target, const Mlp& online, double tau);

struct SacWarmStart {
  GaussianPolicy policy;
  std::optional<TwinCritic> critics;
};

struct SacResult {
  GaussianPolicy policy;
  TwinCritic critics;
  std::vector<double> episode_returns;
  int steps = 0;
  double final_alpha = 0.0;
};

/// Per-episode progress callback (episode index, return, global step).
using SacProgress = std::function<void(int, double, int)>;

/// Standard off-policy loop: uniform warmup actions, then one critic, policy,
/// temperature and target update per environment step. Deterministic in seed.
SacResult sac_train(const EnvConfig& cfg, const SacConfig& sac, std::uint64_t seed,
                    const SacWarmStart* warm = nullptr, const SacProgress& progress = {});

}  // namespace imitlab
