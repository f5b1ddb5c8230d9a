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

#include "common/rng.hpp"
#include "neuralcore/mlp.hpp"

namespace imitlab {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;
/// Added inside log(1 - tanh(u)^2 + eps) to keep log-probabilities finite.
inline constexpr double kTanhLogEps = 1e-6;

/// Squashed-Gaussian policy. `mean_net` (obs -> hidden -> hidden -> act) is
/// also the behavioral-cloning network; `log_std_head` is a single affine
/// layer reading mean_net's last hidden features.
struct GaussianPolicy {
  Mlp mean_net;
  Mlp log_std_head;

  int obs_dim() const { return mean_net.input_dim(); }
  int act_dim() const { return mean_net.output_dim(); }
  int hidden_dim() const { return log_std_head.input_dim(); }

  friend bool operator==(const GaussianPolicy&, const GaussianPolicy&) = default;
};

GaussianPolicy make_gaussian_policy(int obs_dim, int act_dim, int hidden, Rng& rng);
void check_policy_shape(const GaussianPolicy& p);

struct PolicyForward {
  ForwardCache mean_cache;
  Eigen::MatrixXd log_std_raw;  // before clamping
  Eigen::MatrixXd log_std;      // clamped to [kLogStdMin, kLogStdMax]
  Eigen::MatrixXd stddev;

  const Eigen::MatrixXd& mean() const { return mean_cache.output; }
};

PolicyForward policy_forward(const GaussianPolicy& p, const Eigen::MatrixXd& obs);

/// Batch of reparameterized samples u = mean + std * noise, action = tanh(u).
struct SquashedSample {
  Eigen::MatrixXd noise;
  Eigen::MatrixXd pre_squash;
  Eigen::MatrixXd action;
  Eigen::VectorXd log_prob;
};

SquashedSample squash_sample(const PolicyForward& f, const Eigen::MatrixXd& noise);
Eigen::MatrixXd draw_noise(int act_dim, Eigen::Index batch, Rng& rng);
SquashedSample sample_actions(const GaussianPolicy& p, const Eigen::MatrixXd& obs, Rng& rng);

struct ActionDraw {
  Eigen::VectorXd action;
  double log_prob = 0.0;
  Eigen::VectorXd pre_squash;
};

ActionDraw sample_action(const GaussianPolicy& p, const Eigen::VectorXd& obs, Rng& rng);

/// tanh(mean(obs)).
Eigen::VectorXd deterministic_action(const GaussianPolicy& p, const Eigen::VectorXd& obs);
Eigen::MatrixXd deterministic_actions(const GaussianPolicy& p, const Eigen::MatrixXd& obs);

/// log density of `action` in (-1,1)^d under tanh(Normal(mean, exp(log_std))),
/// including the numerical epsilon of the Jacobian term.
double squashed_log_prob(const Eigen::VectorXd& mean, const Eigen::VectorXd& log_std,
                         const Eigen::VectorXd& action);

}  // namespace imitlab
