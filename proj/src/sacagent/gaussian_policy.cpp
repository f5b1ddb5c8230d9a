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

#include "sacagent/gaussian_policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "common/error.hpp"

namespace imitlab {

namespace {
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
}

GaussianPolicy make_gaussian_policy(int obs_dim, int act_dim, int hidden, Rng& rng) {
  GaussianPolicy p;
  p.mean_net = make_mlp({obs_dim, hidden, hidden, act_dim}, rng);
  p.log_std_head = make_mlp({hidden, act_dim}, rng);
  return p;
}

void check_policy_shape(const GaussianPolicy& p) {
  if (p.mean_net.layers.size() < 2 || p.log_std_head.layers.size() != 1 ||
      p.log_std_head.input_dim() != p.mean_net.layers.back().in_dim() ||
      p.log_std_head.output_dim() != p.mean_net.output_dim()) {
    fail(ErrorKind::Dimension, "gaussian policy: mean network and log-std head do not fit together");
  }
}

PolicyForward policy_forward(const GaussianPolicy& p, const Eigen::MatrixXd& obs) {
  PolicyForward f;
  f.mean_cache = mlp_forward(p.mean_net, obs);
  f.log_std_raw = mlp_predict(p.log_std_head, f.mean_cache.last_hidden());
  f.log_std = f.log_std_raw.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  f.stddev = f.log_std.array().exp();
  return f;
}

SquashedSample squash_sample(const PolicyForward& f, const Eigen::MatrixXd& noise) {
  if (noise.rows() != f.mean().rows() || noise.cols() != f.mean().cols()) {
    fail(ErrorKind::Dimension, "squash_sample: noise shape mismatch");
  }
  SquashedSample s;
  s.noise = noise;
  s.pre_squash = f.mean().array() + f.stddev.array() * noise.array();
  s.action = s.pre_squash.array().tanh();
  const Eigen::ArrayXXd a2 = s.action.array().square();
  const Eigen::ArrayXXd per_dim = -0.5 * noise.array().square() - f.log_std.array() - kHalfLog2Pi -
                                  (1.0 - a2 + kTanhLogEps).log();
  s.log_prob = per_dim.colwise().sum().transpose();
  return s;
}

Eigen::MatrixXd draw_noise(int act_dim, Eigen::Index batch, Rng& rng) {
  Eigen::MatrixXd n(act_dim, batch);
  for (Eigen::Index c = 0; c < batch; ++c) {
    for (int r = 0; r < act_dim; ++r) n(r, c) = standard_normal(rng);
  }
  return n;
}

SquashedSample sample_actions(const GaussianPolicy& p, const Eigen::MatrixXd& obs, Rng& rng) {
  const PolicyForward f = policy_forward(p, obs);
  return squash_sample(f, draw_noise(p.act_dim(), obs.cols(), rng));
}

ActionDraw sample_action(const GaussianPolicy& p, const Eigen::VectorXd& obs, Rng& rng) {
  if (!obs.allFinite()) fail(ErrorKind::Numeric, "sample_action: non-finite observation");
  const SquashedSample s = sample_actions(p, Eigen::MatrixXd(obs), rng);
  return ActionDraw{s.action.col(0), s.log_prob[0], s.pre_squash.col(0)};
}

Eigen::VectorXd deterministic_action(const GaussianPolicy& p, const Eigen::VectorXd& obs) {
  if (!obs.allFinite()) fail(ErrorKind::Numeric, "deterministic_action: non-finite observation");
  return mlp_predict(p.mean_net, obs).array().tanh();
}

Eigen::MatrixXd deterministic_actions(const GaussianPolicy& p, const Eigen::MatrixXd& obs) {
  return mlp_predict(p.mean_net, obs).array().tanh();
}

double squashed_log_prob(const Eigen::VectorXd& mean, const Eigen::VectorXd& log_std,
                         const Eigen::VectorXd& action) {
  double lp = 0.0;
  for (Eigen::Index i = 0; i < action.size(); ++i) {
    const double u = std::atanh(action[i]);
    const double ls = std::clamp(log_std[i], kLogStdMin, kLogStdMax);
    const double z = (u - mean[i]) / std::exp(ls);
    lp += -0.5 * z * z - ls - kHalfLog2Pi - std::log(1.0 - action[i] * action[i] + kTanhLogEps);
  }
  return lp;
}

}  // namespace imitlab
