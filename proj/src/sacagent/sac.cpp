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

#include "sacagent/sac.hpp"

#include <cmath>
#include <string>

#include "common/alloc.hpp"
#include "common/error.hpp"

namespace imitlab {

TwinCritic make_twin_critic(int obs_dim, int act_dim, int hidden, Rng& rng) {
  TwinCritic c;
  c.q1 = make_mlp({obs_dim + act_dim, hidden, hidden, 1}, rng);
  c.q2 = make_mlp({obs_dim + act_dim, hidden, hidden, 1}, rng);
  return c;
}

Eigen::MatrixXd critic_input(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions) {
  if (obs.cols() != actions.cols()) fail(ErrorKind::Dimension, "critic_input: batch sizes differ");
  Eigen::MatrixXd x(obs.rows() + actions.rows(), obs.cols());
  x.topRows(obs.rows()) = obs;
  x.bottomRows(actions.rows()) = actions;
  return x;
}

void validate_sac_config(const SacConfig& c) {
  if (!(c.gamma >= 0.0 && c.gamma < 1.0)) fail(ErrorKind::InvalidArgument, "sac: gamma must lie in [0, 1)");
  if (!(c.tau >= 0.0 && c.tau <= 1.0)) fail(ErrorKind::InvalidArgument, "sac: tau must lie in [0, 1]");
  if (!(c.lr >= 0.0)) fail(ErrorKind::InvalidArgument, "sac: lr must be non-negative");
  if (c.batch_size < 1) fail(ErrorKind::InvalidArgument, "sac: batch_size must be >= 1");
  if (c.buffer_capacity < 1) fail(ErrorKind::InvalidArgument, "sac: buffer_capacity must be >= 1");
  if (c.total_steps < 0 || c.warmup_steps < 0) fail(ErrorKind::InvalidArgument, "sac: step counts must be >= 0");
  if (!(c.alpha_init > 0.0)) fail(ErrorKind::InvalidArgument, "sac: alpha_init must be positive");
  if (c.hidden < 1) fail(ErrorKind::InvalidArgument, "sac: hidden width must be >= 1");
}

ReplayBuffer::ReplayBuffer(int capacity, int obs_dim, int act_dim)
    : capacity_(capacity),
      obs_(obs_dim, capacity),
      actions_(act_dim, capacity),
      next_obs_(obs_dim, capacity),
      rewards_(capacity),
      done_(capacity) {
  if (capacity < 1) fail(ErrorKind::InvalidArgument, "replay buffer capacity must be >= 1");
}

void ReplayBuffer::add(const Eigen::VectorXd& obs, const Eigen::VectorXd& action, double reward,
                       const Eigen::VectorXd& next_obs, bool done) {
  obs_.col(next_) = obs;
  actions_.col(next_) = action;
  next_obs_.col(next_) = next_obs;
  rewards_[next_] = reward;
  done_[next_] = done ? 1.0 : 0.0;
  next_ = (next_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
}

ReplayBuffer::Batch ReplayBuffer::gather(const std::vector<int>& indices) const {
  const auto n = static_cast<Eigen::Index>(indices.size());
  Batch b{Eigen::MatrixXd(obs_.rows(), n), Eigen::MatrixXd(actions_.rows(), n),
          Eigen::MatrixXd(next_obs_.rows(), n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    const int i = indices[static_cast<std::size_t>(j)];
    if (i < 0 || i >= size_) fail(ErrorKind::InvalidArgument, "replay buffer index out of range");
    b.obs.col(j) = obs_.col(i);
    b.actions.col(j) = actions_.col(i);
    b.next_obs.col(j) = next_obs_.col(i);
    b.rewards[j] = rewards_[i];
    b.done[j] = done_[i];
  }
  return b;
}

ReplayBuffer::Batch ReplayBuffer::sample(int batch_size, Rng& rng) const {
  if (size_ == 0) fail(ErrorKind::InvalidArgument, "cannot sample from an empty replay buffer");
  std::uniform_int_distribution<int> pick(0, size_ - 1);
  std::vector<int> idx(static_cast<std::size_t>(batch_size));
  for (auto& i : idx) i = pick(rng);
  return gather(idx);
}

Eigen::VectorXd value_target(const TwinCritic& target, const GaussianPolicy& policy,
                             const Eigen::MatrixXd& next_obs, const Eigen::VectorXd& rewards,
                             const Eigen::VectorXd& done, double gamma, double alpha,
                             const Eigen::MatrixXd& noise) {
  const Eigen::Index n = next_obs.cols();
  if (rewards.size() != n || done.size() != n) fail(ErrorKind::Dimension, "value_target: batch shapes differ");
  const SquashedSample next = squash_sample(policy_forward(policy, next_obs), noise);
  const Eigen::MatrixXd x = critic_input(next_obs, next.action);
  const Eigen::RowVectorXd q1 = mlp_predict(target.q1, x).row(0);
  const Eigen::RowVectorXd q2 = mlp_predict(target.q2, x).row(0);
  Eigen::VectorXd y(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double soft_v = std::min(q1[j], q2[j]) - alpha * next.log_prob[j];
    y[j] = rewards[j] + (1.0 - done[j]) * gamma * soft_v;
  }
  return y;
}

Eigen::VectorXd value_target(const TwinCritic& target, const GaussianPolicy& policy,
                             const Eigen::MatrixXd& next_obs, const Eigen::VectorXd& rewards,
                             const Eigen::VectorXd& done, double gamma, double alpha, Rng& rng) {
  return value_target(target, policy, next_obs, rewards, done, gamma, alpha,
                      draw_noise(policy.act_dim(), next_obs.cols(), rng));
}

CriticLoss critic_loss(const TwinCritic& critics, const Eigen::MatrixXd& obs,
                       const Eigen::MatrixXd& actions, const Eigen::VectorXd& targets) {
  const Eigen::Index n = obs.cols();
  if (targets.size() != n || n == 0) fail(ErrorKind::Dimension, "critic_loss: batch shapes differ");
  const Eigen::MatrixXd x = critic_input(obs, actions);
  const ForwardCache c1 = mlp_forward(critics.q1, x);
  const ForwardCache c2 = mlp_forward(critics.q2, x);
  const Eigen::RowVectorXd d1 = c1.output.row(0) - targets.transpose();
  const Eigen::RowVectorXd d2 = c2.output.row(0) - targets.transpose();
  const double bn = static_cast<double>(n);

  CriticLoss out;
  out.loss = (d1.squaredNorm() + d2.squaredNorm()) / (2.0 * bn);
  out.q1 = mlp_backward(critics.q1, c1, Eigen::MatrixXd(d1 / bn)).grads;
  out.q2 = mlp_backward(critics.q2, c2, Eigen::MatrixXd(d2 / bn)).grads;
  return out;
}

PolicyLoss policy_loss(const GaussianPolicy& policy, const TwinCritic& critics,
                       const Eigen::MatrixXd& obs, double alpha, const Eigen::MatrixXd& noise) {
  const Eigen::Index n = obs.cols();
  if (n == 0) fail(ErrorKind::InvalidArgument, "policy_loss: empty batch");
  const int act_dim = policy.act_dim();
  const double bn = static_cast<double>(n);

  const PolicyForward f = policy_forward(policy, obs);
  const SquashedSample s = squash_sample(f, noise);

  const Eigen::MatrixXd x = critic_input(obs, s.action);
  const ForwardCache c1 = mlp_forward(critics.q1, x);
  const ForwardCache c2 = mlp_forward(critics.q2, x);

  // Route each sample's gradient through whichever critic is smaller.
  Eigen::MatrixXd sel1 = Eigen::MatrixXd::Zero(1, n);
  Eigen::MatrixXd sel2 = Eigen::MatrixXd::Zero(1, n);
  double q_sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double a = c1.output(0, j), b = c2.output(0, j);
    if (a <= b) {
      sel1(0, j) = -1.0 / bn;
      q_sum += a;
    } else {
      sel2(0, j) = -1.0 / bn;
      q_sum += b;
    }
  }
  const Eigen::MatrixXd dx1 = mlp_backward(critics.q1, c1, sel1, nullptr, false).input_grad;
  const Eigen::MatrixXd dx2 = mlp_backward(critics.q2, c2, sel2, nullptr, false).input_grad;
  const Eigen::ArrayXXd d_action = (dx1.bottomRows(act_dim) + dx2.bottomRows(act_dim)).array();

  const Eigen::ArrayXXd a = s.action.array();
  const Eigen::ArrayXXd one_minus_a2 = 1.0 - a.square();
  // d log pi / d u for the Jacobian term -log(1 - tanh(u)^2 + eps).
  const Eigen::ArrayXXd dlogp_du = 2.0 * a * one_minus_a2 / (one_minus_a2 + kTanhLogEps);
  const double w = alpha / bn;

  const Eigen::ArrayXXd d_pre = d_action * one_minus_a2 + w * dlogp_du;
  const Eigen::MatrixXd d_mean = d_pre.matrix();
  const Eigen::ArrayXXd in_range =
      ((f.log_std_raw.array() >= kLogStdMin) && (f.log_std_raw.array() <= kLogStdMax)).cast<double>();
  const Eigen::MatrixXd d_log_std =
      ((d_pre * f.stddev.array() * s.noise.array() - w) * in_range).matrix();

  PolicyLoss out;
  out.log_probs = s.log_prob;
  out.mean_log_prob = s.log_prob.mean();
  out.loss = alpha * out.mean_log_prob - q_sum / bn;

  const Eigen::MatrixXd& hidden = f.mean_cache.last_hidden();
  out.log_std_head = Gradients::zeros_like(policy.log_std_head);
  out.log_std_head.layers[0].weight.noalias() = d_log_std * hidden.transpose();
  out.log_std_head.layers[0].bias = d_log_std.rowwise().sum();
  const Eigen::MatrixXd d_hidden = policy.log_std_head.layers[0].weight.transpose() * d_log_std;
  out.mean_net = mlp_backward(policy.mean_net, f.mean_cache, d_mean, &d_hidden).grads;
  return out;
}

double AlphaState::alpha() const { return std::exp(log_alpha); }

AlphaState AlphaState::from_alpha(double alpha) {
  if (!(alpha > 0.0)) fail(ErrorKind::InvalidArgument, "alpha must be positive");
  AlphaState st;
  st.log_alpha = std::log(alpha);
  return st;
}

double alpha_loss(double log_alpha, const Eigen::VectorXd& log_probs, double target_entropy) {
  return -log_alpha * (log_probs.array() + target_entropy).mean();
}

double alpha_loss_grad(const Eigen::VectorXd& log_probs, double target_entropy) {
  return -(log_probs.array() + target_entropy).mean();
}

void alpha_update(AlphaState& st, const Eigen::VectorXd& log_probs, double target_entropy, double lr) {
  if (log_probs.size() == 0) fail(ErrorKind::InvalidArgument, "alpha_update: empty log-prob batch");
  st.log_alpha = st.opt.step(st.log_alpha, alpha_loss_grad(log_probs, target_entropy), lr);
}

void polyak_update(Mlp& target, const Mlp& online, double tau) {
  if (target.dims() != online.dims()) fail(ErrorKind::Dimension, "polyak_update: shapes differ");
  for (std::size_t i = 0; i < target.layers.size(); ++i) {
    target.layers[i].weight = (1.0 - tau) * target.layers[i].weight + tau * online.layers[i].weight;
    target.layers[i].bias = (1.0 - tau) * target.layers[i].bias + tau * online.layers[i].bias;
  }
}

SacResult sac_train(const EnvConfig& cfg, const SacConfig& sac, std::uint64_t seed, const SacWarmStart* warm,
                    const SacProgress& progress) {
  tune_allocator();
  validate_config(cfg);
  validate_sac_config(sac);
  const int obs_dim = observation_dim(cfg.env);
  const int act_dim = action_dim(cfg.env);

  Rng init_rng(combine_seeds(seed, 0x1));
  Rng env_rng(combine_seeds(seed, 0x2));
  Rng act_rng(combine_seeds(seed, 0x3));
  Rng update_rng(combine_seeds(seed, 0x4));

  SacResult out;
  if (warm != nullptr) {
    check_policy_shape(warm->policy);
    if (warm->policy.obs_dim() != obs_dim || warm->policy.act_dim() != act_dim) {
      fail(ErrorKind::Dimension, "sac_train: warm-start policy does not match the environment");
    }
    out.policy = warm->policy;
  } else {
    out.policy = make_gaussian_policy(obs_dim, act_dim, sac.hidden, init_rng);
  }
  const int hidden = out.policy.hidden_dim();
  out.critics = (warm != nullptr && warm->critics) ? *warm->critics
                                                   : make_twin_critic(obs_dim, act_dim, hidden, init_rng);
  TwinCritic target = out.critics;

  AdamState opt_mean = make_adam(out.policy.mean_net);
  AdamState opt_log_std = make_adam(out.policy.log_std_head);
  AdamState opt_q1 = make_adam(out.critics.q1);
  AdamState opt_q2 = make_adam(out.critics.q2);
  AlphaState alpha = AlphaState::from_alpha(sac.alpha_init);
  const double target_entropy = sac.target_entropy.value_or(-static_cast<double>(act_dim));

  ReplayBuffer buffer(std::min(sac.buffer_capacity, std::max(sac.total_steps, 1)), obs_dim, act_dim);
  auto [state, obs] = reset(cfg, env_rng);
  double episode_return = 0.0;
  std::uniform_real_distribution<double> uniform_action(-1.0, 1.0);

  for (int t = 0; t < sac.total_steps; ++t) {
    Eigen::VectorXd action(act_dim);
    if (t < sac.warmup_steps) {
      for (int i = 0; i < act_dim; ++i) action[i] = uniform_action(act_rng);
    } else {
      action = sample_action(out.policy, obs, act_rng).action;
    }
    StepResult sr = step(cfg, state, action);
    buffer.add(obs, action, sr.reward, sr.observation, false);
    episode_return += sr.reward;
    state = std::move(sr.state);
    obs = std::move(sr.observation);
    if (sr.done) {
      out.episode_returns.push_back(episode_return);
      if (progress) progress(static_cast<int>(out.episode_returns.size()) - 1, episode_return, t + 1);
      episode_return = 0.0;
      std::tie(state, obs) = reset(cfg, env_rng);
    }

    if (t + 1 < sac.warmup_steps) continue;

    const ReplayBuffer::Batch batch = buffer.sample(sac.batch_size, update_rng);
    const double a = alpha.alpha();
    const Eigen::VectorXd y = value_target(target, out.policy, batch.next_obs, batch.rewards, batch.done,
                                           sac.gamma, a, update_rng);
    const CriticLoss cl = critic_loss(out.critics, batch.obs, batch.actions, y);
    if (!std::isfinite(cl.loss)) {
      fail(ErrorKind::Training, "sac_train: non-finite critic loss at step " + std::to_string(t));
    }
    adam_step(out.critics.q1, cl.q1, opt_q1, sac.lr);
    adam_step(out.critics.q2, cl.q2, opt_q2, sac.lr);

    const PolicyLoss pl = policy_loss(out.policy, out.critics, batch.obs, a,
                                      draw_noise(act_dim, batch.obs.cols(), update_rng));
    if (!std::isfinite(pl.loss)) {
      fail(ErrorKind::Training, "sac_train: non-finite policy loss at step " + std::to_string(t));
    }
    adam_step(out.policy.mean_net, pl.mean_net, opt_mean, sac.lr);
    adam_step(out.policy.log_std_head, pl.log_std_head, opt_log_std, sac.lr);
    alpha_update(alpha, pl.log_probs, target_entropy, sac.lr);
    if (!std::isfinite(alpha.log_alpha)) {
      fail(ErrorKind::Training, "sac_train: non-finite temperature at step " + std::to_string(t));
    }

    polyak_update(target.q1, out.critics.q1, sac.tau);
    polyak_update(target.q2, out.critics.q2, sac.tau);
  }
  out.steps = sac.total_steps;
  out.final_alpha = alpha.alpha();
  return out;
}

}  // namespace imitlab
