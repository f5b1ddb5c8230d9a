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

#include "trajstore/trajectory.hpp"

#include <algorithm>
#include <numeric>

#include "common/error.hpp"

namespace imitlab {

bool operator==(const Trajectory& a, const Trajectory& b) {
  auto same = [](const auto& x, const auto& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
  };
  return same(a.states, b.states) && same(a.actions, b.actions) && a.rewards.size() == b.rewards.size() &&
         a.rewards == b.rewards;
}

void validate_trajectory(const Trajectory& t, int obs_dim, int act_dim) {
  const auto n = t.states.rows();
  if (n < 1) fail(ErrorKind::Format, "trajectory is empty");
  if (t.actions.rows() != n || t.rewards.size() != n) fail(ErrorKind::Format, "trajectory field lengths differ");
  if (t.states.cols() != obs_dim || t.actions.cols() != act_dim) {
    fail(ErrorKind::Format, "trajectory dimensions do not match the environment");
  }
  if (!t.states.allFinite() || !t.actions.allFinite() || !t.rewards.allFinite()) {
    fail(ErrorKind::Format, "trajectory contains non-finite values");
  }
}

std::string_view rollout_mode_token(RolloutMode m) {
  return m == RolloutMode::Deterministic ? "deterministic" : "stochastic";
}

RolloutMode parse_rollout_mode(std::string_view token) {
  if (token == "deterministic") return RolloutMode::Deterministic;
  if (token == "stochastic") return RolloutMode::Stochastic;
  fail(ErrorKind::InvalidArgument, "unknown rollout mode \"" + std::string(token) +
                                       "\" (expected deterministic or stochastic)");
}

std::vector<Trajectory> rollout(const EnvConfig& cfg, const GaussianPolicy& policy, int n_traj, int horizon,
                                Rng& rng, RolloutMode mode) {
  const int obs_dim = observation_dim(cfg.env);
  const int act_dim = action_dim(cfg.env);
  if (policy.obs_dim() != obs_dim || policy.act_dim() != act_dim) {
    fail(ErrorKind::Dimension, "rollout: policy dimensions do not match " + std::string(env_name_token(cfg.env)));
  }
  if (n_traj < 0) fail(ErrorKind::InvalidArgument, "rollout: n_traj must be >= 0");
  if (horizon < 1) fail(ErrorKind::InvalidArgument, "rollout: horizon must be >= 1");
  EnvConfig run_cfg = cfg;
  run_cfg.horizon = horizon;

  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(n_traj));
  for (int k = 0; k < n_traj; ++k) {
    Trajectory tr{RowMatrix(horizon, obs_dim), RowMatrix(horizon, act_dim), Eigen::VectorXd(horizon)};
    auto [state, obs] = reset(run_cfg, rng);
    for (int t = 0; t < horizon; ++t) {
      const Eigen::VectorXd a = mode == RolloutMode::Deterministic ? deterministic_action(policy, obs)
                                                                   : sample_action(policy, obs, rng).action;
      StepResult sr = step(run_cfg, state, a);
      tr.states.row(t) = obs.transpose();
      tr.actions.row(t) = a.transpose();
      tr.rewards[t] = sr.reward;
      state = std::move(sr.state);
      obs = std::move(sr.observation);
    }
    out.push_back(std::move(tr));
  }
  return out;
}

DemoSet demo_pairs(std::span<const Trajectory> trajectories) {
  Eigen::Index total = 0;
  for (const auto& t : trajectories) total += t.states.rows();
  DemoSet d;
  if (trajectories.empty()) return d;
  d.obs.resize(trajectories.front().states.cols(), total);
  d.actions.resize(trajectories.front().actions.cols(), total);
  Eigen::Index col = 0;
  for (const auto& t : trajectories) {
    if (t.states.cols() != d.obs.rows() || t.actions.cols() != d.actions.rows()) {
      fail(ErrorKind::Dimension, "demo_pairs: trajectories have different dimensions");
    }
    d.obs.middleCols(col, t.states.rows()) = t.states.transpose();
    d.actions.middleCols(col, t.actions.rows()) = t.actions.transpose();
    col += t.states.rows();
  }
  return d;
}

DemoSet subsample_pairs(const DemoSet& pairs, Eigen::Index take, Rng& rng) {
  if (take >= pairs.size()) return pairs;
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(pairs.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  // Partial Fisher-Yates: the first `take` slots become the sample.
  for (Eigen::Index i = 0; i < take; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, pairs.size() - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  DemoSet out{Eigen::MatrixXd(pairs.obs.rows(), take), Eigen::MatrixXd(pairs.actions.rows(), take)};
  for (Eigen::Index j = 0; j < take; ++j) {
    out.obs.col(j) = pairs.obs.col(idx[static_cast<std::size_t>(j)]);
    out.actions.col(j) = pairs.actions.col(idx[static_cast<std::size_t>(j)]);
  }
  return out;
}

TaskSplit sample_support(std::span<const Trajectory> trajectories, int shots, Rng& rng) {
  const int n = static_cast<int>(trajectories.size());
  if (shots < 1 || shots > n - 1) {
    fail(ErrorKind::InvalidArgument, "sample_support: shots must lie in [1, " + std::to_string(n - 1) +
                                         "], got " + std::to_string(shots));
  }
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < shots; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  TaskSplit split;
  split.support_indices.assign(idx.begin(), idx.begin() + shots);
  std::vector<bool> in_support(static_cast<std::size_t>(n), false);
  for (int i : split.support_indices) {
    in_support[static_cast<std::size_t>(i)] = true;
    split.support.push_back(trajectories[static_cast<std::size_t>(i)]);
  }
  for (int i = 0; i < n; ++i) {
    if (!in_support[static_cast<std::size_t>(i)]) split.query.push_back(trajectories[static_cast<std::size_t>(i)]);
  }
  return split;
}

TaskSplit sample_support(const VariantDataset& d, int shots, Rng& rng) {
  return sample_support(std::span<const Trajectory>(d.trajectories), shots, rng);
}

double query_loss(const GaussianPolicy& policy, const DemoSet& pairs) {
  if (pairs.empty()) fail(ErrorKind::InvalidArgument, "query_loss: empty query set");
  if (pairs.obs.rows() != policy.obs_dim() || pairs.actions.rows() != policy.act_dim()) {
    fail(ErrorKind::Dimension, "query_loss: policy dimensions do not match the data");
  }
  // Chunked so memory stays bounded on large query pools.
  constexpr Eigen::Index kChunk = 4096;
  double sum = 0.0;
  for (Eigen::Index start = 0; start < pairs.size(); start += kChunk) {
    const Eigen::Index len = std::min(kChunk, pairs.size() - start);
    const Eigen::MatrixXd pred = deterministic_actions(policy, pairs.obs.middleCols(start, len));
    sum += (pred - pairs.actions.middleCols(start, len)).squaredNorm();
  }
  return sum / static_cast<double>(pairs.actions.size());
}

double query_loss(const GaussianPolicy& policy, const TaskSplit& split) {
  return query_loss(policy, demo_pairs(split.query));
}

}  // namespace imitlab
