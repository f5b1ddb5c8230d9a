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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "common/rng.hpp"
#include "envsim/dynamics.hpp"
#include "sacagent/gaussian_policy.hpp"

namespace imitlab {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One episode: row t of states/actions and rewards[t] form the tuple at t.
struct Trajectory {
  RowMatrix states;
  RowMatrix actions;
  Eigen::VectorXd rewards;

  int length() const { return static_cast<int>(states.rows()); }

  friend bool operator==(const Trajectory& a, const Trajectory& b);
};

/// Throws Error(Format) unless lengths agree, T >= 1 and entries are finite.
void validate_trajectory(const Trajectory& t, int obs_dim, int act_dim);

enum class RolloutMode : std::uint8_t { Deterministic, Stochastic };

std::string_view rollout_mode_token(RolloutMode m);
RolloutMode parse_rollout_mode(std::string_view token);

/// n_traj independent episodes of exactly `horizon` steps.
std::vector<Trajectory> rollout(const EnvConfig& cfg, const GaussianPolicy& policy, int n_traj, int horizon,
                                Rng& rng, RolloutMode mode);

struct VariantDataset {
  VariantId variant;
  EnvName env = EnvName::Pendulum;
  EnvConfig base_config;
  EnvConfig modified_config;
  std::string policy_checkpoint;
  std::uint64_t seed = 0;
  RolloutMode mode = RolloutMode::Stochastic;
  std::optional<double> target_reward;
  std::vector<Trajectory> trajectories;

  friend bool operator==(const VariantDataset&, const VariantDataset&) = default;
};

/// Reward-free (state, action) pairs; the only data adapters ever see.
/// Column j of obs/actions is pair j.
struct DemoSet {
  Eigen::MatrixXd obs;
  Eigen::MatrixXd actions;

  Eigen::Index size() const { return obs.cols(); }
  bool empty() const { return obs.cols() == 0; }
};

DemoSet demo_pairs(std::span<const Trajectory> trajectories);

/// Uniformly random subset of `take` pairs (all pairs when take >= size).
DemoSet subsample_pairs(const DemoSet& pairs, Eigen::Index take, Rng& rng);

struct TaskSplit {
  std::vector<Trajectory> support;
  std::vector<Trajectory> query;
  std::vector<int> support_indices;
};

/// Random support subset of size `shots`; the complement is the query set.
TaskSplit sample_support(const VariantDataset& d, int shots, Rng& rng);
TaskSplit sample_support(std::span<const Trajectory> trajectories, int shots, Rng& rng);

/// Mean squared error of deterministic actions over all pooled query pairs.
double query_loss(const GaussianPolicy& policy, const TaskSplit& split);
double query_loss(const GaussianPolicy& policy, const DemoSet& pairs);

}  // namespace imitlab
