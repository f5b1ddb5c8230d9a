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
#include <utility>

#include "common/rng.hpp"
#include "envsim/env_config.hpp"

namespace imitlab {

/// Generalized coordinates and velocities of one environment instance.
///
/// pendulum: q = [angle], 0 is upright, pi hangs down.
/// cartpole: q = [cart position, pole angle], pole angle 0 is upright.
/// reacher2: q = [shoulder angle, elbow angle].
struct EnvState {
  Eigen::VectorXd q;
  Eigen::VectorXd qd;
  int step_index = 0;
};

using Observation = Eigen::VectorXd;
using Action = Eigen::VectorXd;

struct StepResult {
  EnvState state;
  Observation observation;
  double reward = 0.0;
  bool done = false;
};

int observation_dim(EnvName env);
int action_dim(EnvName env);

/// Speed limits applied after every integration step.
double velocity_limit(EnvName env, int dof);

/// Fixed reacher target in the arm plane.
inline constexpr double kReacherGoal[2] = {0.5, 0.5};

Observation observe(const EnvConfig& cfg, const EnvState& s);

/// Initial state: a small uniform perturbation around the documented start.
std::pair<EnvState, Observation> reset(const EnvConfig& cfg, Rng& rng);
std::pair<EnvState, Observation> reset(const EnvConfig& cfg, std::uint64_t seed);

/// One semi-implicit Euler step. Actions are clamped to [-1, 1] and scaled by
/// max_torque. Throws Error(Numeric) on non-finite state or action.
StepResult step(const EnvConfig& cfg, const EnvState& s, const Action& a);

/// Closed interval containing every per-step reward for clamped actions.
std::pair<double, double> reward_bounds(const EnvConfig& cfg);

}  // namespace imitlab
