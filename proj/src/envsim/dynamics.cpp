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

#include "envsim/dynamics.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "common/error.hpp"

namespace imitlab {

namespace {

constexpr double kPi = std::numbers::pi;

double attr_or_zero(const EnvConfig& cfg, const char* part, Attribute a) {
  return cfg.part(part).get(a).value_or(0.0);
}

double attr(const EnvConfig& cfg, const char* part, Attribute a) {
  const auto v = cfg.part(part).get(a);
  if (!v) {
    fail(ErrorKind::Domain, std::string(env_name_token(cfg.env)) + ": part \"" + part + "\" lacks " +
                                std::string(attribute_name(a)));
  }
  return *v;
}

double wrap_angle(double x) { return std::atan2(std::sin(x), std::cos(x)); }

// Hard limit: position clamped to [lo, hi], velocity zeroed at the stop.
void clamp_joint(double& q, double& qd, double lo, double hi) {
  if (q < lo) {
    q = lo;
    qd = 0.0;
  } else if (q > hi) {
    q = hi;
    qd = 0.0;
  }
}

void check_finite(const EnvState& s, const Action& a) {
  if (!s.q.allFinite() || !s.qd.allFinite()) fail(ErrorKind::Numeric, "step: non-finite state");
  if (!a.allFinite()) fail(ErrorKind::Numeric, "step: non-finite action");
}

StepResult step_pendulum(const EnvConfig& cfg, const EnvState& s, double u_norm) {
  const double m = attr(cfg, "rod", Attribute::Mass);
  const double l = attr(cfg, "rod", Attribute::Length);
  const double range = attr(cfg, "pivot", Attribute::JointRange);
  const double friction = attr_or_zero(cfg, "pivot", Attribute::Friction);
  const double torque = u_norm * cfg.max_torque;

  double q = s.q[0];
  double qd = s.qd[0];
  // Point mass at the rod tip: m l^2 qdd = m g l sin(q) + u - f qd.
  const double qdd = cfg.gravity / l * std::sin(q) + (torque - friction * qd) / (m * l * l);
  const double vmax = velocity_limit(EnvName::Pendulum, 0);
  qd = std::clamp(qd + cfg.dt * qdd, -vmax, vmax);
  q = q + cfg.dt * qd;
  // Joint range is measured from the hanging rest position.
  clamp_joint(q, qd, kPi - range, kPi + range);

  const double err = wrap_angle(q);
  StepResult r;
  r.reward = -(err * err + 0.1 * qd * qd + 0.001 * torque * torque);
  r.state.q = Eigen::VectorXd::Constant(1, q);
  r.state.qd = Eigen::VectorXd::Constant(1, qd);
  return r;
}

StepResult step_cartpole(const EnvConfig& cfg, const EnvState& s, double u_norm) {
  const double mc = attr(cfg, "cart", Attribute::Mass);
  const double cart_friction = attr_or_zero(cfg, "cart", Attribute::Friction);
  const double mp = attr(cfg, "pole", Attribute::Mass);
  const double half = 0.5 * attr(cfg, "pole", Attribute::Length);
  const double track = attr(cfg, "slider", Attribute::JointRange);
  const double hinge_friction = attr_or_zero(cfg, "hinge", Attribute::Friction);
  const double force = u_norm * cfg.max_torque;

  double x = s.q[0], th = s.q[1];
  double xd = s.qd[0], thd = s.qd[1];
  const double total = mc + mp;
  const double sin_t = std::sin(th), cos_t = std::cos(th);
  const double f = force - cart_friction * xd;
  const double temp = (f + mp * half * thd * thd * sin_t) / total;
  const double thdd = (cfg.gravity * sin_t - cos_t * temp - hinge_friction * thd / (mp * half)) /
                      (half * (4.0 / 3.0 - mp * cos_t * cos_t / total));
  const double xdd = temp - mp * half * thdd * cos_t / total;

  const double vx = velocity_limit(EnvName::Cartpole, 0);
  const double vt = velocity_limit(EnvName::Cartpole, 1);
  xd = std::clamp(xd + cfg.dt * xdd, -vx, vx);
  thd = std::clamp(thd + cfg.dt * thdd, -vt, vt);
  x += cfg.dt * xd;
  th += cfg.dt * thd;
  clamp_joint(x, xd, -track, track);

  StepResult r;
  r.reward = std::cos(th) - 0.01 * x * x - 0.001 * force * force;
  r.state.q = Eigen::Vector2d(x, th);
  r.state.qd = Eigen::Vector2d(xd, thd);
  return r;
}

StepResult step_reacher(const EnvConfig& cfg, const EnvState& s, const Eigen::Vector2d& u_norm) {
  const double m1 = attr(cfg, "link1", Attribute::Mass);
  const double l1 = attr(cfg, "link1", Attribute::Length);
  const double m2 = attr(cfg, "link2", Attribute::Mass);
  const double l2 = attr(cfg, "link2", Attribute::Length);
  const double r1 = attr(cfg, "joint1", Attribute::JointRange);
  const double r2 = attr(cfg, "joint2", Attribute::JointRange);
  const double f1 = attr_or_zero(cfg, "joint1", Attribute::Friction);
  const double f2 = attr_or_zero(cfg, "joint2", Attribute::Friction);
  const Eigen::Vector2d tau = u_norm * cfg.max_torque;

  double q1 = s.q[0], q2 = s.q[1];
  double qd1 = s.qd[0], qd2 = s.qd[1];

  // Point masses at the link tips, planar (no gravity).
  const double c2 = std::cos(q2), s2 = std::sin(q2);
  Eigen::Matrix2d mass_matrix;
  mass_matrix(0, 0) = (m1 + m2) * l1 * l1 + m2 * l2 * l2 + 2.0 * m2 * l1 * l2 * c2;
  mass_matrix(0, 1) = m2 * l2 * l2 + m2 * l1 * l2 * c2;
  mass_matrix(1, 0) = mass_matrix(0, 1);
  mass_matrix(1, 1) = m2 * l2 * l2;
  const double h = m2 * l1 * l2 * s2;
  const Eigen::Vector2d coriolis(-h * (2.0 * qd1 * qd2 + qd2 * qd2), h * qd1 * qd1);
  const Eigen::Vector2d damping(f1 * qd1, f2 * qd2);
  const Eigen::Vector2d qdd = mass_matrix.inverse() * (tau - coriolis - damping);

  const double v1 = velocity_limit(EnvName::Reacher2, 0);
  const double v2 = velocity_limit(EnvName::Reacher2, 1);
  qd1 = std::clamp(qd1 + cfg.dt * qdd[0], -v1, v1);
  qd2 = std::clamp(qd2 + cfg.dt * qdd[1], -v2, v2);
  q1 += cfg.dt * qd1;
  q2 += cfg.dt * qd2;
  clamp_joint(q1, qd1, -r1, r1);
  clamp_joint(q2, qd2, -r2, r2);

  const double tip_x = l1 * std::cos(q1) + l2 * std::cos(q1 + q2);
  const double tip_y = l1 * std::sin(q1) + l2 * std::sin(q1 + q2);
  const double dx = tip_x - kReacherGoal[0];
  const double dy = tip_y - kReacherGoal[1];

  StepResult r;
  r.reward = -(dx * dx + dy * dy) - 0.001 * tau.squaredNorm();
  r.state.q = Eigen::Vector2d(q1, q2);
  r.state.qd = Eigen::Vector2d(qd1, qd2);
  return r;
}

}  // namespace

int observation_dim(EnvName env) {
  switch (env) {
    case EnvName::Pendulum: return 3;
    case EnvName::Cartpole: return 5;
    case EnvName::Reacher2: return 6;
  }
  return 0;
}

int action_dim(EnvName env) { return env == EnvName::Reacher2 ? 2 : 1; }

double velocity_limit(EnvName env, int dof) {
  switch (env) {
    case EnvName::Pendulum: return 8.0;
    case EnvName::Cartpole: return dof == 0 ? 10.0 : 20.0;
    case EnvName::Reacher2: return 20.0;
  }
  return 0.0;
}

Observation observe(const EnvConfig& cfg, const EnvState& s) {
  switch (cfg.env) {
    case EnvName::Pendulum: {
      Observation o(3);
      o << std::cos(s.q[0]), std::sin(s.q[0]), s.qd[0];
      return o;
    }
    case EnvName::Cartpole: {
      Observation o(5);
      o << s.q[0], s.qd[0], std::cos(s.q[1]), std::sin(s.q[1]), s.qd[1];
      return o;
    }
    case EnvName::Reacher2: {
      Observation o(6);
      o << std::cos(s.q[0]), std::sin(s.q[0]), std::cos(s.q[1]), std::sin(s.q[1]), s.qd[0], s.qd[1];
      return o;
    }
  }
  return {};
}

std::pair<EnvState, Observation> reset(const EnvConfig& cfg, Rng& rng) {
  EnvState s;
  switch (cfg.env) {
    case EnvName::Pendulum:
      s.q = Eigen::VectorXd::Constant(1, kPi + uniform(rng, -0.1, 0.1));
      s.qd = Eigen::VectorXd::Constant(1, uniform(rng, -0.1, 0.1));
      break;
    case EnvName::Cartpole: {
      const double x = uniform(rng, -0.05, 0.05);
      const double th = kPi + uniform(rng, -0.1, 0.1);
      const double xd = uniform(rng, -0.05, 0.05);
      const double thd = uniform(rng, -0.1, 0.1);
      s.q = Eigen::Vector2d(x, th);
      s.qd = Eigen::Vector2d(xd, thd);
      break;
    }
    case EnvName::Reacher2: {
      const double q1 = uniform(rng, -0.1, 0.1);
      const double q2 = uniform(rng, -0.1, 0.1);
      const double qd1 = uniform(rng, -0.1, 0.1);
      const double qd2 = uniform(rng, -0.1, 0.1);
      s.q = Eigen::Vector2d(q1, q2);
      s.qd = Eigen::Vector2d(qd1, qd2);
      break;
    }
  }
  s.step_index = 0;
  return {s, observe(cfg, s)};
}

std::pair<EnvState, Observation> reset(const EnvConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  return reset(cfg, rng);
}

StepResult step(const EnvConfig& cfg, const EnvState& s, const Action& a) {
  const int dim = action_dim(cfg.env);
  if (a.size() != dim) {
    fail(ErrorKind::Dimension, "step: action has dimension " + std::to_string(a.size()) +
                                   ", expected " + std::to_string(dim));
  }
  check_finite(s, a);
  StepResult r;
  switch (cfg.env) {
    case EnvName::Pendulum:
      r = step_pendulum(cfg, s, std::clamp(a[0], -1.0, 1.0));
      break;
    case EnvName::Cartpole:
      r = step_cartpole(cfg, s, std::clamp(a[0], -1.0, 1.0));
      break;
    case EnvName::Reacher2:
      r = step_reacher(cfg, s,
                       Eigen::Vector2d(std::clamp(a[0], -1.0, 1.0), std::clamp(a[1], -1.0, 1.0)));
      break;
  }
  r.state.step_index = s.step_index + 1;
  r.observation = observe(cfg, r.state);
  r.done = s.step_index + 1 >= cfg.horizon;
  return r;
}

std::pair<double, double> reward_bounds(const EnvConfig& cfg) {
  const double u2 = cfg.max_torque * cfg.max_torque;
  switch (cfg.env) {
    case EnvName::Pendulum: {
      const double v = velocity_limit(EnvName::Pendulum, 0);
      return {-(kPi * kPi + 0.1 * v * v + 0.001 * u2), 0.0};
    }
    case EnvName::Cartpole: {
      const double track = attr(cfg, "slider", Attribute::JointRange);
      return {-1.0 - 0.01 * track * track - 0.001 * u2, 1.0};
    }
    case EnvName::Reacher2: {
      const double reach = attr(cfg, "link1", Attribute::Length) + attr(cfg, "link2", Attribute::Length) +
                           std::hypot(kReacherGoal[0], kReacherGoal[1]);
      return {-(reach * reach) - 0.001 * 2.0 * u2, 0.0};
    }
  }
  return {0.0, 0.0};
}

}  // namespace imitlab
