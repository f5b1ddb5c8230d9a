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

#include "neuralcore/optim.hpp"

#include <cmath>
#include <string>

#include "common/error.hpp"

namespace imitlab {

namespace {

void check_congruent(const Mlp& p, const Gradients& g, const char* op) {
  bool ok = p.layers.size() == g.layers.size();
  for (std::size_t i = 0; ok && i < p.layers.size(); ++i) {
    ok = p.layers[i].weight.rows() == g.layers[i].weight.rows() &&
         p.layers[i].weight.cols() == g.layers[i].weight.cols() &&
         p.layers[i].bias.size() == g.layers[i].bias.size();
  }
  if (!ok) fail(ErrorKind::Dimension, std::string(op) + ": gradient shape does not match parameters");
}

template <typename Param, typename Grad, typename Moment>
void adam_update(Param& p, const Grad& g, Moment& m, Moment& v, const AdamState& st, double lr,
                 double bc1, double bc2) {
  const auto geff = (g.array() + st.weight_decay * p.array()).eval();
  m.array() = st.beta1 * m.array() + (1.0 - st.beta1) * geff;
  v.array() = st.beta2 * v.array() + (1.0 - st.beta2) * geff.square();
  p.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + st.eps);
}

}  // namespace

AdamState make_adam(const Mlp& p, double weight_decay) {
  AdamState st;
  st.m = Gradients::zeros_like(p);
  st.v = Gradients::zeros_like(p);
  st.weight_decay = weight_decay;
  return st;
}

void adam_step(Mlp& p, const Gradients& g, AdamState& st, double lr, const LayerMask& trainable) {
  check_congruent(p, g, "adam_step");
  check_congruent(p, st.m, "adam_step");
  if (!g.all_finite() || !p.all_finite() || !std::isfinite(lr)) {
    fail(ErrorKind::Numeric, "adam_step: non-finite parameters, gradients or learning rate");
  }
  if (!trainable.empty() && trainable.size() != p.layers.size()) {
    fail(ErrorKind::Dimension, "adam_step: layer mask size mismatch");
  }
  st.t += 1;
  const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.t));
  const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.t));
  for (std::size_t i = 0; i < p.layers.size(); ++i) {
    if (!trainable.empty() && !trainable[i]) continue;
    adam_update(p.layers[i].weight, g.layers[i].weight, st.m.layers[i].weight, st.v.layers[i].weight, st, lr,
                bc1, bc2);
    adam_update(p.layers[i].bias, g.layers[i].bias, st.m.layers[i].bias, st.v.layers[i].bias, st, lr, bc1,
                bc2);
  }
}

void sgd_step(Mlp& p, const Gradients& g, double lr) {
  check_congruent(p, g, "sgd_step");
  for (std::size_t i = 0; i < p.layers.size(); ++i) {
    p.layers[i].weight -= lr * g.layers[i].weight;
    p.layers[i].bias -= lr * g.layers[i].bias;
  }
}

double ScalarAdam::step(double param, double grad, double lr) {
  t += 1;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad * grad;
  const double mhat = m / (1.0 - std::pow(beta1, static_cast<double>(t)));
  const double vhat = v / (1.0 - std::pow(beta2, static_cast<double>(t)));
  return param - lr * mhat / (std::sqrt(vhat) + eps);
}

StepSchedule StepSchedule::halving(double base_lr, int total_epochs) {
  return StepSchedule{base_lr, total_epochs, {{0.5, 2.0}, {0.75, 2.0}}};
}

void validate_schedule(const StepSchedule& s) {
  if (s.total_epochs < 0) fail(ErrorKind::InvalidArgument, "schedule: total_epochs must be >= 0");
  if (!(s.base_lr > 0.0)) fail(ErrorKind::InvalidArgument, "schedule: base_lr must be positive");
  double prev = 0.0;
  for (const auto& [fraction, divisor] : s.milestones) {
    if (!(fraction > prev && fraction < 1.0)) {
      fail(ErrorKind::InvalidArgument, "schedule: milestone fractions must be strictly increasing in (0,1)");
    }
    if (!(divisor > 0.0)) fail(ErrorKind::InvalidArgument, "schedule: divisors must be positive");
    prev = fraction;
  }
}

int milestone_epoch(const StepSchedule& s, std::size_t i) {
  return static_cast<int>(std::floor(s.milestones.at(i).first * s.total_epochs));
}

double lr_at(const StepSchedule& s, int epoch) {
  if (epoch < 0 || epoch >= s.total_epochs) {
    fail(ErrorKind::InvalidArgument, "lr_at: epoch " + std::to_string(epoch) + " outside [0, " +
                                         std::to_string(s.total_epochs) + ")");
  }
  double lr = s.base_lr;
  for (std::size_t i = 0; i < s.milestones.size(); ++i) {
    if (milestone_epoch(s, i) <= epoch) lr /= s.milestones[i].second;
  }
  return lr;
}

}  // namespace imitlab
