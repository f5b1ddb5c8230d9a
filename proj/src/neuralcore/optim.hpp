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

#include <cstdint>
#include <utility>
#include <vector>

#include "neuralcore/mlp.hpp"

namespace imitlab {

/// Adam moments for one parameter record. Weight decay is L2-coupled: the
/// effective gradient is g + weight_decay * p.
struct AdamState {
  Gradients m;
  Gradients v;
  std::int64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

AdamState make_adam(const Mlp& p, double weight_decay = 0.0);

/// Per-layer trainability; an empty mask trains every layer. Frozen layers
/// are left bit-identical (no decay, no moment update).
using LayerMask = std::vector<bool>;

void adam_step(Mlp& p, const Gradients& g, AdamState& st, double lr, const LayerMask& trainable = {});

/// p <- p - lr * g.
void sgd_step(Mlp& p, const Gradients& g, double lr);

/// Scalar Adam, used for the entropy temperature.
struct ScalarAdam {
  double m = 0.0;
  double v = 0.0;
  std::int64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  double step(double param, double grad, double lr);
};

/// Piecewise-constant learning rate: base_lr divided by every divisor whose
/// milestone epoch floor(fraction * total_epochs) has been reached.
struct StepSchedule {
  double base_lr = 1e-3;
  int total_epochs = 20;
  std::vector<std::pair<double, double>> milestones;  // (fraction, divisor)

  static StepSchedule halving(double base_lr, int total_epochs);
};

void validate_schedule(const StepSchedule& s);
int milestone_epoch(const StepSchedule& s, std::size_t i);
double lr_at(const StepSchedule& s, int epoch);

}  // namespace imitlab
