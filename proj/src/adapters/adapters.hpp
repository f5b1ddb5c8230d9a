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
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "common/rng.hpp"
#include "neuralcore/optim.hpp"
#include "sacagent/gaussian_policy.hpp"
#include "trajstore/trajectory.hpp"

namespace imitlab {

enum class AdapterKind : std::uint8_t { FineTune, HeadFineTune, Scratch, MetaLearned, MultiTask };

inline constexpr AdapterKind kAllAdapterKinds[] = {AdapterKind::FineTune, AdapterKind::HeadFineTune,
                                                   AdapterKind::Scratch, AdapterKind::MetaLearned,
                                                   AdapterKind::MultiTask};

std::string_view adapter_token(AdapterKind k);
std::optional<AdapterKind> adapter_from_token(std::string_view token);
AdapterKind parse_adapter_kind(std::string_view token);
/// Meta-learned and multi-task bases are trained per k-fold split.
bool is_folded(AdapterKind k);

/// Where a set of base parameters came from.
enum class Provenance : std::uint8_t { Sac, Glorot, MetaTrained, MultiTaskTrained };

std::string_view provenance_token(Provenance p);
std::optional<Provenance> provenance_from_token(std::string_view token);
Provenance expected_provenance(AdapterKind k);

struct FinetuneConfig {
  int epochs = 20;
  double lr = 1e-3;
  double weight_decay = 1e-5;
  int batch_size = 256;

  StepSchedule schedule() const { return StepSchedule::halving(lr, epochs); }
};

struct MamlConfig {
  double inner_lr = 0.01;
  double meta_lr = 0.001;
  int meta_batch = 100;
  int inner_steps = 1;
  int meta_iterations = 300;
};

struct MultiTaskConfig {
  int epochs = 50;
  double lr = 0.01;
  double weight_decay = 1e-5;
  int batch_size = 256;

  /// Halving at floor(0.5 * 50) = 25 and floor(0.75 * 50) = 37.
  StepSchedule schedule() const { return StepSchedule::halving(lr, epochs); }
};

/// Behavioral-cloning loss mean((tanh(mean_net(s)) - a)^2) and its gradient
/// with respect to mean_net.
struct BcLoss {
  double loss = 0.0;
  Gradients grads;
};

BcLoss bc_loss(const Mlp& mean_net, const DemoSet& pairs);
double bc_loss_value(const Mlp& mean_net, const DemoSet& pairs);

struct BcTrainOptions {
  StepSchedule schedule;
  double weight_decay = 0.0;
  int batch_size = 256;
  LayerMask trainable;  // empty: all layers
};

/// Mini-batch Adam over shuffled pairs; `epoch_losses` receives the mean
/// batch loss of each epoch.
Mlp bc_train(const Mlp& init, const DemoSet& pairs, const BcTrainOptions& opts, Rng& rng,
             std::vector<double>* epoch_losses = nullptr);

GaussianPolicy bc_finetune(const GaussianPolicy& policy, const DemoSet& support, const FinetuneConfig& cfg,
                           Rng& rng);
/// As bc_finetune but only the output layer of mean_net moves.
GaussianPolicy head_finetune(const GaussianPolicy& policy, const DemoSet& support, const FinetuneConfig& cfg,
                             Rng& rng);
/// Fresh Glorot-initialized policy of the standard shape.
GaussianPolicy scratch_policy(int obs_dim, int act_dim, int hidden, Rng& rng);

/// One full-batch SGD step on the support BC loss.
Mlp fomaml_inner(const Mlp& params, const DemoSet& support, double inner_lr);

struct MetaTask {
  DemoSet support;
  DemoSet query;
};

/// Returns nullopt when no more tasks can be produced.
using TaskSampler = std::function<std::optional<MetaTask>(Rng&)>;

/// First-order meta-gradient: query BC gradient at the inner-adapted params.
Gradients fomaml_meta_gradient(const Mlp& params, const MetaTask& task, double inner_lr);

GaussianPolicy fomaml_train(const GaussianPolicy& init, const TaskSampler& sampler, const MamlConfig& cfg,
                            Rng& rng);

GaussianPolicy multitask_train(const GaussianPolicy& init, const DemoSet& pool, const MultiTaskConfig& cfg,
                               Rng& rng, std::vector<double>* epoch_losses = nullptr);

struct AdaptResult {
  GaussianPolicy params;
  std::optional<std::string> provenance_warning;
};

/// 20-epoch Adam protocol (head-masked for HeadFineTune); empty support
/// returns the base parameters unchanged.
AdaptResult adapt(AdapterKind kind, const GaussianPolicy& base, Provenance base_provenance,
                  const DemoSet& support, Rng& rng, const FinetuneConfig& cfg = {});

}  // namespace imitlab
