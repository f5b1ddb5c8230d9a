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

#include "adapters/adapters.hpp"

#include <algorithm>
#include <numeric>

#include "common/error.hpp"

namespace imitlab {

std::string_view adapter_token(AdapterKind k) {
  switch (k) {
    case AdapterKind::FineTune: return "finetune";
    case AdapterKind::HeadFineTune: return "headfinetune";
    case AdapterKind::Scratch: return "scratch";
    case AdapterKind::MetaLearned: return "meta";
    case AdapterKind::MultiTask: return "multitask";
  }
  return "unknown";
}

std::optional<AdapterKind> adapter_from_token(std::string_view token) {
  for (AdapterKind k : kAllAdapterKinds) {
    if (adapter_token(k) == token) return k;
  }
  return std::nullopt;
}

AdapterKind parse_adapter_kind(std::string_view token) {
  const auto k = adapter_from_token(token);
  if (!k) {
    fail(ErrorKind::InvalidArgument, "unknown method \"" + std::string(token) +
                                         "\" (expected finetune, headfinetune, scratch, meta or multitask)");
  }
  return *k;
}

bool is_folded(AdapterKind k) { return k == AdapterKind::MetaLearned || k == AdapterKind::MultiTask; }

std::string_view provenance_token(Provenance p) {
  switch (p) {
    case Provenance::Sac: return "sac";
    case Provenance::Glorot: return "glorot";
    case Provenance::MetaTrained: return "meta";
    case Provenance::MultiTaskTrained: return "multitask";
  }
  return "unknown";
}

std::optional<Provenance> provenance_from_token(std::string_view token) {
  for (Provenance p : {Provenance::Sac, Provenance::Glorot, Provenance::MetaTrained, Provenance::MultiTaskTrained}) {
    if (provenance_token(p) == token) return p;
  }
  return std::nullopt;
}

Provenance expected_provenance(AdapterKind k) {
  switch (k) {
    case AdapterKind::FineTune:
    case AdapterKind::HeadFineTune: return Provenance::Sac;
    case AdapterKind::Scratch: return Provenance::Glorot;
    case AdapterKind::MetaLearned: return Provenance::MetaTrained;
    case AdapterKind::MultiTask: return Provenance::MultiTaskTrained;
  }
  return Provenance::Sac;
}

BcLoss bc_loss(const Mlp& mean_net, const DemoSet& pairs) {
  if (pairs.empty()) fail(ErrorKind::InvalidArgument, "bc_loss: empty pair set");
  const ForwardCache cache = mlp_forward(mean_net, pairs.obs);
  const Eigen::MatrixXd pred = cache.output.array().tanh();
  LossResult l = mse_loss(pred, pairs.actions);
  const Eigen::MatrixXd d_mean = (l.grad.array() * (1.0 - pred.array().square())).matrix();
  return BcLoss{l.loss, mlp_backward(mean_net, cache, d_mean).grads};
}

double bc_loss_value(const Mlp& mean_net, const DemoSet& pairs) {
  if (pairs.empty()) fail(ErrorKind::InvalidArgument, "bc_loss: empty pair set");
  const Eigen::MatrixXd pred = mlp_predict(mean_net, pairs.obs).array().tanh();
  return (pred - pairs.actions).squaredNorm() / static_cast<double>(pred.size());
}

Mlp bc_train(const Mlp& init, const DemoSet& pairs, const BcTrainOptions& opts, Rng& rng,
             std::vector<double>* epoch_losses) {
  if (pairs.empty()) fail(ErrorKind::InvalidArgument, "behavioral cloning needs a non-empty pair set");
  if (pairs.obs.rows() != init.input_dim() || pairs.actions.rows() != init.output_dim()) {
    fail(ErrorKind::Dimension, "behavioral cloning: data dimensions do not match the network");
  }
  if (opts.batch_size < 1) fail(ErrorKind::InvalidArgument, "behavioral cloning: batch_size must be >= 1");
  validate_schedule(opts.schedule);

  Mlp p = init;
  AdamState opt = make_adam(p, opts.weight_decay);
  const Eigen::Index n = pairs.size();
  const Eigen::Index batch = std::min<Eigen::Index>(opts.batch_size, n);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  for (int epoch = 0; epoch < opts.schedule.total_epochs; ++epoch) {
    const double lr = lr_at(opts.schedule, epoch);
    double loss_sum = 0.0;
    int batches = 0;
    if (batch == n) {
      const BcLoss l = bc_loss(p, pairs);
      adam_step(p, l.grads, opt, lr, opts.trainable);
      loss_sum = l.loss;
      batches = 1;
    } else {
      std::shuffle(order.begin(), order.end(), rng);
      for (Eigen::Index start = 0; start < n; start += batch) {
        const Eigen::Index len = std::min(batch, n - start);
        DemoSet mb{Eigen::MatrixXd(pairs.obs.rows(), len), Eigen::MatrixXd(pairs.actions.rows(), len)};
        for (Eigen::Index j = 0; j < len; ++j) {
          const Eigen::Index src = order[static_cast<std::size_t>(start + j)];
          mb.obs.col(j) = pairs.obs.col(src);
          mb.actions.col(j) = pairs.actions.col(src);
        }
        const BcLoss l = bc_loss(p, mb);
        adam_step(p, l.grads, opt, lr, opts.trainable);
        loss_sum += l.loss;
        ++batches;
      }
    }
    if (epoch_losses) epoch_losses->push_back(loss_sum / batches);
  }
  return p;
}

namespace {

GaussianPolicy finetune_impl(const GaussianPolicy& policy, const DemoSet& support, const FinetuneConfig& cfg,
                             Rng& rng, bool head_only) {
  if (support.empty()) fail(ErrorKind::InvalidArgument, "fine-tuning needs a non-empty support set");
  if (cfg.epochs < 0) fail(ErrorKind::InvalidArgument, "fine-tuning: epochs must be >= 0");
  if (!(cfg.lr > 0.0)) fail(ErrorKind::InvalidArgument, "fine-tuning: lr must be positive");
  GaussianPolicy out = policy;
  if (cfg.epochs == 0) return out;
  BcTrainOptions opts{cfg.schedule(), cfg.weight_decay, cfg.batch_size, {}};
  if (head_only) {
    opts.trainable.assign(policy.mean_net.layers.size(), false);
    opts.trainable.back() = true;
  }
  out.mean_net = bc_train(policy.mean_net, support, opts, rng);
  return out;
}

}  // namespace

GaussianPolicy bc_finetune(const GaussianPolicy& policy, const DemoSet& support, const FinetuneConfig& cfg,
                           Rng& rng) {
  return finetune_impl(policy, support, cfg, rng, false);
}

GaussianPolicy head_finetune(const GaussianPolicy& policy, const DemoSet& support, const FinetuneConfig& cfg,
                             Rng& rng) {
  return finetune_impl(policy, support, cfg, rng, true);
}

GaussianPolicy scratch_policy(int obs_dim, int act_dim, int hidden, Rng& rng) {
  return make_gaussian_policy(obs_dim, act_dim, hidden, rng);
}

GaussianPolicy multitask_train(const GaussianPolicy& init, const DemoSet& pool, const MultiTaskConfig& cfg,
                               Rng& rng, std::vector<double>* epoch_losses) {
  if (pool.empty()) fail(ErrorKind::InvalidArgument, "multitask_train: empty pool");
  GaussianPolicy out = init;
  if (cfg.epochs == 0) return out;
  BcTrainOptions opts{cfg.schedule(), cfg.weight_decay, cfg.batch_size, {}};
  out.mean_net = bc_train(init.mean_net, pool, opts, rng, epoch_losses);
  return out;
}

AdaptResult adapt(AdapterKind kind, const GaussianPolicy& base, Provenance base_provenance,
                  const DemoSet& support, Rng& rng, const FinetuneConfig& cfg) {
  AdaptResult r;
  if (base_provenance != expected_provenance(kind)) {
    r.provenance_warning = "method " + std::string(adapter_token(kind)) + " expects " +
                           std::string(provenance_token(expected_provenance(kind))) + " base parameters, got " +
                           std::string(provenance_token(base_provenance));
  }
  if (support.empty()) {
    r.params = base;
    return r;
  }
  r.params = kind == AdapterKind::HeadFineTune ? head_finetune(base, support, cfg, rng)
                                               : bc_finetune(base, support, cfg, rng);
  return r;
}

}  // namespace imitlab
