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
#include "common/error.hpp"

namespace imitlab {

Mlp fomaml_inner(const Mlp& params, const DemoSet& support, double inner_lr) {
  if (support.empty()) fail(ErrorKind::InvalidArgument, "fomaml_inner: empty support set");
  Mlp adapted = params;
  if (inner_lr == 0.0) return adapted;
  sgd_step(adapted, bc_loss(params, support).grads, inner_lr);
  return adapted;
}

Gradients fomaml_meta_gradient(const Mlp& params, const MetaTask& task, double inner_lr) {
  if (task.query.empty()) fail(ErrorKind::InvalidArgument, "meta task has an empty query set");
  const Mlp adapted = fomaml_inner(params, task.support, inner_lr);
  return bc_loss(adapted, task.query).grads;
}

GaussianPolicy fomaml_train(const GaussianPolicy& init, const TaskSampler& sampler, const MamlConfig& cfg,
                            Rng& rng) {
  if (cfg.inner_steps != 1) fail(ErrorKind::InvalidArgument, "fomaml_train: only one inner step is supported");
  if (cfg.meta_batch < 1) fail(ErrorKind::InvalidArgument, "fomaml_train: meta_batch must be >= 1");
  if (cfg.meta_iterations < 0) fail(ErrorKind::InvalidArgument, "fomaml_train: meta_iterations must be >= 0");
  GaussianPolicy out = init;
  AdamState opt = make_adam(out.mean_net);
  for (int it = 0; it < cfg.meta_iterations; ++it) {
    Gradients meta = Gradients::zeros_like(out.mean_net);
    for (int b = 0; b < cfg.meta_batch; ++b) {
      std::optional<MetaTask> task = sampler(rng);
      if (!task) {
        fail(ErrorKind::InvalidArgument, "fomaml_train: task sampler exhausted at iteration " + std::to_string(it));
      }
      meta += fomaml_meta_gradient(out.mean_net, *task, cfg.inner_lr);
    }
    meta *= 1.0 / cfg.meta_batch;
    adam_step(out.mean_net, meta, opt, cfg.meta_lr);
  }
  return out;
}

}  // namespace imitlab
