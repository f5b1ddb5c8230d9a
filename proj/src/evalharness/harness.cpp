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

#include "evalharness/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "common/error.hpp"
#include "common/hash.hpp"
#include "sacagent/policy_file.hpp"
#include "trajstore/dataset_io.hpp"

namespace imitlab {

namespace fs = std::filesystem;

fs::path base_policy_path(const fs::path& root, EnvName env) {
  return root / std::string(env_name_token(env)) / "base.pol";
}

fs::path variant_dir(const fs::path& root, EnvName env, const VariantId& v) {
  return root / std::string(env_name_token(env)) / "variants" / format_variant_id(v);
}

fs::path target_policy_path(const fs::path& root, EnvName env, const VariantId& v) {
  return variant_dir(root, env, v) / "target.pol";
}

double reward_eval(const EnvConfig& cfg, const GaussianPolicy& policy, int n_episodes, std::uint64_t seed) {
  if (n_episodes < 1) fail(ErrorKind::InvalidArgument, "reward_eval: n_episodes must be >= 1");
  if (policy.obs_dim() != observation_dim(cfg.env) || policy.act_dim() != action_dim(cfg.env)) {
    fail(ErrorKind::Dimension, "reward_eval: policy dimensions do not match the environment");
  }
  Rng rng(seed);
  double total = 0.0;
  for (int e = 0; e < n_episodes; ++e) {
    auto [state, obs] = reset(cfg, rng);
    double ret = 0.0;
    for (int t = 0; t < cfg.horizon; ++t) {
      StepResult r = step(cfg, state, deterministic_action(policy, obs));
      ret += r.reward;
      state = std::move(r.state);
      obs = std::move(r.observation);
      if (r.done) break;
    }
    total += ret;
  }
  return total / n_episodes;
}

std::uint64_t reward_seed(std::uint64_t run_seed, const VariantId& v) {
  return combine_seeds(combine_seeds(run_seed, fnv1a64(format_variant_id(v))), 0x7e3a11ULL);
}

namespace {

std::uint64_t cell_stream(std::uint64_t seed, const VariantId& v, int shot) {
  return combine_seeds(combine_seeds(seed, fnv1a64(format_variant_id(v))), static_cast<std::uint64_t>(shot));
}

int method_index(AdapterKind k) { return static_cast<int>(k); }

std::vector<int> meta_shots(const RunSpec& spec) {
  std::vector<int> s;
  for (int k : spec.shots) {
    if (k > 0) s.push_back(k);
  }
  if (s.empty()) s = {1, 10, 25, 50};
  return s;
}

}  // namespace

LoadedArtifacts load_artifacts(const fs::path& root, EnvName env, const std::vector<VariantId>& variants) {
  LoadedArtifacts art;
  art.env = env;
  std::vector<std::string> missing;
  const fs::path base_path = base_policy_path(root, env);
  if (!fs::exists(base_path)) {
    missing.push_back("base policy " + base_path.string());
  } else {
    art.base = load_policy_file(base_path).policy;
  }
  for (const VariantId& v : variants) {
    const std::string id = format_variant_id(v);
    const fs::path dir = variant_dir(root, env, v);
    if (!fs::exists(dir / kManifestName) || !fs::exists(dir / kPayloadName)) {
      missing.push_back("dataset " + dir.string());
      continue;
    }
    VariantDataset d = load_dataset(dir);
    if (d.env != env || !(d.variant == v)) {
      fail(ErrorKind::Format, "dataset " + dir.string() + " does not hold " + std::string(env_name_token(env)) +
                                  "/" + id);
    }
    if (!d.target_reward) {
      const fs::path tp = target_policy_path(root, env, v);
      if (!fs::exists(tp)) {
        missing.push_back("target reward for " + id + " (manifest has none and " + tp.string() + " is absent)");
        continue;
      }
      d.target_reward = reward_eval(d.modified_config, load_policy_file(tp).policy, 10, reward_seed(0, v));
    }
    art.datasets.emplace(id, std::move(d));
  }
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "missing artifacts under " << root.string() << ":";
    for (const auto& m : missing) msg << "\n  " << m;
    fail(ErrorKind::MissingArtifact, msg.str());
  }
  return art;
}

CellAdaptation adapt_cell(AdapterKind method, const GaussianPolicy& base, Provenance base_provenance,
                          const VariantDataset& data, int shot, std::uint64_t seed, const FinetuneConfig& cfg) {
  if (shot < 0) fail(ErrorKind::InvalidArgument, "adapt_cell: negative shot count");
  const std::uint64_t stream = cell_stream(seed, data.variant, shot);
  Rng support_rng(stream);
  CellAdaptation out;
  if (shot > 0) {
    out.split = sample_support(data, shot, support_rng);
  } else {
    out.split.query = data.trajectories;
  }
  const DemoSet support = demo_pairs(out.split.support);

  Rng adapt_rng(combine_seeds(stream, static_cast<std::uint64_t>(method_index(method)) + 1));
  if (method == AdapterKind::Scratch) {
    const GaussianPolicy fresh = scratch_policy(base.obs_dim(), base.act_dim(), base.hidden_dim(), adapt_rng);
    AdaptResult r = adapt(method, fresh, Provenance::Glorot, support, adapt_rng, cfg);
    out.params = std::move(r.params);
    out.provenance_warning = std::move(r.provenance_warning);
    return out;
  }
  AdaptResult r = adapt(method, base, base_provenance, support, adapt_rng, cfg);
  out.params = std::move(r.params);
  out.provenance_warning = std::move(r.provenance_warning);
  return out;
}

ResultRecord evaluate_cell(const LoadedArtifacts& art, const RunSpec& spec, const CellKey& key,
                           const GaussianPolicy* folded_base) {
  const std::string id = format_variant_id(key.variant);
  const auto it = art.datasets.find(id);
  if (it == art.datasets.end()) fail(ErrorKind::MissingArtifact, "evaluate_cell: no dataset loaded for " + id);
  const VariantDataset& data = it->second;

  const GaussianPolicy* base = &art.base;
  Provenance prov = Provenance::Sac;
  if (is_folded(key.method)) {
    if (folded_base == nullptr) {
      fail(ErrorKind::MissingArtifact,
           "evaluate_cell: " + std::string(adapter_token(key.method)) + " needs a fold-trained base for " + id);
    }
    base = folded_base;
    prov = expected_provenance(key.method);
  }
  const CellAdaptation adapted = adapt_cell(key.method, *base, prov, data, key.shot, key.seed, spec.finetune);

  ResultRecord r;
  r.env = std::string(env_name_token(art.env));
  r.variant = id;
  r.method = std::string(adapter_token(key.method));
  r.shot = key.shot;
  r.seed = key.seed;
  r.query_loss = query_loss(adapted.params, adapted.split);
  r.reward_mean =
      reward_eval(data.modified_config, adapted.params, spec.reward_episodes, reward_seed(key.seed, key.variant));
  r.reward_target = *data.target_reward;
  if (!std::isfinite(r.query_loss) || !std::isfinite(r.reward_mean)) {
    fail(ErrorKind::Numeric, "evaluate_cell: non-finite result for " + id + " " + r.method);
  }
  return r;
}

GaussianPolicy train_folded_base(const LoadedArtifacts& art, const RunSpec& spec, AdapterKind method,
                                 const FoldSpec& fold, std::uint64_t seed) {
  if (!is_folded(method)) fail(ErrorKind::InvalidArgument, "train_folded_base: method is not fold-trained");
  std::vector<const VariantDataset*> train;
  for (const VariantId& v : fold.train_variants) {
    const auto it = art.datasets.find(format_variant_id(v));
    if (it == art.datasets.end()) {
      fail(ErrorKind::MissingArtifact, "train_folded_base: no dataset loaded for " + format_variant_id(v));
    }
    train.push_back(&it->second);
  }
  const std::string fold_name(macro_category_name(fold.held_out));
  if (train.empty()) {
    fail(ErrorKind::InvalidArgument, "train_folded_base: fold " + fold_name + " has no training variants");
  }
  Rng rng(combine_seeds(combine_seeds(seed, 0xf01dULL + static_cast<std::uint64_t>(method_index(method))),
                        static_cast<std::uint64_t>(fold.held_out)));

  if (method == AdapterKind::MultiTask) {
    std::vector<DemoSet> parts;
    Eigen::Index total = 0;
    for (const VariantDataset* d : train) {
      parts.push_back(subsample_pairs(demo_pairs(d->trajectories), spec.multitask_pairs_per_variant, rng));
      total += parts.back().size();
    }
    DemoSet pool{Eigen::MatrixXd(art.base.obs_dim(), total), Eigen::MatrixXd(art.base.act_dim(), total)};
    Eigen::Index col = 0;
    for (const DemoSet& p : parts) {
      pool.obs.middleCols(col, p.size()) = p.obs;
      pool.actions.middleCols(col, p.size()) = p.actions;
      col += p.size();
    }
    return multitask_train(art.base, pool, spec.multitask, rng);
  }

  const std::vector<int> shots = meta_shots(spec);
  const Eigen::Index cap = spec.meta_task_pairs;
  TaskSampler sampler = [&](Rng& r) -> std::optional<MetaTask> {
    const VariantDataset& d =
        *train[std::uniform_int_distribution<std::size_t>(0, train.size() - 1)(r)];
    const int n = static_cast<int>(d.trajectories.size());
    if (n < 2) return std::nullopt;
    const int k = std::min(shots[std::uniform_int_distribution<std::size_t>(0, shots.size() - 1)(r)], n - 1);
    const TaskSplit split = sample_support(d, k, r);
    MetaTask task;
    task.support = subsample_pairs(demo_pairs(split.support), cap, r);
    task.query = subsample_pairs(demo_pairs(split.query), cap, r);
    return task;
  };
  return fomaml_train(art.base, sampler, spec.maml, rng);
}

std::vector<CellKey> experiment_cells(const RunSpec& spec) {
  std::vector<CellKey> cells;
  for (const VariantId& v : spec_variants(spec)) {
    for (AdapterKind m : spec.methods) {
      for (int shot : spec.shots) {
        for (std::uint64_t seed : spec.seeds) cells.push_back({v, m, shot, seed});
      }
    }
  }
  return cells;
}

namespace {

// Runs fn(i) for i in [0, n) on up to `jobs` threads; failures are collected
// per index and reported together.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn, const char* what) {
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::ostringstream msg;
  std::size_t failed = 0;
  for (const auto& e : errors) {
    if (e.empty()) continue;
    if (failed++ < 20) msg << "\n  " << e;
  }
  if (failed > 0) {
    fail(ErrorKind::Training, std::string(what) + ": " + std::to_string(failed) + " of " + std::to_string(n) +
                                  " tasks failed:" + msg.str());
  }
}

}  // namespace

std::vector<ResultRecord> run_experiment(const RunSpec& spec, const fs::path& artifacts, int jobs,
                                         const CellProgress& progress) {
  validate_run_spec(spec);
  if (spec.methods.empty()) return {};
  const std::vector<VariantId> variants = spec_variants(spec);
  const LoadedArtifacts art = load_artifacts(artifacts, spec.env, variants);
  const std::vector<FoldSpec> folds = make_folds(variants);

  // Fold-trained bases, indexed by (method, fold, seed).
  struct FoldedJob {
    AdapterKind method;
    std::size_t fold;
    std::uint64_t seed;
  };
  std::vector<FoldedJob> folded_jobs;
  for (AdapterKind m : spec.methods) {
    if (!is_folded(m)) continue;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      if (folds[f].eval_variants.empty()) continue;
      for (std::uint64_t seed : spec.seeds) folded_jobs.push_back({m, f, seed});
    }
  }
  std::vector<GaussianPolicy> folded(folded_jobs.size());
  parallel_for(
      folded_jobs.size(), jobs,
      [&](std::size_t i) {
        folded[i] = train_folded_base(art, spec, folded_jobs[i].method, folds[folded_jobs[i].fold],
                                      folded_jobs[i].seed);
      },
      "fold training");
  auto folded_for = [&](const CellKey& c) -> const GaussianPolicy* {
    if (!is_folded(c.method)) return nullptr;
    for (std::size_t i = 0; i < folded_jobs.size(); ++i) {
      const FoldedJob& j = folded_jobs[i];
      if (j.method == c.method && j.seed == c.seed &&
          folds[j.fold].held_out == macro_category(c.variant.category)) {
        return &folded[i];
      }
    }
    return nullptr;
  };

  const std::vector<CellKey> cells = experiment_cells(spec);
  std::vector<ResultRecord> records(cells.size());
  std::atomic<std::size_t> done{0};
  std::mutex progress_mu;
  parallel_for(
      cells.size(), jobs,
      [&](std::size_t i) {
        records[i] = evaluate_cell(art, spec, cells[i], folded_for(cells[i]));
        const std::size_t d = ++done;
        if (progress) {
          std::lock_guard<std::mutex> lock(progress_mu);
          progress(records[i], d, cells.size());
        }
      },
      "evaluation");
  return records;
}

}  // namespace imitlab
