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

#include "imitlab/imitlab.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "adapters/adapters.hpp"
#include "common/alloc.hpp"
#include "common/error.hpp"
#include "envsim/dynamics.hpp"
#include "envsim/env_config.hpp"
#include "evalharness/harness.hpp"
#include "evalharness/report.hpp"
#include "sacagent/policy_file.hpp"
#include "sacagent/sac.hpp"
#include "trajstore/dataset_io.hpp"

struct imit_policy {
  imitlab::PolicyFile file;
};

struct imit_dataset {
  imitlab::VariantDataset data;
};

struct imit_results {
  std::vector<imitlab::ResultRecord> records;
};

struct imit_strings {
  std::vector<std::string> items;
};

namespace {

using namespace imitlab;
using nlohmann::json;

thread_local std::string g_last_error;

imit_status status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return IMIT_ERR_INVALID_ARGUMENT;
    case ErrorKind::Parse: return IMIT_ERR_PARSE;
    case ErrorKind::Domain: return IMIT_ERR_DOMAIN;
    case ErrorKind::Dimension: return IMIT_ERR_DIMENSION;
    case ErrorKind::Numeric: return IMIT_ERR_NUMERIC;
    case ErrorKind::Format: return IMIT_ERR_FORMAT;
    case ErrorKind::Io: return IMIT_ERR_IO;
    case ErrorKind::MissingArtifact: return IMIT_ERR_MISSING_ARTIFACT;
    case ErrorKind::Training: return IMIT_ERR_TRAINING;
  }
  return IMIT_ERR_INTERNAL;
}

template <typename Fn>
imit_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return IMIT_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const json::exception& e) {
    g_last_error = std::string("json: ") + e.what();
    return IMIT_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return IMIT_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return IMIT_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return IMIT_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) fail(ErrorKind::InvalidArgument, std::string(what) + " must not be NULL");
}

EnvConfig config_for(const char* env, const char* variant) {
  need(env, "env");
  EnvConfig cfg = default_config(parse_env_name(env));
  if (variant != nullptr && *variant != '\0') cfg = apply_variant(cfg, parse_variant_id(variant));
  return cfg;
}

imit_strings* make_strings(std::vector<std::string> items) { return new imit_strings{std::move(items)}; }

std::string header_string(const json& h, const char* key) {
  if (!h.contains(key) || !h.at(key).is_string()) return {};
  return h.at(key).get<std::string>();
}

}  // namespace

extern "C" {

const char* imit_version(void) { return "0.1.0"; }

const char* imit_last_error(void) { return g_last_error.c_str(); }

const char* imit_status_string(imit_status status) {
  switch (status) {
    case IMIT_OK: return "ok";
    case IMIT_ERR_INVALID_ARGUMENT: return "invalid argument";
    case IMIT_ERR_PARSE: return "parse error";
    case IMIT_ERR_DOMAIN: return "domain error";
    case IMIT_ERR_DIMENSION: return "dimension mismatch";
    case IMIT_ERR_NUMERIC: return "numeric error";
    case IMIT_ERR_FORMAT: return "format error";
    case IMIT_ERR_IO: return "i/o error";
    case IMIT_ERR_MISSING_ARTIFACT: return "missing artifact";
    case IMIT_ERR_TRAINING: return "training failure";
    case IMIT_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

size_t imit_strings_count(const imit_strings* s) { return s == nullptr ? 0 : s->items.size(); }

const char* imit_strings_get(const imit_strings* s, size_t index) {
  if (s == nullptr || index >= s->items.size()) return nullptr;
  return s->items[index].c_str();
}

void imit_strings_free(imit_strings* s) { delete s; }

imit_status imit_catalog(const char* env, imit_strings** out) {
  return guarded([&] {
    need(env, "env");
    need(out, "out");
    std::vector<std::string> ids;
    for (const VariantId& v : variant_catalog(parse_env_name(env))) ids.push_back(format_variant_id(v));
    *out = make_strings(std::move(ids));
  });
}

imit_status imit_variant_canonicalize(const char* id, char* buf, size_t buf_len, size_t* needed) {
  return guarded([&] {
    need(id, "id");
    const std::string canon = format_variant_id(parse_variant_id(id));
    if (needed != nullptr) *needed = canon.size() + 1;
    if (buf == nullptr || buf_len < canon.size() + 1) {
      fail(ErrorKind::InvalidArgument, "buffer too small for canonical id");
    }
    std::memcpy(buf, canon.c_str(), canon.size() + 1);
  });
}

imit_status imit_env_config_text(const char* env, const char* variant, imit_strings** out) {
  return guarded([&] {
    need(out, "out");
    *out = make_strings({env_config_to_text(config_for(env, variant))});
  });
}

void imit_sac_options_default(imit_sac_options* opts) {
  if (opts == nullptr) return;
  const SacConfig d;
  opts->total_steps = d.total_steps;
  opts->warmup_steps = d.warmup_steps;
  opts->batch_size = d.batch_size;
  opts->buffer_capacity = d.buffer_capacity;
  opts->hidden = d.hidden;
  opts->lr = d.lr;
  opts->gamma = d.gamma;
  opts->tau = d.tau;
  opts->alpha_init = d.alpha_init;
}

imit_status imit_pretrain(const char* env, const char* variant, const imit_sac_options* opts, uint64_t seed,
                          const imit_policy* warm_start, imit_episode_cb cb, void* user, imit_policy** out) {
  return guarded([&] {
    need(out, "out");
    tune_allocator();
    const EnvConfig cfg = config_for(env, variant);
    SacConfig sc;
    if (opts != nullptr) {
      sc.total_steps = opts->total_steps;
      sc.warmup_steps = opts->warmup_steps;
      sc.batch_size = opts->batch_size;
      sc.buffer_capacity = opts->buffer_capacity;
      sc.hidden = opts->hidden;
      sc.lr = opts->lr;
      sc.gamma = opts->gamma;
      sc.tau = opts->tau;
      sc.alpha_init = opts->alpha_init;
    }
    std::optional<SacWarmStart> warm;
    if (warm_start != nullptr) warm = SacWarmStart{warm_start->file.policy, warm_start->file.critics};
    SacProgress progress;
    if (cb != nullptr) progress = [&](int ep, double ret, int steps) { cb(ep, ret, steps, user); };
    SacResult res = sac_train(cfg, sc, seed, warm ? &*warm : nullptr, progress);

    auto handle = std::make_unique<imit_policy>();
    json& h = handle->file.header;
    h["env"] = std::string(env_name_token(cfg.env));
    h["variant"] = (variant != nullptr && *variant != '\0') ? json(format_variant_id(parse_variant_id(variant)))
                                                          : json(nullptr);
    h["provenance"] = std::string(provenance_token(Provenance::Sac));
    h["seed"] = seed;
    h["training_steps"] = res.steps;
    h["warmup_steps"] = sc.warmup_steps;
    h["final_alpha"] = res.final_alpha;
    h["warm_start"] = warm_start != nullptr ? json(hash_hex(policy_hash(warm_start->file.policy))) : json(nullptr);
    const std::size_t n = res.episode_returns.size();
    double tail = 0.0;
    const std::size_t k = std::min<std::size_t>(n, 10);
    for (std::size_t i = n - k; i < n; ++i) tail += res.episode_returns[i];
    h["last_episode_returns_mean"] = k > 0 ? json(tail / static_cast<double>(k)) : json(nullptr);
    handle->file.policy = std::move(res.policy);
    handle->file.critics = std::move(res.critics);
    *out = handle.release();
  });
}

imit_status imit_policy_load(const char* path, imit_policy** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    auto handle = std::make_unique<imit_policy>();
    handle->file = load_policy_file(path);
    *out = handle.release();
  });
}

imit_status imit_policy_save(const imit_policy* p, const char* path) {
  return guarded([&] {
    need(p, "policy");
    need(path, "path");
    save_policy_file(p->file, path);
  });
}

void imit_policy_free(imit_policy* p) { delete p; }

imit_status imit_policy_hash(const imit_policy* p, char out[17]) {
  return guarded([&] {
    need(p, "policy");
    need(out, "out");
    const std::string h = hash_hex(policy_hash(p->file.policy));
    std::memcpy(out, h.c_str(), 17);
  });
}

imit_status imit_policy_dims(const imit_policy* p, int* obs_dim, int* act_dim, int* hidden) {
  return guarded([&] {
    need(p, "policy");
    if (obs_dim != nullptr) *obs_dim = p->file.policy.obs_dim();
    if (act_dim != nullptr) *act_dim = p->file.policy.act_dim();
    if (hidden != nullptr) *hidden = p->file.policy.hidden_dim();
  });
}

imit_status imit_policy_header(const imit_policy* p, imit_strings** out) {
  return guarded([&] {
    need(p, "policy");
    need(out, "out");
    *out = make_strings({p->file.header.dump()});
  });
}

imit_status imit_policy_act(const imit_policy* p, const double* obs, size_t obs_len, double* action,
                            size_t act_len) {
  return guarded([&] {
    need(p, "policy");
    need(obs, "obs");
    need(action, "action");
    const GaussianPolicy& pol = p->file.policy;
    if (obs_len != static_cast<size_t>(pol.obs_dim()) || act_len != static_cast<size_t>(pol.act_dim())) {
      fail(ErrorKind::Dimension, "imit_policy_act: buffer sizes do not match the policy");
    }
    const Eigen::VectorXd a =
        deterministic_action(pol, Eigen::Map<const Eigen::VectorXd>(obs, static_cast<Eigen::Index>(obs_len)));
    for (size_t i = 0; i < act_len; ++i) action[i] = a[static_cast<Eigen::Index>(i)];
  });
}

imit_status imit_reward_eval(const imit_policy* p, const char* env, const char* variant, int episodes,
                             uint64_t seed, double* out) {
  return guarded([&] {
    need(p, "policy");
    need(out, "out");
    *out = reward_eval(config_for(env, variant), p->file.policy, episodes, seed);
  });
}

imit_status imit_rollout(const imit_policy* p, const char* variant, int n_traj, int horizon, const char* mode,
                         uint64_t seed, const char* checkpoint_label, imit_dataset** out) {
  return guarded([&] {
    need(p, "policy");
    need(out, "out");
    need(mode, "mode");
    const std::string env = header_string(p->file.header, "env");
    if (env.empty()) fail(ErrorKind::InvalidArgument, "imit_rollout: checkpoint header names no env");
    std::string vid = variant != nullptr ? std::string(variant) : header_string(p->file.header, "variant");
    if (vid.empty()) {
      fail(ErrorKind::InvalidArgument, "imit_rollout: no variant given and the checkpoint header names none");
    }
    if (n_traj < 0) fail(ErrorKind::InvalidArgument, "imit_rollout: n_traj must be >= 0");
    auto handle = std::make_unique<imit_dataset>();
    VariantDataset& d = handle->data;
    d.env = parse_env_name(env);
    d.variant = parse_variant_id(vid);
    d.base_config = default_config(d.env);
    d.modified_config = apply_variant(d.base_config, d.variant);
    if (horizon > 0) d.modified_config.horizon = horizon;
    d.base_config.horizon = d.modified_config.horizon;
    d.policy_checkpoint = checkpoint_label != nullptr ? checkpoint_label : hash_hex(policy_hash(p->file.policy));
    d.seed = seed;
    d.mode = parse_rollout_mode(mode);
    Rng rng(seed);
    d.trajectories = rollout(d.modified_config, p->file.policy, n_traj, d.modified_config.horizon, rng, d.mode);
    d.target_reward = reward_eval(d.modified_config, p->file.policy, 10, reward_seed(0, d.variant));
    *out = handle.release();
  });
}

imit_status imit_dataset_load(const char* dir, imit_dataset** out) {
  return guarded([&] {
    need(dir, "dir");
    need(out, "out");
    auto handle = std::make_unique<imit_dataset>();
    handle->data = load_dataset(dir);
    *out = handle.release();
  });
}

imit_status imit_dataset_save(const imit_dataset* d, const char* dir) {
  return guarded([&] {
    need(d, "dataset");
    need(dir, "dir");
    save_dataset(d->data, dir);
  });
}

void imit_dataset_free(imit_dataset* d) { delete d; }

imit_status imit_dataset_info(const imit_dataset* d, size_t* n_traj, int* obs_dim, int* act_dim) {
  return guarded([&] {
    need(d, "dataset");
    if (n_traj != nullptr) *n_traj = d->data.trajectories.size();
    if (obs_dim != nullptr) *obs_dim = observation_dim(d->data.env);
    if (act_dim != nullptr) *act_dim = action_dim(d->data.env);
  });
}

imit_status imit_dataset_validate(const char* dir, imit_strings** summary) {
  return guarded([&] {
    need(dir, "dir");
    const DatasetSummary s = validate_dataset(dir);
    if (summary != nullptr) {
      *summary = make_strings({"env=" + s.env, "variant=" + s.variant, "trajectories=" + std::to_string(s.trajectories),
                               "total_steps=" + std::to_string(s.total_steps), "obs_dim=" + std::to_string(s.obs_dim),
                               "act_dim=" + std::to_string(s.act_dim)});
    }
  });
}

imit_status imit_adapt(const char* method, const imit_policy* base, const imit_dataset* data, int shots,
                       uint64_t seed, imit_policy** out, imit_adapt_report* report) {
  return guarded([&] {
    need(method, "method");
    need(base, "base");
    need(data, "dataset");
    need(out, "out");
    tune_allocator();
    const AdapterKind kind = parse_adapter_kind(method);
    const std::string prov_token = header_string(base->file.header, "provenance");
    Provenance prov = Provenance::Sac;
    if (!prov_token.empty()) {
      const auto p = provenance_from_token(prov_token);
      if (!p) fail(ErrorKind::Format, "imit_adapt: unknown provenance \"" + prov_token + "\" in base header");
      prov = *p;
    }
    const GaussianPolicy& bp = base->file.policy;
    if (bp.obs_dim() != observation_dim(data->data.env) || bp.act_dim() != action_dim(data->data.env)) {
      fail(ErrorKind::Dimension, "imit_adapt: base policy does not match the dataset environment");
    }
    CellAdaptation a = adapt_cell(kind, bp, prov, data->data, shots, seed, FinetuneConfig{});

    auto handle = std::make_unique<imit_policy>();
    json& h = handle->file.header;
    h["env"] = std::string(env_name_token(data->data.env));
    h["variant"] = format_variant_id(data->data.variant);
    h["provenance"] = kind == AdapterKind::Scratch ? std::string(provenance_token(Provenance::Glorot)) : prov_token.empty() ? std::string("sac") : prov_token;
    h["adapter"] = std::string(adapter_token(kind));
    h["base_hash"] = hash_hex(policy_hash(bp));
    h["shots"] = shots;
    h["seed"] = seed;
    if (a.provenance_warning) h["provenance_warning"] = *a.provenance_warning;
    if (report != nullptr) {
      // Scratch is measured against its own Glorot start, which adapt_cell
      // does not return; report the SAC base loss instead.
      report->query_loss_before = query_loss(bp, a.split);
      report->query_loss_after = query_loss(a.params, a.split);
      report->support_trajectories = static_cast<int>(a.split.support.size());
      report->query_trajectories = static_cast<int>(a.split.query.size());
      report->provenance_mismatch = a.provenance_warning ? 1 : 0;
    }
    handle->file.policy = std::move(a.params);
    *out = handle.release();
  });
}

imit_status imit_evaluate(const char* spec_path, const char* artifacts_dir, int jobs, imit_cell_cb cb, void* user,
                          imit_results** out) {
  return guarded([&] {
    need(spec_path, "spec_path");
    need(artifacts_dir, "artifacts_dir");
    need(out, "out");
    tune_allocator();
    const RunSpec spec = load_run_spec(spec_path);
    CellProgress progress;
    if (cb != nullptr) {
      progress = [&](const ResultRecord& r, std::size_t done, std::size_t total) {
        const imit_record rec{r.env.c_str(),  r.variant.c_str(), r.method.c_str(), r.shot,
                              r.seed,         r.query_loss,      r.reward_mean,      r.reward_target};
        cb(&rec, done, total, user);
      };
    }
    auto handle = std::make_unique<imit_results>();
    handle->records = run_experiment(spec, artifacts_dir, jobs, progress);
    *out = handle.release();
  });
}

size_t imit_results_count(const imit_results* r) { return r == nullptr ? 0 : r->records.size(); }

imit_status imit_results_get(const imit_results* r, size_t index, imit_record* out) {
  return guarded([&] {
    need(r, "results");
    need(out, "out");
    if (index >= r->records.size()) fail(ErrorKind::InvalidArgument, "imit_results_get: index out of range");
    const ResultRecord& rec = r->records[index];
    *out = imit_record{rec.env.c_str(), rec.variant.c_str(), rec.method.c_str(), rec.shot,
                       rec.seed,        rec.query_loss,      rec.reward_mean,      rec.reward_target};
  });
}

imit_status imit_results_write_csv(const imit_results* r, const char* path) {
  return guarded([&] {
    need(r, "results");
    need(path, "path");
    write_results_csv(r->records, path);
  });
}

imit_status imit_results_read_csv(const char* path, imit_results** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    auto handle = std::make_unique<imit_results>();
    handle->records = read_results_csv(path);
    *out = handle.release();
  });
}

void imit_results_free(imit_results* r) { delete r; }

imit_status imit_report(const imit_results* r, const char* out_dir, imit_strings** written) {
  return guarded([&] {
    need(r, "results");
    need(out_dir, "out_dir");
    const AggregateReport rep = aggregate(r->records);
    std::vector<std::string> paths;
    for (const auto& p : write_report(rep, out_dir)) paths.push_back(p.string());
    if (written != nullptr) *written = make_strings(std::move(paths));
  });
}

}  // extern "C"
