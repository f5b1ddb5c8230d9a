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

#ifndef IMITLAB_IMITLAB_H_
#define IMITLAB_IMITLAB_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(IMITLAB_BUILDING_LIBRARY)
#define IMIT_API __declspec(dllexport)
#else
#define IMIT_API __declspec(dllimport)
#endif
#else
#define IMIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status; on failure imit_last_error() holds a
   thread-local message until the next call on the same thread. */
typedef enum imit_status {
  IMIT_OK = 0,
  IMIT_ERR_INVALID_ARGUMENT = 1,
  IMIT_ERR_PARSE = 2,
  IMIT_ERR_DOMAIN = 3,
  IMIT_ERR_DIMENSION = 4,
  IMIT_ERR_NUMERIC = 5,
  IMIT_ERR_FORMAT = 6,
  IMIT_ERR_IO = 7,
  IMIT_ERR_MISSING_ARTIFACT = 8,
  IMIT_ERR_TRAINING = 9,
  IMIT_ERR_INTERNAL = 10
} imit_status;

typedef struct imit_policy imit_policy;
typedef struct imit_dataset imit_dataset;
typedef struct imit_results imit_results;
typedef struct imit_strings imit_strings;

IMIT_API const char* imit_version(void);
IMIT_API const char* imit_last_error(void);
IMIT_API const char* imit_status_string(imit_status status);

/* String lists. */
IMIT_API size_t imit_strings_count(const imit_strings* s);
IMIT_API const char* imit_strings_get(const imit_strings* s, size_t index);
IMIT_API void imit_strings_free(imit_strings* s);

/* Variants. */
IMIT_API imit_status imit_catalog(const char* env, imit_strings** out);
/* Writes the canonical form of `id` (NUL-terminated) into buf. *needed gets
   the required size including the terminator. */
IMIT_API imit_status imit_variant_canonicalize(const char* id, char* buf, size_t buf_len, size_t* needed);
/* Structured-text form of the env config with the variant applied (variant
   may be NULL for the base config). */
IMIT_API imit_status imit_env_config_text(const char* env, const char* variant, imit_strings** out);

/* SAC pretraining. */
typedef struct imit_sac_options {
  int total_steps;
  int warmup_steps;
  int batch_size;
  int buffer_capacity;
  int hidden;
  double lr;
  double gamma;
  double tau;
  double alpha_init;
} imit_sac_options;

IMIT_API void imit_sac_options_default(imit_sac_options* opts);

typedef void (*imit_episode_cb)(int episode, double episode_return, int env_steps, void* user);

/* Trains on env (with variant applied when non-NULL). warm_start may be NULL;
   when given, its policy and any stored critics seed the run. */
IMIT_API imit_status imit_pretrain(const char* env, const char* variant, const imit_sac_options* opts, uint64_t seed,
                                   const imit_policy* warm_start, imit_episode_cb cb, void* user, imit_policy** out);

/* Policies. */
IMIT_API imit_status imit_policy_load(const char* path, imit_policy** out);
IMIT_API imit_status imit_policy_save(const imit_policy* p, const char* path);
IMIT_API void imit_policy_free(imit_policy* p);
/* 16 lowercase hex digits plus NUL. */
IMIT_API imit_status imit_policy_hash(const imit_policy* p, char out[17]);
IMIT_API imit_status imit_policy_dims(const imit_policy* p, int* obs_dim, int* act_dim, int* hidden);
/* JSON header of the checkpoint as a single string. */
IMIT_API imit_status imit_policy_header(const imit_policy* p, imit_strings** out);
IMIT_API imit_status imit_policy_act(const imit_policy* p, const double* obs, size_t obs_len, double* action,
                                     size_t act_len);
/* Mean return of deterministic episodes on env/variant (variant may be NULL). */
IMIT_API imit_status imit_reward_eval(const imit_policy* p, const char* env, const char* variant, int episodes,
                                      uint64_t seed, double* out);

/* Datasets. The environment comes from the checkpoint header, the variant
   too unless `variant` is non-NULL. horizon <= 0 uses the environment
   default; mode is "deterministic" or "stochastic". checkpoint_label is
   recorded in the manifest (may be NULL). The manifest also receives the
   target reward: 10 deterministic episodes of p on the variant. */
IMIT_API imit_status imit_rollout(const imit_policy* p, const char* variant, int n_traj, int horizon,
                                  const char* mode, uint64_t seed, const char* checkpoint_label,
                                  imit_dataset** out);
IMIT_API imit_status imit_dataset_load(const char* dir, imit_dataset** out);
IMIT_API imit_status imit_dataset_save(const imit_dataset* d, const char* dir);
IMIT_API void imit_dataset_free(imit_dataset* d);
IMIT_API imit_status imit_dataset_info(const imit_dataset* d, size_t* n_traj, int* obs_dim, int* act_dim);
/* Full format and content check; summary lines are "key=value". */
IMIT_API imit_status imit_dataset_validate(const char* dir, imit_strings** summary);

/* Adaptation of one (method, shots, seed) cell; support selection and
   training match `evaluate` for the same seed. Losses are on the query set. */
typedef struct imit_adapt_report {
  double query_loss_before;
  double query_loss_after;
  int support_trajectories;
  int query_trajectories;
  int provenance_mismatch;
} imit_adapt_report;

IMIT_API imit_status imit_adapt(const char* method, const imit_policy* base, const imit_dataset* data, int shots,
                                uint64_t seed, imit_policy** out, imit_adapt_report* report);

/* Experiments. */
typedef struct imit_record {
  const char* env;
  const char* variant;
  const char* method;
  int shot;
  uint64_t seed;
  double query_loss;
  double reward_mean;
  double reward_target;
} imit_record;

typedef void (*imit_cell_cb)(const imit_record* record, size_t done, size_t total, void* user);

IMIT_API imit_status imit_evaluate(const char* spec_path, const char* artifacts_dir, int jobs, imit_cell_cb cb,
                                   void* user, imit_results** out);
IMIT_API size_t imit_results_count(const imit_results* r);
/* Pointers in *out stay valid until the results are freed. */
IMIT_API imit_status imit_results_get(const imit_results* r, size_t index, imit_record* out);
IMIT_API imit_status imit_results_write_csv(const imit_results* r, const char* path);
IMIT_API imit_status imit_results_read_csv(const char* path, imit_results** out);
IMIT_API void imit_results_free(imit_results* r);
/* Aggregates and writes report files; `written` (may be NULL) lists them. */
IMIT_API imit_status imit_report(const imit_results* r, const char* out_dir, imit_strings** written);

#ifdef __cplusplus
}
#endif

#endif  // IMITLAB_IMITLAB_H_
