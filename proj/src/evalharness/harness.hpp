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
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adapters/adapters.hpp"
#include "envsim/env_config.hpp"
#include "evalharness/folds.hpp"
#include "evalharness/run_spec.hpp"
#include "trajstore/trajectory.hpp"

namespace imitlab {

// Artifact layout under a root directory:
//   <root>/<env>/base.pol                     SAC-pretrained base policy
//   <root>/<env>/variants/<id>/manifest.json  target dataset
//   <root>/<env>/variants/<id>/trajectories.bin
//   <root>/<env>/variants/<id>/target.pol     target policy (optional)
std::filesystem::path base_policy_path(const std::filesystem::path& root, EnvName env);
std::filesystem::path variant_dir(const std::filesystem::path& root, EnvName env, const VariantId& v);
std::filesystem::path target_policy_path(const std::filesystem::path& root, EnvName env, const VariantId& v);

/// Row of results.csv.
struct ResultRecord {
  std::string env;
  std::string variant;
  std::string method;
  int shot = 0;
  std::uint64_t seed = 0;
  double query_loss = 0.0;
  double reward_mean = 0.0;
  double reward_target = 0.0;

  friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

/// Mean undiscounted return of deterministic-action episodes.
double reward_eval(const EnvConfig& cfg, const GaussianPolicy& policy, int n_episodes, std::uint64_t seed);

/// Episode seed used for reward evaluation on a variant. Target rewards use
/// run seed 0.
std::uint64_t reward_seed(std::uint64_t run_seed, const VariantId& v);

struct CellAdaptation {
  GaussianPolicy params;
  TaskSplit split;  // shot 0: empty support, every trajectory in the query
  std::optional<std::string> provenance_warning;
};

/// Support selection plus adaptation for one cell. Scratch only takes the
/// shape of `base`. Methods sharing (variant, shot, seed) see the same support.
CellAdaptation adapt_cell(AdapterKind method, const GaussianPolicy& base, Provenance base_provenance,
                          const VariantDataset& data, int shot, std::uint64_t seed, const FinetuneConfig& cfg);

/// Everything evaluate_cell reads, loaded once per experiment.
struct LoadedArtifacts {
  EnvName env = EnvName::Pendulum;
  GaussianPolicy base;
  std::map<std::string, VariantDataset> datasets;  // keyed by variant id
};

/// Loads the base policy and one dataset per variant; every missing piece is
/// named in a single MissingArtifact error.
LoadedArtifacts load_artifacts(const std::filesystem::path& root, EnvName env,
                               const std::vector<VariantId>& variants);

struct CellKey {
  VariantId variant;
  AdapterKind method = AdapterKind::FineTune;
  int shot = 0;
  std::uint64_t seed = 0;
};

/// `folded_base` is the meta or multi-task base for the cell's fold; it is
/// required for those methods and ignored otherwise.
ResultRecord evaluate_cell(const LoadedArtifacts& art, const RunSpec& spec, const CellKey& key,
                           const GaussianPolicy* folded_base = nullptr);

/// Base parameters for a folded method, trained on the fold's train variants.
GaussianPolicy train_folded_base(const LoadedArtifacts& art, const RunSpec& spec, AdapterKind method,
                                 const FoldSpec& fold, std::uint64_t seed);

/// Cells in canonical order: variant (spec order), method (spec order), shot, seed.
std::vector<CellKey> experiment_cells(const RunSpec& spec);

using CellProgress = std::function<void(const ResultRecord&, std::size_t done, std::size_t total)>;

/// Runs the whole grid on `jobs` worker threads. Output order and content do
/// not depend on `jobs`.
std::vector<ResultRecord> run_experiment(const RunSpec& spec, const std::filesystem::path& artifacts, int jobs = 1,
                                         const CellProgress& progress = {});

}  // namespace imitlab
