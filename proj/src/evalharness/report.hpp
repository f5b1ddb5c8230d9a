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

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "evalharness/harness.hpp"

namespace imitlab {

inline constexpr const char* kResultsHeader = "env,variant,method,shot,seed,query_loss,reward_mean,reward_target";

/// Means over variants x seeds for one (env, method, shot).
struct AggregateRow {
  std::string env;
  std::string method;
  int shot = 0;
  std::size_t cells = 0;
  double query_loss_mean = 0.0;
  double reward_mean = 0.0;
  double reward_target_mean = 0.0;
};

/// Means over one variant category (massinc, jointdec, ...).
struct CategoryRow {
  std::string env;
  std::string method;
  int shot = 0;
  std::string category;
  std::size_t cells = 0;
  double query_loss_mean = 0.0;
};

/// Seed-averaged FineTune loss against another method on one variant.
struct ScatterPoint {
  std::string env;
  std::string method;
  int shot = 0;
  std::string variant;
  double finetune_loss = 0.0;
  double other_loss = 0.0;
};

struct AggregateReport {
  std::vector<AggregateRow> rows;
  std::vector<CategoryRow> categories;
  std::vector<ScatterPoint> scatter;
};

/// Order-invariant summary of a complete grid. Missing or duplicate cells
/// raise an InvalidArgument error listing them.
AggregateReport aggregate(std::vector<ResultRecord> records);

/// Records sorted by (env, variant, method, shot, seed).
void sort_records(std::vector<ResultRecord>& records);

std::string format_results_csv(const std::vector<ResultRecord>& records);
std::vector<ResultRecord> parse_results_csv(const std::string& text);
void write_results_csv(const std::vector<ResultRecord>& records, const std::filesystem::path& path);
std::vector<ResultRecord> read_results_csv(const std::filesystem::path& path);

/// aggregate.csv, loss_vs_shot.tsv, scatter.tsv, category.tsv and one SVG per
/// figure file. Returns the written paths.
std::vector<std::filesystem::path> write_report(const AggregateReport& report, const std::filesystem::path& out_dir);

}  // namespace imitlab
