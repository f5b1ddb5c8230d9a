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
#include <string>

#include <json.hpp>

#include "trajstore/trajectory.hpp"

namespace imitlab {

// A dataset is a directory holding two files.
//
// manifest.json: format, version, env, variant, base_config, modified_config,
//   policy_checkpoint, seed, rollout_mode, target_reward (or null),
//   n_trajectories, obs_dim, act_dim, payload, payload_crc32.
//
// trajectories.bin (little-endian):
//   char[4]  magic "IMIT"
//   u32      version (1)
//   u64      trajectory count N
//   u32      obs_dim, u32 act_dim
//   N x u64  trajectory lengths T_i
//   per trajectory: T_i*obs_dim f64 states, T_i*act_dim f64 actions,
//                   T_i f64 rewards (row-major)
//   u32      CRC-32 of every preceding byte
inline constexpr char kDatasetMagic[4] = {'I', 'M', 'I', 'T'};
inline constexpr std::uint32_t kDatasetVersion = 1;
inline constexpr const char* kManifestName = "manifest.json";
inline constexpr const char* kPayloadName = "trajectories.bin";

nlohmann::json env_config_to_json(const EnvConfig& cfg);
EnvConfig env_config_from_json(const nlohmann::json& j);

std::string encode_payload(const VariantDataset& d);
/// Decodes into d.trajectories; returns the stored CRC.
std::uint32_t decode_payload(const std::string& bytes, VariantDataset& d);

void save_dataset(const VariantDataset& d, const std::filesystem::path& dir);
VariantDataset load_dataset(const std::filesystem::path& dir);

struct DatasetSummary {
  std::string env;
  std::string variant;
  std::size_t trajectories = 0;
  std::size_t total_steps = 0;
  int obs_dim = 0;
  int act_dim = 0;
};

/// Loads the dataset and checks every format and content invariant.
DatasetSummary validate_dataset(const std::filesystem::path& dir);

}  // namespace imitlab
