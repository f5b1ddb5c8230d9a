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
#include <optional>
#include <string>

#include <json.hpp>

#include "sacagent/gaussian_policy.hpp"
#include "sacagent/sac.hpp"

namespace imitlab {

// Policy checkpoint layout (little-endian):
//   char[4]  magic "IPOL"
//   u32      version (1)
//   u32      header length H
//   H bytes  JSON header (env, variant, seed, training_steps, provenance, ...)
//   u32      parameter block count (2, or 4 with critics)
//   blocks   mean_net, log_std_head[, q1, q2] in the IMLP block format
//   u32      CRC-32 of every preceding byte
inline constexpr char kPolicyMagic[4] = {'I', 'P', 'O', 'L'};
inline constexpr std::uint32_t kPolicyVersion = 1;

struct PolicyFile {
  nlohmann::json header = nlohmann::json::object();
  GaussianPolicy policy;
  std::optional<TwinCritic> critics;
};

std::string encode_policy_file(const PolicyFile& f);
PolicyFile decode_policy_file(const std::string& bytes);
void save_policy_file(const PolicyFile& f, const std::filesystem::path& path);
PolicyFile load_policy_file(const std::filesystem::path& path);

/// FNV-1a over the encoded mean_net and log_std_head blocks; ignores header
/// and critics.
std::uint64_t policy_hash(const GaussianPolicy& p);
std::string hash_hex(std::uint64_t h);

}  // namespace imitlab
