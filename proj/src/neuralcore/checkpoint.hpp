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

#include "common/bytes.hpp"
#include "neuralcore/mlp.hpp"

namespace imitlab {

// Parameter block layout (little-endian):
//   char[4]  magic "IMLP"
//   u32      version (1)
//   u32      layer count L
//   L x (u32 out, u32 in)
//   per layer: out*in f64 weights (row-major), then out f64 biases
inline constexpr char kMlpMagic[4] = {'I', 'M', 'L', 'P'};
inline constexpr std::uint32_t kMlpVersion = 1;

void append_mlp(std::string& out, const Mlp& p);
Mlp read_mlp(le::Reader& in);

std::string encode_mlp(const Mlp& p);
Mlp decode_mlp(const std::string& bytes);

void save_mlp(const Mlp& p, const std::filesystem::path& path);
Mlp load_mlp(const std::filesystem::path& path);

/// FNV-1a over the encoded parameter block.
std::uint64_t mlp_hash(const Mlp& p);

}  // namespace imitlab
