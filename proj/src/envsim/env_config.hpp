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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "envsim/variant.hpp"

namespace imitlab {

enum class EnvName : std::uint8_t { Pendulum, Cartpole, Reacher2 };

inline constexpr EnvName kAllEnvs[] = {EnvName::Pendulum, EnvName::Cartpole,
                                       EnvName::Reacher2};

std::string_view env_name_token(EnvName e);
std::optional<EnvName> env_name_from_token(std::string_view token);
/// Like env_name_from_token but throws Error(InvalidArgument).
EnvName parse_env_name(std::string_view token);

/// Physical attributes of a named part. Present values are strictly positive.
struct PartAttributes {
  std::optional<double> mass;         // kg
  std::optional<double> length;       // m
  std::optional<double> joint_range;  // rad or m, symmetric half-range
  std::optional<double> friction;     // viscous coefficient

  std::optional<double> get(Attribute a) const;
  std::optional<double>& slot(Attribute a);

  friend bool operator==(const PartAttributes&, const PartAttributes&) = default;
};

struct EnvConfig {
  EnvName env = EnvName::Pendulum;
  std::map<std::string, PartAttributes> parts;
  double dt = 0.01;
  int horizon = 200;
  double gravity = 9.81;
  double max_torque = 1.0;

  const PartAttributes& part(const std::string& name) const;

  friend bool operator==(const EnvConfig&, const EnvConfig&) = default;
};

/// Base (unmodified) configuration of each desk environment.
EnvConfig default_config(EnvName env);

/// Throws Error(Domain) when the configuration violates its invariants.
void validate_config(const EnvConfig& cfg);

/// Scales the targeted attribute by (1 + p/100) or (1 - p/100).
EnvConfig apply_variant(const EnvConfig& cfg, const VariantId& v);

/// Percentages swept per category.
std::vector<double> quantity_grid(VariantCategory c);

/// Deterministic enumeration of category x quantity x part for `env`.
std::vector<VariantId> variant_catalog(EnvName env);

/// Human-readable `key = value` text with one `[part]` section per part.
std::string env_config_to_text(const EnvConfig& cfg);
EnvConfig env_config_from_text(std::string_view text);

}  // namespace imitlab
