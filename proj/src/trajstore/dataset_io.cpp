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

#include "trajstore/dataset_io.hpp"

#include <cstring>

#include "common/bytes.hpp"
#include "common/file_io.hpp"
#include "common/hash.hpp"

namespace imitlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr Attribute kAttrs[] = {Attribute::Mass, Attribute::Length, Attribute::JointRange, Attribute::Friction};

std::uint32_t crc_of(const std::string& bytes, std::size_t n) {
  return crc32(std::as_bytes(std::span(bytes.data(), n)));
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorKind::Format, std::string("manifest: missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, std::string("manifest: field \"") + key + "\": " + e.what());
  }
}

}  // namespace

json env_config_to_json(const EnvConfig& cfg) {
  json parts = json::object();
  for (const auto& [name, attrs] : cfg.parts) {
    json p = json::object();
    for (Attribute a : kAttrs) {
      if (const auto v = attrs.get(a)) p[std::string(attribute_name(a))] = *v;
    }
    parts[name] = p;
  }
  return json{{"env", std::string(env_name_token(cfg.env))},
              {"dt", cfg.dt},
              {"horizon", cfg.horizon},
              {"gravity", cfg.gravity},
              {"max_torque", cfg.max_torque},
              {"parts", parts}};
}

EnvConfig env_config_from_json(const json& j) {
  EnvConfig cfg;
  cfg.env = parse_env_name(field<std::string>(j, "env"));
  cfg.dt = field<double>(j, "dt");
  cfg.horizon = field<int>(j, "horizon");
  cfg.gravity = field<double>(j, "gravity");
  cfg.max_torque = field<double>(j, "max_torque");
  const json parts = field<json>(j, "parts");
  if (!parts.is_object()) fail(ErrorKind::Format, "config: parts must be an object");
  for (const auto& [name, p] : parts.items()) {
    PartAttributes attrs;
    for (const auto& [key, value] : p.items()) {
      bool matched = false;
      for (Attribute a : kAttrs) {
        if (attribute_name(a) == key) {
          attrs.slot(a) = value.get<double>();
          matched = true;
        }
      }
      if (!matched) fail(ErrorKind::Format, "config: unknown attribute \"" + key + "\"");
    }
    cfg.parts[name] = attrs;
  }
  validate_config(cfg);
  return cfg;
}

std::string encode_payload(const VariantDataset& d) {
  const int obs_dim = observation_dim(d.env);
  const int act_dim = action_dim(d.env);
  std::string out;
  out.append(kDatasetMagic, 4);
  le::put<std::uint32_t>(out, kDatasetVersion);
  le::put<std::uint64_t>(out, d.trajectories.size());
  le::put<std::uint32_t>(out, static_cast<std::uint32_t>(obs_dim));
  le::put<std::uint32_t>(out, static_cast<std::uint32_t>(act_dim));
  for (const auto& t : d.trajectories) {
    validate_trajectory(t, obs_dim, act_dim);
    le::put<std::uint64_t>(out, static_cast<std::uint64_t>(t.length()));
  }
  for (const auto& t : d.trajectories) {
    le::put_f64s(out, t.states.data(), static_cast<std::size_t>(t.states.size()));
    le::put_f64s(out, t.actions.data(), static_cast<std::size_t>(t.actions.size()));
    le::put_f64s(out, t.rewards.data(), static_cast<std::size_t>(t.rewards.size()));
  }
  le::put<std::uint32_t>(out, crc_of(out, out.size()));
  return out;
}

std::uint32_t decode_payload(const std::string& bytes, VariantDataset& d) {
  if (bytes.size() < 4 + 4 + 8 + 8 + 4) fail(ErrorKind::Format, "dataset payload: file too short");
  if (std::memcmp(bytes.data(), kDatasetMagic, 4) != 0) fail(ErrorKind::Format, "dataset payload: bad magic");
  const std::size_t body = bytes.size() - 4;
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + body, 4);
  if (crc_of(bytes, body) != stored) fail(ErrorKind::Format, "dataset payload: checksum mismatch");

  le::Reader in(bytes.data(), body, "dataset payload");
  in.get_bytes(4);
  const auto version = in.get<std::uint32_t>();
  if (version != kDatasetVersion) {
    fail(ErrorKind::Format, "dataset payload: unsupported version " + std::to_string(version));
  }
  const auto count = in.get<std::uint64_t>();
  const auto obs_dim = in.get<std::uint32_t>();
  const auto act_dim = in.get<std::uint32_t>();
  if (static_cast<int>(obs_dim) != observation_dim(d.env) || static_cast<int>(act_dim) != action_dim(d.env)) {
    fail(ErrorKind::Format, "dataset payload: dimensions do not match the manifest environment");
  }
  if (count > in.remaining() / 8) fail(ErrorKind::Format, "dataset payload: truncated length table");
  std::vector<std::uint64_t> lengths(count);
  for (auto& len : lengths) len = in.get<std::uint64_t>();

  d.trajectories.clear();
  d.trajectories.reserve(count);
  const std::uint64_t row = obs_dim + act_dim + 1;
  for (std::uint64_t len : lengths) {
    if (len == 0 || len > in.remaining() / (row * sizeof(double))) {
      fail(ErrorKind::Format, "dataset payload: truncated or empty trajectory");
    }
    const auto n = static_cast<Eigen::Index>(len);
    Trajectory t{RowMatrix(n, obs_dim), RowMatrix(n, act_dim), Eigen::VectorXd(n)};
    in.get_f64s(t.states.data(), static_cast<std::size_t>(t.states.size()));
    in.get_f64s(t.actions.data(), static_cast<std::size_t>(t.actions.size()));
    in.get_f64s(t.rewards.data(), static_cast<std::size_t>(t.rewards.size()));
    d.trajectories.push_back(std::move(t));
  }
  if (in.remaining() != 0) fail(ErrorKind::Format, "dataset payload: trailing bytes");
  return stored;
}

void save_dataset(const VariantDataset& d, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create dataset directory '" + dir.string() + "': " + ec.message());

  const std::string payload = encode_payload(d);
  std::uint32_t payload_crc;
  std::memcpy(&payload_crc, payload.data() + payload.size() - 4, 4);

  json manifest{{"format", "imitlab-dataset"},
                {"version", kDatasetVersion},
                {"env", std::string(env_name_token(d.env))},
                {"variant", format_variant_id(d.variant)},
                {"base_config", env_config_to_json(d.base_config)},
                {"modified_config", env_config_to_json(d.modified_config)},
                {"policy_checkpoint", d.policy_checkpoint},
                {"seed", d.seed},
                {"rollout_mode", std::string(rollout_mode_token(d.mode))},
                {"target_reward", d.target_reward ? json(*d.target_reward) : json(nullptr)},
                {"n_trajectories", d.trajectories.size()},
                {"obs_dim", observation_dim(d.env)},
                {"act_dim", action_dim(d.env)},
                {"payload", kPayloadName},
                {"payload_crc32", payload_crc}};
  write_file(dir / kPayloadName, payload);
  write_file(dir / kManifestName, manifest.dump(2) + "\n");
}

VariantDataset load_dataset(const fs::path& dir) {
  if (!fs::exists(dir / kManifestName)) {
    fail(ErrorKind::MissingArtifact, "dataset '" + dir.string() + "' has no " + kManifestName);
  }
  json manifest;
  try {
    manifest = json::parse(read_file(dir / kManifestName));
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, std::string("manifest: ") + e.what());
  }
  if (field<std::string>(manifest, "format") != "imitlab-dataset") {
    fail(ErrorKind::Format, "manifest: not an imitlab dataset");
  }
  if (field<std::uint32_t>(manifest, "version") != kDatasetVersion) {
    fail(ErrorKind::Format, "manifest: unsupported version");
  }

  VariantDataset d;
  d.env = parse_env_name(field<std::string>(manifest, "env"));
  try {
    d.variant = parse_variant_id(field<std::string>(manifest, "variant"));
  } catch (const Error& e) {
    fail(ErrorKind::Format, std::string("manifest: ") + e.what());
  }
  d.base_config = env_config_from_json(field<json>(manifest, "base_config"));
  d.modified_config = env_config_from_json(field<json>(manifest, "modified_config"));
  d.policy_checkpoint = field<std::string>(manifest, "policy_checkpoint");
  d.seed = field<std::uint64_t>(manifest, "seed");
  d.mode = parse_rollout_mode(field<std::string>(manifest, "rollout_mode"));
  if (!manifest.contains("target_reward")) fail(ErrorKind::Format, "manifest: missing field \"target_reward\"");
  if (!manifest["target_reward"].is_null()) d.target_reward = manifest["target_reward"].get<double>();

  const auto payload_name = field<std::string>(manifest, "payload");
  const fs::path payload_path = dir / payload_name;
  if (!fs::exists(payload_path)) {
    fail(ErrorKind::MissingArtifact, "dataset payload '" + payload_path.string() + "' does not exist");
  }
  const std::uint32_t crc = decode_payload(read_file(payload_path), d);
  if (crc != field<std::uint32_t>(manifest, "payload_crc32")) {
    fail(ErrorKind::Format, "manifest: payload checksum does not match");
  }
  if (d.trajectories.size() != field<std::size_t>(manifest, "n_trajectories")) {
    fail(ErrorKind::Format, "manifest: trajectory count does not match payload");
  }
  if (d.base_config.env != d.env || d.modified_config.env != d.env) {
    fail(ErrorKind::Format, "manifest: config environment does not match");
  }
  return d;
}

DatasetSummary validate_dataset(const fs::path& dir) {
  const VariantDataset d = load_dataset(dir);
  const int obs_dim = observation_dim(d.env);
  const int act_dim = action_dim(d.env);
  DatasetSummary s{std::string(env_name_token(d.env)), format_variant_id(d.variant), d.trajectories.size(), 0,
                   obs_dim, act_dim};
  if (d.trajectories.empty()) fail(ErrorKind::Format, "dataset holds no trajectories");
  for (const auto& t : d.trajectories) {
    validate_trajectory(t, obs_dim, act_dim);
    if ((t.actions.array().abs() > 1.0).any()) fail(ErrorKind::Format, "dataset actions outside [-1, 1]");
    s.total_steps += static_cast<std::size_t>(t.length());
  }
  if (parse_variant_id(s.variant) != d.variant) fail(ErrorKind::Format, "variant id does not round-trip");
  EnvConfig expected = apply_variant(d.base_config, d.variant);
  if (!(expected == d.modified_config)) {
    fail(ErrorKind::Format, "modified_config is not base_config with the variant applied");
  }
  return s;
}

}  // namespace imitlab
