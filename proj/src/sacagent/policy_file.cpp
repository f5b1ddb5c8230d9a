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

#include "sacagent/policy_file.hpp"

#include <cstdio>
#include <cstring>

#include "common/bytes.hpp"
#include "common/file_io.hpp"
#include "common/hash.hpp"
#include "neuralcore/checkpoint.hpp"

namespace imitlab {

std::string encode_policy_file(const PolicyFile& f) {
  check_policy_shape(f.policy);
  std::string out;
  out.append(kPolicyMagic, 4);
  le::put<std::uint32_t>(out, kPolicyVersion);
  const std::string header = f.header.dump();
  le::put<std::uint32_t>(out, static_cast<std::uint32_t>(header.size()));
  out += header;
  le::put<std::uint32_t>(out, f.critics ? 4u : 2u);
  append_mlp(out, f.policy.mean_net);
  append_mlp(out, f.policy.log_std_head);
  if (f.critics) {
    append_mlp(out, f.critics->q1);
    append_mlp(out, f.critics->q2);
  }
  le::put<std::uint32_t>(out, crc32(std::as_bytes(std::span(out.data(), out.size()))));
  return out;
}

PolicyFile decode_policy_file(const std::string& bytes) {
  if (bytes.size() < 16) fail(ErrorKind::Format, "policy checkpoint: file too short");
  if (std::memcmp(bytes.data(), kPolicyMagic, 4) != 0) fail(ErrorKind::Format, "policy checkpoint: bad magic");
  const std::size_t body = bytes.size() - 4;
  std::uint32_t stored_crc;
  std::memcpy(&stored_crc, bytes.data() + body, 4);
  if (crc32(std::as_bytes(std::span(bytes.data(), body))) != stored_crc) {
    fail(ErrorKind::Format, "policy checkpoint: checksum mismatch");
  }

  le::Reader in(bytes.data(), body, "policy checkpoint");
  in.get_bytes(4);
  const auto version = in.get<std::uint32_t>();
  if (version != kPolicyVersion) {
    fail(ErrorKind::Format, "policy checkpoint: unsupported version " + std::to_string(version));
  }
  const auto header_len = in.get<std::uint32_t>();
  PolicyFile f;
  try {
    f.header = nlohmann::json::parse(in.get_bytes(header_len));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, std::string("policy checkpoint: bad header: ") + e.what());
  }
  const auto blocks = in.get<std::uint32_t>();
  if (blocks != 2 && blocks != 4) fail(ErrorKind::Format, "policy checkpoint: unexpected block count");
  f.policy.mean_net = read_mlp(in);
  f.policy.log_std_head = read_mlp(in);
  check_policy_shape(f.policy);
  if (blocks == 4) {
    TwinCritic c;
    c.q1 = read_mlp(in);
    c.q2 = read_mlp(in);
    f.critics = std::move(c);
  }
  if (in.remaining() != 0) fail(ErrorKind::Format, "policy checkpoint: trailing bytes");
  return f;
}

void save_policy_file(const PolicyFile& f, const std::filesystem::path& path) {
  write_file(path, encode_policy_file(f));
}

PolicyFile load_policy_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    fail(ErrorKind::MissingArtifact, "policy checkpoint '" + path.string() + "' does not exist");
  }
  return decode_policy_file(read_file(path));
}

std::uint64_t policy_hash(const GaussianPolicy& p) {
  std::string bytes;
  append_mlp(bytes, p.mean_net);
  append_mlp(bytes, p.log_std_head);
  return fnv1a64(std::as_bytes(std::span(bytes.data(), bytes.size())));
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace imitlab
