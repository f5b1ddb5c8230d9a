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

#include "neuralcore/checkpoint.hpp"

#include <cstring>

#include "common/file_io.hpp"
#include "common/hash.hpp"

namespace imitlab {

void append_mlp(std::string& out, const Mlp& p) {
  out.append(kMlpMagic, 4);
  le::put<std::uint32_t>(out, kMlpVersion);
  le::put<std::uint32_t>(out, static_cast<std::uint32_t>(p.layers.size()));
  for (const auto& l : p.layers) {
    le::put<std::uint32_t>(out, static_cast<std::uint32_t>(l.out_dim()));
    le::put<std::uint32_t>(out, static_cast<std::uint32_t>(l.in_dim()));
  }
  for (const auto& l : p.layers) {
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w = l.weight;
    le::put_f64s(out, w.data(), static_cast<std::size_t>(w.size()));
    le::put_f64s(out, l.bias.data(), static_cast<std::size_t>(l.bias.size()));
  }
}

Mlp read_mlp(le::Reader& in) {
  const std::string magic = in.get_bytes(4);
  if (std::memcmp(magic.data(), kMlpMagic, 4) != 0) fail(ErrorKind::Format, "parameter block: bad magic");
  const auto version = in.get<std::uint32_t>();
  if (version != kMlpVersion) {
    fail(ErrorKind::Format, "parameter block: unsupported version " + std::to_string(version));
  }
  const auto count = in.get<std::uint32_t>();
  if (count == 0 || count > 64) fail(ErrorKind::Format, "parameter block: implausible layer count");
  std::vector<std::pair<std::uint32_t, std::uint32_t>> dims(count);
  for (auto& [rows, cols] : dims) {
    rows = in.get<std::uint32_t>();
    cols = in.get<std::uint32_t>();
    if (rows == 0 || cols == 0 || rows > (1u << 20) || cols > (1u << 20)) {
      fail(ErrorKind::Format, "parameter block: implausible layer dims");
    }
  }
  for (std::size_t i = 1; i < dims.size(); ++i) {
    if (dims[i].second != dims[i - 1].first) fail(ErrorKind::Format, "parameter block: layer dims do not chain");
  }
  Mlp p;
  for (const auto& [rows, cols] : dims) {
    const std::size_t needed = (static_cast<std::size_t>(rows) * cols + rows) * sizeof(double);
    if (needed > in.remaining()) fail(ErrorKind::Format, "parameter block: truncated data");
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w(rows, cols);
    in.get_f64s(w.data(), static_cast<std::size_t>(w.size()));
    Eigen::VectorXd b(rows);
    in.get_f64s(b.data(), rows);
    p.layers.push_back({Eigen::MatrixXd(w), std::move(b)});
  }
  return p;
}

std::string encode_mlp(const Mlp& p) {
  std::string out;
  append_mlp(out, p);
  return out;
}

Mlp decode_mlp(const std::string& bytes) {
  le::Reader in(bytes.data(), bytes.size(), "parameter block");
  Mlp p = read_mlp(in);
  if (in.remaining() != 0) fail(ErrorKind::Format, "parameter block: trailing bytes");
  return p;
}

void save_mlp(const Mlp& p, const std::filesystem::path& path) { write_file(path, encode_mlp(p)); }

Mlp load_mlp(const std::filesystem::path& path) { return decode_mlp(read_file(path)); }

std::uint64_t mlp_hash(const Mlp& p) {
  const std::string bytes = encode_mlp(p);
  return fnv1a64(std::as_bytes(std::span(bytes.data(), bytes.size())));
}

}  // namespace imitlab
