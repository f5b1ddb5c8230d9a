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

#include "neuralcore/mlp.hpp"

#include <cmath>
#include <string>

#include "common/error.hpp"

namespace imitlab {

std::vector<int> Mlp::dims() const {
  std::vector<int> d;
  if (layers.empty()) return d;
  d.push_back(layers.front().in_dim());
  for (const auto& l : layers) d.push_back(l.out_dim());
  return d;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

bool Mlp::all_finite() const {
  for (const auto& l : layers) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

Gradients Gradients::zeros_like(const Mlp& p) {
  Gradients g;
  g.layers.reserve(p.layers.size());
  for (const auto& l : p.layers) {
    g.layers.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                        Eigen::VectorXd::Zero(l.bias.size())});
  }
  return g;
}

Gradients& Gradients::operator+=(const Gradients& other) {
  if (other.layers.size() != layers.size()) fail(ErrorKind::Dimension, "gradient shapes differ");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].weight += other.layers[i].weight;
    layers[i].bias += other.layers[i].bias;
  }
  return *this;
}

Gradients& Gradients::operator*=(double s) {
  for (auto& l : layers) {
    l.weight *= s;
    l.bias *= s;
  }
  return *this;
}

bool Gradients::all_finite() const {
  for (const auto& l : layers) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

double glorot_bound(int fan_in, int fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

Eigen::MatrixXd glorot_init(int fan_in, int fan_out, Rng& rng) {
  if (fan_in <= 0 || fan_out <= 0) fail(ErrorKind::InvalidArgument, "glorot_init: dimensions must be positive");
  const double bound = glorot_bound(fan_in, fan_out);
  std::uniform_real_distribution<double> dist(-bound, bound);
  Eigen::MatrixXd w(fan_out, fan_in);
  // Row-major fill so the draw order matches the checkpoint layout.
  for (int r = 0; r < fan_out; ++r) {
    for (int c = 0; c < fan_in; ++c) w(r, c) = dist(rng);
  }
  return w;
}

Mlp make_mlp(const std::vector<int>& dims, Rng& rng) {
  if (dims.size() < 2) fail(ErrorKind::InvalidArgument, "make_mlp: need at least input and output dims");
  Mlp p;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    p.layers.push_back({glorot_init(dims[i], dims[i + 1], rng), Eigen::VectorXd::Zero(dims[i + 1])});
  }
  return p;
}

Mlp zero_mlp(const std::vector<int>& dims) {
  if (dims.size() < 2) fail(ErrorKind::InvalidArgument, "zero_mlp: need at least input and output dims");
  Mlp p;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    if (dims[i] <= 0 || dims[i + 1] <= 0) fail(ErrorKind::InvalidArgument, "zero_mlp: dims must be positive");
    p.layers.push_back({Eigen::MatrixXd::Zero(dims[i + 1], dims[i]), Eigen::VectorXd::Zero(dims[i + 1])});
  }
  return p;
}

namespace {

void check_input(const Mlp& p, Eigen::Index rows, const char* op) {
  if (p.layers.empty()) fail(ErrorKind::Dimension, std::string(op) + ": empty network");
  if (rows != p.input_dim()) {
    fail(ErrorKind::Dimension, std::string(op) + ": input has dimension " + std::to_string(rows) +
                                   ", network expects " + std::to_string(p.input_dim()));
  }
}

}  // namespace

ForwardCache mlp_forward(const Mlp& p, const Eigen::MatrixXd& x) {
  check_input(p, x.rows(), "mlp_forward");
  ForwardCache cache;
  const std::size_t n = p.layers.size();
  cache.inputs.reserve(n);
  cache.pre.reserve(n);
  cache.inputs.push_back(x);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& layer = p.layers[i];
    Eigen::MatrixXd z = layer.weight * cache.inputs[i];
    z.colwise() += layer.bias;
    cache.pre.push_back(std::move(z));
    if (i + 1 < n) {
      cache.inputs.push_back(cache.pre.back().cwiseMax(0.0));
    }
  }
  cache.output = cache.pre.back();
  return cache;
}

Eigen::MatrixXd mlp_predict(const Mlp& p, const Eigen::MatrixXd& x) {
  check_input(p, x.rows(), "mlp_predict");
  Eigen::MatrixXd h = x;
  for (std::size_t i = 0; i < p.layers.size(); ++i) {
    Eigen::MatrixXd z = p.layers[i].weight * h;
    z.colwise() += p.layers[i].bias;
    if (i + 1 < p.layers.size()) z = z.cwiseMax(0.0);
    h = std::move(z);
  }
  return h;
}

Eigen::VectorXd mlp_predict(const Mlp& p, const Eigen::VectorXd& x) {
  return mlp_predict(p, Eigen::MatrixXd(x)).col(0);
}

BackwardResult mlp_backward(const Mlp& p, const ForwardCache& cache, const Eigen::MatrixXd& dy,
                            const Eigen::MatrixXd* d_last_hidden, bool param_grads) {
  const std::size_t n = p.layers.size();
  if (cache.pre.size() != n || cache.inputs.size() != n) {
    fail(ErrorKind::Dimension, "mlp_backward: cache does not match network depth");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (cache.inputs[i].rows() != p.layers[i].in_dim() || cache.pre[i].rows() != p.layers[i].out_dim()) {
      fail(ErrorKind::Dimension, "mlp_backward: stale cache for layer " + std::to_string(i));
    }
  }
  const Eigen::Index batch = cache.output.cols();
  if (dy.rows() != p.output_dim() || dy.cols() != batch) {
    fail(ErrorKind::Dimension, "mlp_backward: upstream gradient shape mismatch");
  }

  BackwardResult out;
  if (param_grads) out.grads.layers.resize(n);
  Eigen::MatrixXd delta = dy;  // gradient w.r.t. pre-activation of layer i
  for (std::size_t k = n; k-- > 0;) {
    const auto& layer = p.layers[k];
    if (param_grads) {
      out.grads.layers[k].weight.noalias() = delta * cache.inputs[k].transpose();
      out.grads.layers[k].bias = delta.rowwise().sum();
    }
    Eigen::MatrixXd upstream = layer.weight.transpose() * delta;
    if (k == 0) {
      out.input_grad = std::move(upstream);
      break;
    }
    if (k + 1 == n && d_last_hidden != nullptr) {
      if (d_last_hidden->rows() != upstream.rows() || d_last_hidden->cols() != upstream.cols()) {
        fail(ErrorKind::Dimension, "mlp_backward: side-head gradient shape mismatch");
      }
      upstream += *d_last_hidden;
    }
    delta = (cache.pre[k - 1].array() > 0.0).select(upstream, 0.0);
  }
  return out;
}

LossResult mse_loss(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    fail(ErrorKind::Dimension, "mse_loss: prediction and target shapes differ");
  }
  if (pred.size() == 0) fail(ErrorKind::InvalidArgument, "mse_loss: empty batch");
  const double n = static_cast<double>(pred.size());
  LossResult r;
  const Eigen::MatrixXd diff = pred - target;
  r.loss = diff.squaredNorm() / n;
  r.grad = (2.0 / n) * diff;
  return r;
}

}  // namespace imitlab
