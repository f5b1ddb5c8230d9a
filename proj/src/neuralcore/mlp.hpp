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

#include <Eigen/Core>

#include <vector>

#include "common/rng.hpp"

namespace imitlab {

/// Affine layer y = W x + b with W stored out x in.
struct DenseLayer {
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;

  int in_dim() const { return static_cast<int>(weight.cols()); }
  int out_dim() const { return static_cast<int>(weight.rows()); }

  friend bool operator==(const DenseLayer& a, const DenseLayer& b) {
    return a.weight.rows() == b.weight.rows() && a.weight.cols() == b.weight.cols() &&
           a.bias.size() == b.bias.size() && a.weight == b.weight && a.bias == b.bias;
  }
};

/// Multilayer perceptron: ReLU on hidden layers, identity on the output.
struct Mlp {
  std::vector<DenseLayer> layers;

  int input_dim() const { return layers.empty() ? 0 : layers.front().in_dim(); }
  int output_dim() const { return layers.empty() ? 0 : layers.back().out_dim(); }
  std::vector<int> dims() const;
  std::size_t parameter_count() const;
  bool all_finite() const;

  friend bool operator==(const Mlp&, const Mlp&) = default;
};

/// Parameter-shaped gradient record.
struct Gradients {
  std::vector<DenseLayer> layers;

  static Gradients zeros_like(const Mlp& p);
  Gradients& operator+=(const Gradients& other);
  Gradients& operator*=(double s);
  bool all_finite() const;
};

/// Activations saved by the forward pass. Column j of every matrix belongs to
/// sample j of the batch.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> inputs;  // input fed to each layer
  std::vector<Eigen::MatrixXd> pre;     // pre-activation of each layer
  Eigen::MatrixXd output;

  /// Post-ReLU features feeding the output layer.
  const Eigen::MatrixXd& last_hidden() const { return inputs.back(); }
};

struct BackwardResult {
  Eigen::MatrixXd input_grad;
  Gradients grads;
};

/// Glorot-uniform weight matrix (fan_out x fan_in) on +-sqrt(6/(fan_in+fan_out)).
Eigen::MatrixXd glorot_init(int fan_in, int fan_out, Rng& rng);
double glorot_bound(int fan_in, int fan_out);

/// Glorot weights and zero biases for the chain dims[0] -> ... -> dims.back().
Mlp make_mlp(const std::vector<int>& dims, Rng& rng);
Mlp zero_mlp(const std::vector<int>& dims);

/// x is input_dim x batch.
ForwardCache mlp_forward(const Mlp& p, const Eigen::MatrixXd& x);
Eigen::MatrixXd mlp_predict(const Mlp& p, const Eigen::MatrixXd& x);
Eigen::VectorXd mlp_predict(const Mlp& p, const Eigen::VectorXd& x);

/// Reverse-mode pass. `dy` is output_dim x batch. `d_last_hidden`, when given,
/// is an extra gradient arriving at last_hidden() from a side head. With
/// `param_grads == false` only input_grad is produced.
BackwardResult mlp_backward(const Mlp& p, const ForwardCache& cache, const Eigen::MatrixXd& dy,
                            const Eigen::MatrixXd* d_last_hidden = nullptr,
                            bool param_grads = true);

struct LossResult {
  double loss = 0.0;
  Eigen::MatrixXd grad;
};

/// Mean over all elements of (pred - target)^2.
LossResult mse_loss(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target);

}  // namespace imitlab
