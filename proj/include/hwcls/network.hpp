// Copyright 2026  The hwcls Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HWCLS_NETWORK_HPP
#define HWCLS_NETWORK_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hwcls/layers.hpp"
#include "hwcls/tensor.hpp"

namespace hwcls {

struct StageConfig {
  int channels = 16;
  int blocks = 2;
  int stride = 2;

  bool operator==(const StageConfig&) const = default;
};

/// Residual CNN: stem conv-norm-relu, stages of residual blocks, global
/// average pooling, linear head. num_classes set selects the softmax head,
/// otherwise the head emits embedding_dim values.
struct ModelConfig {
  int input_height = 64;
  int input_width = 216;
  int stem_channels = 16;
  int stem_stride = 1;
  std::vector<StageConfig> stages = {{16, 2, 2}, {32, 2, 2}, {64, 2, 2}, {128, 2, 2}};
  int embedding_dim = 512;
  std::optional<int> num_classes;

  bool is_classifier() const { return num_classes.has_value(); }
  int output_dim() const { return num_classes ? *num_classes : embedding_dim; }

  bool operator==(const ModelConfig&) const = default;
};

/// Throws ConfigError on non-positive sizes or a feature map that vanishes.
void validate_model_config(const ModelConfig& cfg);

nlohmann::json model_config_to_json(const ModelConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
ModelConfig model_config_from_json(const nlohmann::json& j);

template <typename Scalar>
using Parameters = std::map<std::string, Tensor<Scalar>>;

/// Name -> shape of every parameter. Conv weights are (out, in, k, k),
/// norm gamma/beta (channels), head.weight (out, features), head.bias (out).
std::map<std::string, Shape> parameter_shapes(const ModelConfig& cfg);

/// He fan-in initialization drawn in sorted name order; gamma 1, beta 0,
/// head bias 0.
template <typename Scalar>
Parameters<Scalar> init_parameters(const ModelConfig& cfg, std::uint64_t seed);

template <typename Scalar>
Parameters<Scalar> zeros_like(const Parameters<Scalar>& params);

/// Throws ShapeError unless names and shapes match cfg exactly.
template <typename Scalar>
void check_parameters(const ModelConfig& cfg, const Parameters<Scalar>& params);

std::size_t parameter_count(const ModelConfig& cfg);

template <typename Scalar>
class Network {
 public:
  using Matrix = layers::Matrix<Scalar>;
  using Vector = layers::Vector<Scalar>;

  struct ConvNormCache {
    typename layers::Conv2d<Scalar>::Cache conv;
    typename layers::InstanceNorm<Scalar>::Cache norm;
  };

  struct BlockTrace {
    ConvNormCache unit1, unit2, shortcut;
    Matrix h1;  // relu output after unit1
    Matrix y;   // block output
  };

  /// Intermediate values of one forward pass, consumed by backward().
  struct Trace {
    Matrix input;
    ConvNormCache stem;
    Matrix stem_out;
    std::vector<BlockTrace> blocks;
    Vector pooled;
  };

  explicit Network(ModelConfig cfg);

  const ModelConfig& config() const { return cfg_; }

  /// (B,1,H,W) -> (B, output_dim).
  Tensor<Scalar> forward(const Parameters<Scalar>& params, const Tensor<Scalar>& batch) const;

  /// x is one image as a (1, H*W) matrix. trace may be null.
  Vector forward_sample(const Parameters<Scalar>& params, const Matrix& x, Trace* trace) const;

  /// Accumulates dLoss/dparams into grads given dLoss/doutput.
  void backward_sample(const Parameters<Scalar>& params, const Trace& trace, const Vector& dout,
                       Parameters<Scalar>& grads) const;

  /// Gradient with respect to the input image, (1, H*W). Also accumulates
  /// into grads.
  Matrix backward_sample_input(const Parameters<Scalar>& params, const Trace& trace,
                               const Vector& dout, Parameters<Scalar>& grads) const;

 private:
  struct ConvNorm {
    std::string prefix;     // e.g. "stage0.block0.conv1"
    std::string norm_name;  // e.g. "stage0.block0.norm1"
    layers::Conv2d<Scalar> conv;
  };
  struct Block {
    ConvNorm unit1, unit2;
    std::optional<ConvNorm> shortcut;
  };

  Matrix conv_norm_forward(const Parameters<Scalar>& params, const ConvNorm& u, const Matrix& x,
                           ConvNormCache& cache) const;
  Matrix conv_norm_backward(const Parameters<Scalar>& params, const ConvNorm& u,
                            const ConvNormCache& cache, const Matrix& dy,
                            Parameters<Scalar>& grads) const;

  ModelConfig cfg_;
  ConvNorm stem_;
  std::vector<Block> blocks_;
  Eigen::Index features_ = 0;
  layers::InstanceNorm<Scalar> norm_;
};

}  // namespace hwcls

#endif  // HWCLS_NETWORK_HPP
