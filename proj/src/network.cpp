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

#include "hwcls/network.hpp"

#include <cmath>
#include <random>
#include <set>

#include "hwcls/common.hpp"

namespace hwcls {

namespace {

struct UnitSpec {
  std::string conv, norm;
  layers::ConvGeometry geom;
};

struct BlockSpec {
  UnitSpec unit1, unit2;
  std::optional<UnitSpec> shortcut;
};

struct Plan {
  UnitSpec stem;
  std::vector<BlockSpec> blocks;
  Eigen::Index features = 0;
};

layers::ConvGeometry geometry(Eigen::Index in_c, Eigen::Index h, Eigen::Index w,
                              Eigen::Index out_c, Eigen::Index kernel, Eigen::Index stride) {
  layers::ConvGeometry g;
  g.in_channels = in_c;
  g.in_height = h;
  g.in_width = w;
  g.out_channels = out_c;
  g.kernel = kernel;
  g.stride = stride;
  g.pad = kernel / 2;
  return g;
}

Plan make_plan(const ModelConfig& cfg) {
  Plan plan;
  plan.stem = {"stem.conv", "stem.norm",
               geometry(1, cfg.input_height, cfg.input_width, cfg.stem_channels, 3, cfg.stem_stride)};
  Eigen::Index c = cfg.stem_channels;
  Eigen::Index h = plan.stem.geom.out_height(), w = plan.stem.geom.out_width();
  for (std::size_t s = 0; s < cfg.stages.size(); ++s) {
    const StageConfig& st = cfg.stages[s];
    for (int b = 0; b < st.blocks; ++b) {
      const std::string p = "stage" + std::to_string(s) + ".block" + std::to_string(b) + ".";
      const Eigen::Index stride = b == 0 ? st.stride : 1;
      BlockSpec blk;
      blk.unit1 = {p + "conv1", p + "norm1", geometry(c, h, w, st.channels, 3, stride)};
      const Eigen::Index ho = blk.unit1.geom.out_height(), wo = blk.unit1.geom.out_width();
      blk.unit2 = {p + "conv2", p + "norm2", geometry(st.channels, ho, wo, st.channels, 3, 1)};
      if (stride != 1 || c != st.channels)
        blk.shortcut = UnitSpec{p + "shortcut.conv", p + "shortcut.norm",
                                geometry(c, h, w, st.channels, 1, stride)};
      plan.blocks.push_back(std::move(blk));
      c = st.channels;
      h = ho;
      w = wo;
    }
  }
  plan.features = c;
  return plan;
}

void add_unit_shapes(const UnitSpec& u, std::map<std::string, Shape>& out) {
  const auto& g = u.geom;
  out[u.conv + ".weight"] = {g.out_channels, g.in_channels, g.kernel, g.kernel};
  out[u.norm + ".gamma"] = {g.out_channels};
  out[u.norm + ".beta"] = {g.out_channels};
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void validate_model_config(const ModelConfig& cfg) {
  if (cfg.input_height < 1 || cfg.input_width < 1)
    throw ConfigError("model input size must be positive");
  if (cfg.stem_channels < 1 || cfg.stem_stride < 1)
    throw ConfigError("stem channels and stride must be positive");
  for (std::size_t s = 0; s < cfg.stages.size(); ++s) {
    const StageConfig& st = cfg.stages[s];
    if (st.channels < 1 || st.blocks < 1 || st.stride < 1)
      throw ConfigError("stage " + std::to_string(s) + ": channels, blocks and stride must be positive");
  }
  if (cfg.embedding_dim < 1) throw ConfigError("embedding_dim must be positive");
  if (cfg.num_classes && *cfg.num_classes < 2) throw ConfigError("num_classes must be at least 2");
}

nlohmann::json model_config_to_json(const ModelConfig& cfg) {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& st : cfg.stages)
    stages.push_back({{"channels", st.channels}, {"blocks", st.blocks}, {"stride", st.stride}});
  nlohmann::json j = {{"input_height", cfg.input_height},
                      {"input_width", cfg.input_width},
                      {"stem_channels", cfg.stem_channels},
                      {"stem_stride", cfg.stem_stride},
                      {"stages", stages},
                      {"embedding_dim", cfg.embedding_dim}};
  j["num_classes"] = cfg.num_classes ? nlohmann::json(*cfg.num_classes) : nlohmann::json(nullptr);
  return j;
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  static const std::set<std::string> known = {"input_height", "input_width", "stem_channels",
                                              "stem_stride",  "stages",      "embedding_dim",
                                              "num_classes"};
  if (!j.is_object()) throw ConfigError("model config must be an object");
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError("unknown model config key '" + key + "'");
  ModelConfig cfg;
  try {
    cfg.input_height = j.value("input_height", cfg.input_height);
    cfg.input_width = j.value("input_width", cfg.input_width);
    cfg.stem_channels = j.value("stem_channels", cfg.stem_channels);
    cfg.stem_stride = j.value("stem_stride", cfg.stem_stride);
    cfg.embedding_dim = j.value("embedding_dim", cfg.embedding_dim);
    if (j.contains("stages")) {
      cfg.stages.clear();
      for (const auto& s : j.at("stages"))
        cfg.stages.push_back({s.at("channels").get<int>(), s.at("blocks").get<int>(),
                              s.at("stride").get<int>()});
    }
    if (j.contains("num_classes") && !j.at("num_classes").is_null())
      cfg.num_classes = j.at("num_classes").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad model config: ") + e.what());
  }
  validate_model_config(cfg);
  return cfg;
}

std::map<std::string, Shape> parameter_shapes(const ModelConfig& cfg) {
  validate_model_config(cfg);
  const Plan plan = make_plan(cfg);
  std::map<std::string, Shape> out;
  add_unit_shapes(plan.stem, out);
  for (const auto& b : plan.blocks) {
    add_unit_shapes(b.unit1, out);
    add_unit_shapes(b.unit2, out);
    if (b.shortcut) add_unit_shapes(*b.shortcut, out);
  }
  out["head.weight"] = {cfg.output_dim(), plan.features};
  out["head.bias"] = {cfg.output_dim()};
  return out;
}

std::size_t parameter_count(const ModelConfig& cfg) {
  std::size_t n = 0;
  for (const auto& [name, shape] : parameter_shapes(cfg)) n += static_cast<std::size_t>(shape_size(shape));
  return n;
}

template <typename Scalar>
Parameters<Scalar> init_parameters(const ModelConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Parameters<Scalar> params;
  for (const auto& [name, shape] : parameter_shapes(cfg)) {
    Tensor<Scalar> t(shape);
    if (ends_with(name, ".weight")) {
      const double fan_in = static_cast<double>(t.size() / shape[0]);
      const double gain = name == "head.weight" ? 1.0 : 2.0;
      const double sd = std::sqrt(gain / fan_in);
      for (Eigen::Index i = 0; i < t.size(); ++i) t[i] = static_cast<Scalar>(sd * normal(rng));
    } else if (ends_with(name, ".gamma")) {
      t.values().setOnes();
    }
    params.emplace(name, std::move(t));
  }
  return params;
}

template <typename Scalar>
Parameters<Scalar> zeros_like(const Parameters<Scalar>& params) {
  Parameters<Scalar> out;
  for (const auto& [name, t] : params) out.emplace(name, Tensor<Scalar>(t.shape()));
  return out;
}

template <typename Scalar>
void check_parameters(const ModelConfig& cfg, const Parameters<Scalar>& params) {
  const auto shapes = parameter_shapes(cfg);
  for (const auto& [name, shape] : shapes) {
    auto it = params.find(name);
    if (it == params.end()) throw ShapeError("missing parameter '" + name + "'");
    if (it->second.shape() != shape)
      throw ShapeError("parameter '" + name + "' has shape " + shape_string(it->second.shape()) +
                       ", expected " + shape_string(shape));
  }
  for (const auto& [name, t] : params)
    if (!shapes.count(name)) throw ShapeError("unexpected parameter '" + name + "'");
}

template <typename Scalar>
Network<Scalar>::Network(ModelConfig cfg) : cfg_(std::move(cfg)) {
  validate_model_config(cfg_);
  const Plan plan = make_plan(cfg_);
  auto unit = [](const UnitSpec& s) {
    ConvNorm u;
    u.prefix = s.conv;
    u.norm_name = s.norm;
    u.conv.geom = s.geom;
    return u;
  };
  stem_ = unit(plan.stem);
  for (const auto& b : plan.blocks) {
    Block blk{unit(b.unit1), unit(b.unit2), std::nullopt};
    if (b.shortcut) blk.shortcut = unit(*b.shortcut);
    blocks_.push_back(std::move(blk));
  }
  features_ = plan.features;
}

template <typename Scalar>
typename Network<Scalar>::Matrix Network<Scalar>::conv_norm_forward(
    const Parameters<Scalar>& params, const ConvNorm& u, const Matrix& x,
    ConvNormCache& cache) const {
  const auto& g = u.conv.geom;
  const Matrix z = u.conv.forward(x, params.at(u.prefix + ".weight").matrix(g.out_channels, g.patch_size()),
                                  cache.conv);
  return norm_.forward(z, params.at(u.norm_name + ".gamma").values(),
                       params.at(u.norm_name + ".beta").values(), cache.norm);
}

template <typename Scalar>
typename Network<Scalar>::Matrix Network<Scalar>::conv_norm_backward(
    const Parameters<Scalar>& params, const ConvNorm& u, const ConvNormCache& cache,
    const Matrix& dy, Parameters<Scalar>& grads) const {
  const auto& g = u.conv.geom;
  const Matrix dz = norm_.backward(dy, params.at(u.norm_name + ".gamma").values(), cache.norm,
                                   grads.at(u.norm_name + ".gamma").values(),
                                   grads.at(u.norm_name + ".beta").values());
  const std::string w = u.prefix + ".weight";
  return u.conv.backward(dz, params.at(w).matrix(g.out_channels, g.patch_size()), cache.conv,
                         grads.at(w).matrix(g.out_channels, g.patch_size()));
}

template <typename Scalar>
typename Network<Scalar>::Vector Network<Scalar>::forward_sample(const Parameters<Scalar>& params,
                                                                 const Matrix& x,
                                                                 Trace* trace) const {
  Trace local;
  Trace& t = trace ? *trace : local;
  t.input = x;
  t.stem_out = layers::relu<Scalar>(conv_norm_forward(params, stem_, x, t.stem));
  t.blocks.resize(blocks_.size());
  const Matrix* in = &t.stem_out;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const Block& b = blocks_[i];
    BlockTrace& bt = t.blocks[i];
    bt.h1 = layers::relu<Scalar>(conv_norm_forward(params, b.unit1, *in, bt.unit1));
    Matrix z = conv_norm_forward(params, b.unit2, bt.h1, bt.unit2);
    if (b.shortcut)
      z += conv_norm_forward(params, *b.shortcut, *in, bt.shortcut);
    else
      z += *in;
    bt.y = layers::relu<Scalar>(z);
    in = &bt.y;
    // Without a caller-owned trace only the running activation is needed.
    if (!trace && i > 0) t.blocks[i - 1] = BlockTrace{};
  }
  t.pooled = layers::global_avg_pool<Scalar>(*in);
  return layers::linear<Scalar>(t.pooled, params.at("head.weight").matrix(cfg_.output_dim(), features_),
                                params.at("head.bias").values());
}

template <typename Scalar>
typename Network<Scalar>::Matrix Network<Scalar>::backward_sample_input(
    const Parameters<Scalar>& params, const Trace& trace, const Vector& dout,
    Parameters<Scalar>& grads) const {
  if (dout.size() != cfg_.output_dim())
    throw ShapeError("backward: output gradient has " + std::to_string(dout.size()) +
                     " entries, expected " + std::to_string(cfg_.output_dim()));
  const Vector dpool = layers::linear_backward<Scalar>(
      dout, trace.pooled, params.at("head.weight").matrix(cfg_.output_dim(), features_),
      grads.at("head.weight").matrix(cfg_.output_dim(), features_), grads.at("head.bias").values());
  const Matrix& last = blocks_.empty() ? trace.stem_out : trace.blocks.back().y;
  Matrix dy = layers::global_avg_pool_backward<Scalar>(dpool, last.cols());
  for (std::size_t i = blocks_.size(); i-- > 0;) {
    const Block& b = blocks_[i];
    const BlockTrace& bt = trace.blocks[i];
    const Matrix dz = layers::relu_backward<Scalar>(dy, bt.y);
    const Matrix dh1 = layers::relu_backward<Scalar>(
        conv_norm_backward(params, b.unit2, bt.unit2, dz, grads), bt.h1);
    Matrix dx = conv_norm_backward(params, b.unit1, bt.unit1, dh1, grads);
    if (b.shortcut)
      dx += conv_norm_backward(params, *b.shortcut, bt.shortcut, dz, grads);
    else
      dx += dz;
    dy = std::move(dx);
  }
  const Matrix dstem = layers::relu_backward<Scalar>(dy, trace.stem_out);
  return conv_norm_backward(params, stem_, trace.stem, dstem, grads);
}

template <typename Scalar>
void Network<Scalar>::backward_sample(const Parameters<Scalar>& params, const Trace& trace,
                                      const Vector& dout, Parameters<Scalar>& grads) const {
  backward_sample_input(params, trace, dout, grads);
}

template <typename Scalar>
Tensor<Scalar> Network<Scalar>::forward(const Parameters<Scalar>& params,
                                        const Tensor<Scalar>& batch) const {
  const Shape expected = {1, cfg_.input_height, cfg_.input_width};
  if (batch.rank() != 4 || Shape(batch.shape().begin() + 1, batch.shape().end()) != expected)
    throw ShapeError("forward: input shape " + shape_string(batch.shape()) + " does not match (B," +
                     std::to_string(1) + "," + std::to_string(cfg_.input_height) + "," +
                     std::to_string(cfg_.input_width) + ")");
  const Eigen::Index n = batch.dim(0);
  const Eigen::Index pixels = static_cast<Eigen::Index>(cfg_.input_height) * cfg_.input_width;
  Tensor<Scalar> out({n, cfg_.output_dim()});
  auto rows = out.matrix(n, cfg_.output_dim());
  const auto in = batch.matrix(n, pixels);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Matrix x = in.row(i);
    rows.row(i) = forward_sample(params, x, nullptr).transpose();
  }
  return out;
}

template Parameters<double> init_parameters<double>(const ModelConfig&, std::uint64_t);
template Parameters<float> init_parameters<float>(const ModelConfig&, std::uint64_t);
template Parameters<double> zeros_like<double>(const Parameters<double>&);
template Parameters<float> zeros_like<float>(const Parameters<float>&);
template void check_parameters<double>(const ModelConfig&, const Parameters<double>&);
template void check_parameters<float>(const ModelConfig&, const Parameters<float>&);
template class Network<double>;
template class Network<float>;

}  // namespace hwcls
