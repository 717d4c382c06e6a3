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

#include "hwcls/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "hwcls/optim.hpp"

namespace hwcls {

std::string_view loss_name(LossKind k) { return k == LossKind::kSoftmax ? "softmax" : "triplet"; }

LossKind loss_from_name(std::string_view name) {
  if (name == "softmax") return LossKind::kSoftmax;
  if (name == "triplet") return LossKind::kTriplet;
  throw ConfigError("unknown loss '" + std::string(name) + "' (expected softmax or triplet)");
}

std::string_view val_metric_name(LossKind k) {
  return k == LossKind::kSoftmax ? "val_accuracy" : "val_triplet_violation";
}

nlohmann::json train_config_to_json(const TrainConfig& cfg) {
  return {{"lr", cfg.lr},
          {"batch_size", cfg.batch_size},
          {"epochs", cfg.epochs},
          {"loss", loss_name(cfg.loss)},
          {"margin", cfg.margin},
          {"mining", mining_name(cfg.mining)},
          {"seed", cfg.seed},
          {"float32", cfg.float32}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("training config must be an object");
  TrainConfig cfg;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "lr") cfg.lr = value.get<double>();
      else if (key == "batch_size") cfg.batch_size = value.get<int>();
      else if (key == "epochs") cfg.epochs = value.get<int>();
      else if (key == "loss") cfg.loss = loss_from_name(value.get<std::string>());
      else if (key == "margin") cfg.margin = value.get<double>();
      else if (key == "mining") cfg.mining = mining_from_name(value.get<std::string>());
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "float32") cfg.float32 = value.get<bool>();
      else throw ConfigError("unknown training config key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("training config key '" + key + "': " + e.what());
    }
  }
  if (!(cfg.lr > 0)) throw ConfigError("lr must be positive");
  if (cfg.batch_size < 1) throw ConfigError("batch_size must be positive");
  if (cfg.epochs < 0) throw ConfigError("epochs must be non-negative");
  if (!(cfg.margin > 0)) throw ConfigError("margin must be positive");
  return cfg;
}

std::vector<int> label_indices(const Manifest& m, const std::vector<LabelClass>& classes) {
  std::vector<int> out;
  out.reserve(m.samples.size());
  for (const auto& s : m.samples) {
    auto it = std::find(classes.begin(), classes.end(), s.label);
    if (it == classes.end())
      throw ConfigError("label '" + std::string(label_name(s.label)) + "' is not a model class");
    out.push_back(static_cast<int>(it - classes.begin()));
  }
  return out;
}

double triplet_violation_rate(const RowMatrix<double>& embeddings, const std::vector<int>& labels,
                              double margin) {
  const auto triplets = mine_triplets(labels, MiningStrategy::kBatchHard, &embeddings, 0);
  if (triplets.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t bad = 0;
  for (const auto& t : triplets) {
    const double dp = (embeddings.row(t.anchor) - embeddings.row(t.positive)).squaredNorm();
    const double dn = (embeddings.row(t.anchor) - embeddings.row(t.negative)).squaredNorm();
    if (dp - dn + margin > 0) ++bad;
  }
  return static_cast<double>(bad) / static_cast<double>(triplets.size());
}

namespace {

template <typename To, typename From>
Parameters<To> cast_params(const Parameters<From>& p) {
  Parameters<To> out;
  for (const auto& [name, t] : p) out.emplace(name, t.template cast<To>());
  return out;
}

template <typename Scalar>
bool params_finite(const Parameters<Scalar>& p) {
  return std::all_of(p.begin(), p.end(), [](const auto& kv) { return kv.second.all_finite(); });
}

template <typename Scalar>
class Trainer {
 public:
  using Matrix = layers::Matrix<Scalar>;
  using Vector = layers::Vector<Scalar>;

  Trainer(const Checkpoint& init, const LabeledTensor& train, const LabeledTensor* val,
          const TrainConfig& cfg)
      : init_(init), cfg_(cfg), net_(init.model), train_(train), val_(val) {
    params_ = cast_params<Scalar>(init.params);
    if (init.optimizer) {
      state_.t = init.optimizer->t;
      state_.m = cast_params<Scalar>(init.optimizer->m);
      state_.v = cast_params<Scalar>(init.optimizer->v);
    }
    images_ = train.images.template cast<Scalar>();
    pixels_ = static_cast<Eigen::Index>(init.model.input_height) * init.model.input_width;
  }

  TrainResult run(const EpochCallback& on_epoch) {
    TrainResult res;
    res.checkpoint = snapshot(init_.epoch);
    const auto n = static_cast<int>(train_.labels.size());
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int e = 1; e <= cfg_.epochs; ++e) {
      const int epoch = init_.epoch + e;
      std::iota(order.begin(), order.end(), 0);
      std::mt19937_64 rng(derive_seed(cfg_.seed, static_cast<std::uint64_t>(epoch)));
      std::shuffle(order.begin(), order.end(), rng);
      double loss_sum = 0.0;
      int steps = 0;
      for (int start = 0, b = 0; start < n; start += cfg_.batch_size, ++b) {
        const std::vector<int> idx(order.begin() + start,
                                   order.begin() + std::min(n, start + cfg_.batch_size));
        Parameters<Scalar> grads = zeros_like(params_);
        double loss;
        if (cfg_.loss == LossKind::kSoftmax) {
          loss = softmax_step(idx, grads);
        } else {
          const std::uint64_t mine_seed =
              derive_seed(derive_seed(cfg_.seed, static_cast<std::uint64_t>(epoch)), 1000003u + b);
          auto l = triplet_step(idx, grads, mine_seed);
          if (!l) continue;
          loss = *l;
        }
        if (!std::isfinite(loss) || !params_finite(grads)) {
          res.diverged = true;
          res.message = "loss became non-finite in epoch " + std::to_string(epoch) +
                        "; keeping the checkpoint of epoch " + std::to_string(res.checkpoint.epoch);
          return res;
        }
        adam_step(params_, grads, state_, AdamConfig{cfg_.lr});
        loss_sum += loss;
        ++steps;
      }
      if (!params_finite(params_)) {
        res.diverged = true;
        res.message = "parameters became non-finite in epoch " + std::to_string(epoch);
        return res;
      }
      EpochLog log;
      log.epoch = epoch;
      log.train_loss = steps ? loss_sum / steps : std::numeric_limits<double>::quiet_NaN();
      log.val_metric = validate();
      res.log.push_back(log);
      res.checkpoint = snapshot(epoch);
      if (on_epoch) on_epoch(log);
    }
    return res;
  }

 private:
  Matrix sample(Eigen::Index i) const { return images_.matrix(images_.dim(0), pixels_).row(i); }

  double softmax_step(const std::vector<int>& idx, Parameters<Scalar>& grads) const {
    const auto b = static_cast<Scalar>(idx.size());
    double loss = 0.0;
    typename Network<Scalar>::Trace trace;
    for (int i : idx) {
      const Vector logits = net_.forward_sample(params_, sample(i), &trace);
      const RowMatrix<Scalar> row = logits.transpose();
      const auto ce = softmax_cross_entropy<Scalar>(row, {train_.labels[static_cast<std::size_t>(i)]});
      loss += static_cast<double>(ce.loss);
      const Vector dout = ce.grad.row(0).transpose() / b;
      net_.backward_sample(params_, trace, dout, grads);
    }
    return loss / static_cast<double>(idx.size());
  }

  std::optional<double> triplet_step(const std::vector<int>& idx, Parameters<Scalar>& grads,
                                     std::uint64_t seed) const {
    const auto b = static_cast<Eigen::Index>(idx.size());
    const Eigen::Index d = net_.config().output_dim();
    RowMatrix<Scalar> emb(b, d);
    std::vector<int> labels(idx.size());
    for (Eigen::Index k = 0; k < b; ++k) {
      emb.row(k) = net_.forward_sample(params_, sample(idx[static_cast<std::size_t>(k)]), nullptr).transpose();
      labels[static_cast<std::size_t>(k)] = train_.labels[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])];
    }
    const RowMatrix<double> emb64 = emb.template cast<double>();
    const auto triplets = mine_triplets(labels, cfg_.mining, &emb64, seed);
    if (triplets.empty()) return std::nullopt;
    const auto t = static_cast<Eigen::Index>(triplets.size());
    RowMatrix<Scalar> a(t, d), p(t, d), n(t, d);
    for (Eigen::Index k = 0; k < t; ++k) {
      const Triplet& tr = triplets[static_cast<std::size_t>(k)];
      a.row(k) = emb.row(tr.anchor);
      p.row(k) = emb.row(tr.positive);
      n.row(k) = emb.row(tr.negative);
    }
    const auto res = triplet_loss<Scalar>(a, p, n, static_cast<Scalar>(cfg_.margin));
    RowMatrix<Scalar> demb = RowMatrix<Scalar>::Zero(b, d);
    for (Eigen::Index k = 0; k < t; ++k) {
      const Triplet& tr = triplets[static_cast<std::size_t>(k)];
      demb.row(tr.anchor) += res.grad_anchor.row(k);
      demb.row(tr.positive) += res.grad_positive.row(k);
      demb.row(tr.negative) += res.grad_negative.row(k);
    }
    typename Network<Scalar>::Trace trace;
    for (Eigen::Index k = 0; k < b; ++k) {
      if (demb.row(k).isZero(0)) continue;
      net_.forward_sample(params_, sample(idx[static_cast<std::size_t>(k)]), &trace);
      net_.backward_sample(params_, trace, demb.row(k).transpose(), grads);
    }
    return static_cast<double>(res.loss);
  }

  double validate() const {
    if (!val_ || val_->labels.empty()) return std::numeric_limits<double>::quiet_NaN();
    const Tensor<Scalar> out = net_.forward(params_, val_->images.template cast<Scalar>());
    const RowMatrix<double> y = out.rows_view().template cast<double>();
    if (cfg_.loss == LossKind::kTriplet) return triplet_violation_rate(y, val_->labels, cfg_.margin);
    std::size_t correct = 0;
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      Eigen::Index arg;
      y.row(i).maxCoeff(&arg);
      if (arg == val_->labels[static_cast<std::size_t>(i)]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(y.rows());
  }

  Checkpoint snapshot(int epoch) const {
    Checkpoint c = init_;
    c.params = cast_params<double>(params_);
    c.optimizer = AdamState<double>{state_.t, cast_params<double>(state_.m), cast_params<double>(state_.v)};
    c.epoch = epoch;
    c.seed = cfg_.seed;
    c.training = train_config_to_json(cfg_);
    return c;
  }

  const Checkpoint& init_;
  TrainConfig cfg_;
  Network<Scalar> net_;
  const LabeledTensor& train_;
  const LabeledTensor* val_;
  Parameters<Scalar> params_;
  AdamState<Scalar> state_;
  Tensor<Scalar> images_;
  Eigen::Index pixels_ = 0;
};

void check_data(const ModelConfig& model, const LabeledTensor& data, const char* what) {
  const Shape expected = {static_cast<Eigen::Index>(data.labels.size()), 1, model.input_height,
                          model.input_width};
  if (data.images.shape() != expected)
    throw ShapeError(std::string(what) + " images have shape " + shape_string(data.images.shape()) +
                     ", expected " + shape_string(expected));
  const int classes = model.is_classifier() ? *model.num_classes : std::numeric_limits<int>::max();
  for (int y : data.labels)
    if (y < 0 || y >= classes) throw IndexError(std::string(what) + " label " + std::to_string(y) + " out of range");
}

}  // namespace

TrainResult train_tensors(const Checkpoint& init, const LabeledTensor& train, const LabeledTensor* val,
                          const TrainConfig& cfg, const EpochCallback& on_epoch) {
  check_parameters(init.model, init.params);
  if (train.labels.empty()) throw PreconditionError("train: empty training set");
  check_data(init.model, train, "training");
  if (val) check_data(init.model, *val, "validation");
  if (cfg.batch_size < 1 || cfg.epochs < 0 || !(cfg.lr > 0))
    throw ConfigError("train: invalid hyperparameters");
  if (cfg.loss == LossKind::kSoftmax && !init.model.is_classifier())
    throw ConfigError("softmax loss needs a model with num_classes");
  if (cfg.loss == LossKind::kTriplet) {
    if (init.model.is_classifier()) throw ConfigError("triplet loss needs an embedding head");
    if (std::set<int>(train.labels.begin(), train.labels.end()).size() < 2)
      throw ConfigError("triplet loss needs at least two classes");
  }
  if (cfg.float32) return Trainer<float>(init, train, val, cfg).run(on_epoch);
  return Trainer<double>(init, train, val, cfg).run(on_epoch);
}

TrainResult train(const ModelConfig& model, const PreprocessConfig& preprocess,
                  const Manifest& train_set, const Manifest* val_set, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  if (train_set.samples.empty()) throw PreconditionError("train: empty training manifest");
  Checkpoint init;
  init.classes = train_set.classes();
  if (cfg.loss == LossKind::kTriplet && init.classes.size() < 2)
    throw ConfigError("triplet loss needs at least two classes in the training manifest");
  init.model = model;
  if (cfg.loss == LossKind::kSoftmax) {
    const int k = static_cast<int>(init.classes.size());
    if (model.num_classes && *model.num_classes != k)
      throw ConfigError("model has " + std::to_string(*model.num_classes) +
                        " outputs but the training manifest has " + std::to_string(k) + " classes");
    init.model.num_classes = k;
  } else {
    init.model.num_classes.reset();
  }
  if (init.model.input_height != preprocess.out_height || init.model.input_width != preprocess.out_width)
    throw ConfigError("model input size does not match the preprocessing output size");
  init.preprocess = preprocess;
  fit_normalization(train_set, init.preprocess);
  init.params = init_parameters<double>(init.model, cfg.seed);
  init.seed = cfg.seed;

  LabeledTensor tr{load_batch(train_set, init.preprocess), label_indices(train_set, init.classes)};
  std::optional<LabeledTensor> va;
  if (val_set && !val_set->samples.empty())
    va = LabeledTensor{load_batch(*val_set, init.preprocess), label_indices(*val_set, init.classes)};
  return train_tensors(init, tr, va ? &*va : nullptr, cfg, on_epoch);
}

Tensord run_model(const Checkpoint& ckpt, const Tensord& images) {
  return Network<double>(ckpt.model).forward(ckpt.params, images);
}

Tensord run_model(const Checkpoint& ckpt, const Manifest& m) {
  return run_model(ckpt, load_batch(m, ckpt.preprocess));
}

}  // namespace hwcls
