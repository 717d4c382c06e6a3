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

#ifndef HWCLS_TRAIN_HPP
#define HWCLS_TRAIN_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hwcls/checkpoint.hpp"
#include "hwcls/dataset.hpp"
#include "hwcls/losses.hpp"
#include "hwcls/network.hpp"

namespace hwcls {

enum class LossKind { kSoftmax, kTriplet };

std::string_view loss_name(LossKind k);
LossKind loss_from_name(std::string_view name);

struct TrainConfig {
  double lr = 1e-4;
  int batch_size = 128;
  int epochs = 20;
  LossKind loss = LossKind::kSoftmax;
  double margin = 0.2;
  MiningStrategy mining = MiningStrategy::kBatchHard;
  std::uint64_t seed = 0;
  bool float32 = false;  // compute in single precision; checkpoints stay float64
};

nlohmann::json train_config_to_json(const TrainConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
TrainConfig train_config_from_json(const nlohmann::json& j);

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  /// Accuracy for softmax, triplet-violation rate for triplet; NaN without
  /// validation data.
  double val_metric = 0.0;
};

std::string_view val_metric_name(LossKind k);

struct TrainResult {
  Checkpoint checkpoint;  // last good state when diverged
  std::vector<EpochLog> log;
  bool diverged = false;
  std::string message;
};

/// In-memory data: images (N,1,H,W) already normalized, labels in
/// [0, classes).
struct LabeledTensor {
  Tensord images;
  std::vector<int> labels;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Core loop. The checkpoint's model config must already carry the right
/// head (num_classes for softmax, none for triplet); preprocess and classes
/// are copied into the result as given.
TrainResult train_tensors(const Checkpoint& init, const LabeledTensor& train,
                          const LabeledTensor* val, const TrainConfig& cfg,
                          const EpochCallback& on_epoch = {});

/// Fits normalization on the training manifest, loads images, sets the head
/// from the training classes and runs train_tensors from a seeded init.
TrainResult train(const ModelConfig& model, const PreprocessConfig& preprocess,
                  const Manifest& train_set, const Manifest* val_set, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

/// Class index of each sample within `classes`; throws ConfigError for a
/// label outside it.
std::vector<int> label_indices(const Manifest& m, const std::vector<LabelClass>& classes);

/// Forward pass of a checkpoint on preprocessed images: (N, output_dim).
Tensord run_model(const Checkpoint& ckpt, const Tensord& images);

/// Loads and preprocesses a manifest with the checkpoint's preprocessing,
/// then runs the model.
Tensord run_model(const Checkpoint& ckpt, const Manifest& m);

/// Fraction of batch-hard triplets over the whole set whose hinge is
/// positive. NaN when no triplet exists.
double triplet_violation_rate(const RowMatrix<double>& embeddings, const std::vector<int>& labels,
                              double margin);

}  // namespace hwcls

#endif  // HWCLS_TRAIN_HPP
