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

#ifndef HWCLS_CHECKPOINT_HPP
#define HWCLS_CHECKPOINT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hwcls/common.hpp"
#include "hwcls/dataset.hpp"
#include "hwcls/network.hpp"
#include "hwcls/optim.hpp"

namespace hwcls {

inline constexpr std::string_view kCheckpointMagic = "HWCLSCKPT1\n";
inline constexpr int kCheckpointVersion = 1;

/// Layout: magic, uint64 LE header length, JSON header, then float64 LE
/// values of every parameter in header order, followed by the Adam first
/// and second moments when present.
struct Checkpoint {
  ModelConfig model;
  PreprocessConfig preprocess;
  std::vector<LabelClass> classes;  // softmax output order / training classes
  Parameters<double> params;
  std::optional<AdamState<double>> optimizer;
  int epoch = 0;
  std::uint64_t seed = 0;
  nlohmann::json training = nlohmann::json::object();  // hyperparameters, informational
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace hwcls

#endif  // HWCLS_CHECKPOINT_HPP
