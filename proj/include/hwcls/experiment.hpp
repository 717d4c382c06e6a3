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

#ifndef HWCLS_EXPERIMENT_HPP
#define HWCLS_EXPERIMENT_HPP

// Experiment recipes: synthesis -> training -> classification -> reports,
// driven by one JSON document.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hwcls/classify.hpp"
#include "hwcls/dataset.hpp"
#include "hwcls/metrics.hpp"
#include "hwcls/network.hpp"
#include "hwcls/train.hpp"

namespace hwcls {

/// Data directory lookup: explicit value, else $HWCLS_DATA_DIR, else the
/// directory configured at build time.
std::string resolve_data_dir(const std::optional<std::string>& explicit_dir);

/// Glyph bank, bitmap font and wordlist loaded from a data directory
/// (glyphs.jsonl, font5x9.json, words.txt).
struct Resources {
  GlyphBank glyphs;
  BitmapFont font;
  std::vector<std::string> words;

  static Resources load(const std::string& data_dir);
  Generators generators() const { return {&glyphs, &font}; }
};

nlohmann::json synthesis_config_to_json(const SynthesisConfig& cfg);
/// Missing keys keep defaults; the wordlist is never part of the JSON.
SynthesisConfig synthesis_config_from_json(const nlohmann::json& j);

struct CorpusConfig {
  std::vector<LabelClass> classes = {LabelClass::kWord, LabelClass::kNumber, LabelClass::kDate};
  int per_class = 600;
  std::array<double, 3> split = {0.8, 0.1, 0.1};
  SynthesisConfig synthesis;
};

enum class ExperimentKind { kStandard, kUnseen };

struct ClassifierConfig {
  int knn_k = 5;
  DistanceFamily family = DistanceFamily::kGaussian;
  Aggregation aggregation = Aggregation::kMeanDistance;
  Averaging averaging = Averaging::kWeighted;
};

struct UnseenSpec {
  std::vector<LabelClass> trained = {LabelClass::kWord, LabelClass::kNumber};
  LabelClass new_class = LabelClass::kDate;
  int support_per_class = 20;  // drawn from the validation split
  int test_per_class = 100;    // drawn from the test split
};

struct ExperimentConfig {
  std::string name = "experiment";
  ExperimentKind kind = ExperimentKind::kStandard;
  std::uint64_t seed = 0;
  std::optional<std::string> data_dir;
  CorpusConfig corpus;
  PreprocessConfig preprocess;
  ModelConfig model;
  TrainConfig softmax_training;
  TrainConfig triplet_training = [] {
    TrainConfig t;
    t.loss = LossKind::kTriplet;
    return t;
  }();
  /// Any of "softmax", "naive", "llr".
  std::vector<std::string> classifiers = {"softmax", "naive", "llr"};
  ClassifierConfig classifier;
  UnseenSpec unseen;
};

nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);
/// Throws ConfigError naming the offending key.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);

/// Runs a recipe into out_dir. Writes config.json (resolved config),
/// metrics.json (summary, deterministic), run_metadata.json (timestamps and
/// durations) and per-classifier report directories. Returns the summary.
nlohmann::json run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                              std::ostream* log = nullptr);

/// Embeddings of every sample of a manifest under a checkpoint.
SupportSet embed_manifest(const Checkpoint& ckpt, const Manifest& m);

/// The first n samples of each listed class, in manifest order.
Manifest take_per_class(const Manifest& m, const std::vector<LabelClass>& classes, int n);

/// Summary numbers of a report as stored in metrics.json.
nlohmann::json headline(const MetricsReport& r);

}  // namespace hwcls

#endif  // HWCLS_EXPERIMENT_HPP
