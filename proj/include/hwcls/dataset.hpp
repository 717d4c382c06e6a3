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

#ifndef HWCLS_DATASET_HPP
#define HWCLS_DATASET_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hwcls/common.hpp"
#include "hwcls/image.hpp"
#include "hwcls/printgen.hpp"
#include "hwcls/strokegen.hpp"
#include "hwcls/tensor.hpp"
#include "hwcls/textgen.hpp"

namespace hwcls {

enum class SampleSource { kStrokeSynth, kPrinted, kExternal };
enum class Split { kTrain, kVal, kTest };

std::string_view source_name(SampleSource s);
SampleSource source_from_name(std::string_view name);
std::string_view split_name(Split s);

struct Sample {
  std::string image_path;  // relative to the manifest directory unless absolute
  LabelClass label = LabelClass::kWord;
  std::string writer_id;   // "printed" for printed samples
  SampleSource source = SampleSource::kStrokeSynth;
  std::string text;

  bool operator==(const Sample&) const = default;
};

struct Manifest {
  std::vector<Sample> samples;
  std::optional<Split> split;
  std::string base_dir;  // directory image paths are resolved against

  std::map<LabelClass, std::size_t> class_counts() const;
  /// Classes present, in canonical class order.
  std::vector<LabelClass> classes() const;
  std::string resolve(const Sample& s) const;
  /// Samples whose label is in `keep`, preserving order.
  Manifest filter(const std::vector<LabelClass>& keep) const;
};

/// JSONL, one Sample per line with keys image_path, label, writer_id,
/// source, text.
std::string manifest_to_jsonl(const Manifest& m);
Manifest manifest_from_jsonl(std::string_view text, const std::string& base_dir);
void write_manifest(const Manifest& m, const std::string& path);
Manifest read_manifest(const std::string& path);

/// Random style parameters for synthesis. Stroke widths are given for a
/// 64-pixel image height and scaled with image_height.
struct SynthesisConfig {
  int image_height = 64;
  double printed_fraction = 0.0;
  double stroke_width_min = 1.5;
  double stroke_width_max = 3.5;
  double ink_max = 0.35;
  double jitter_max = 0.008;
  double gap_min = 0.25;
  double gap_max = 0.6;
  TextConfig text;
};

struct Generators {
  const GlyphBank* glyphs = nullptr;
  const BitmapFont* font = nullptr;
};

struct SynthesizedSample {
  GrayImage image;
  Sample sample;  // image_path left empty
};

/// Produces one labeled image. Pure function of its arguments.
SynthesizedSample synthesize_sample(LabelClass cls, const SynthesisConfig& cfg,
                                    const Generators& gen, std::uint64_t seed);

struct CorpusSpec {
  std::vector<std::pair<LabelClass, int>> counts;
  SynthesisConfig synthesis;
};

/// Writes count images per class under out_dir/images plus
/// out_dir/manifest.jsonl. Sample i uses seed derive_seed(seed, i).
Manifest build_corpus(const CorpusSpec& spec, const Generators& gen,
                      std::uint64_t seed, const std::string& out_dir);

class StratificationError : public Error {
 public:
  using Error::Error;
};

struct SplitManifests {
  Manifest train, val, test;
};

/// Stratified, seeded split. Each class is shuffled independently and cut
/// by largest-remainder rounding of the fractions; every split receives at
/// least one sample per class.
SplitManifests split_manifest(const Manifest& m, std::array<double, 3> fractions,
                              std::uint64_t seed);

/// Otsu threshold: t in [1,255] maximizing between-class variance of
/// {v < t} and {v >= t}; the smallest maximizer wins. nullopt for images
/// with a single intensity.
std::optional<int> otsu_threshold(const GrayImage& image);

/// Pixels >= threshold become 255, the rest 0. Constant images become white.
GrayImage binarize(const GrayImage& image);

/// Bilinear resampling with pixel-center alignment.
ImageArray<double> resize_bilinear(const ImageArray<double>& src, Eigen::Index rows,
                                   Eigen::Index cols);

struct PreprocessConfig {
  int out_height = 64;
  int out_width = 216;
  int pad_value = 255;
  bool binarize = false;
  double mean = 0.0;
  double std = 1.0;
};

nlohmann::json preprocess_config_to_json(const PreprocessConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
PreprocessConfig preprocess_config_from_json(const nlohmann::json& j);

/// Geometry and intensity mapping without the mean/std step, values in [0,1].
ImageArray<double> fit_to_canvas(const GrayImage& image, const PreprocessConfig& cfg);

/// (1, out_height, out_width) tensor: optional binarization, aspect-preserving
/// resize to out_height, right-pad with pad_value or center-crop to
/// out_width, scale to [0,1], then (v - mean) / std.
Tensord preprocess(const GrayImage& image, const PreprocessConfig& cfg);

/// Loads and preprocesses every sample: (N, 1, out_height, out_width).
Tensord load_batch(const Manifest& m, const PreprocessConfig& cfg);

/// Sets cfg.mean / cfg.std from the pixels of `m` after fit_to_canvas.
void fit_normalization(const Manifest& m, PreprocessConfig& cfg);

}  // namespace hwcls

#endif  // HWCLS_DATASET_HPP
