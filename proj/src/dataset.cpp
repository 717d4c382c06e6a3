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

#include "hwcls/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <random>

#include <json.hpp>

namespace hwcls {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view source_name(SampleSource s) {
  switch (s) {
    case SampleSource::kStrokeSynth: return "stroke_synth";
    case SampleSource::kPrinted: return "printed";
    case SampleSource::kExternal: return "external";
  }
  return "external";
}

SampleSource source_from_name(std::string_view name) {
  if (name == "stroke_synth") return SampleSource::kStrokeSynth;
  if (name == "printed") return SampleSource::kPrinted;
  if (name == "external") return SampleSource::kExternal;
  throw ConfigError("unknown sample source '" + std::string(name) + "'");
}

std::string_view split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

std::map<LabelClass, std::size_t> Manifest::class_counts() const {
  std::map<LabelClass, std::size_t> counts;
  for (const auto& s : samples) ++counts[s.label];
  return counts;
}

std::vector<LabelClass> Manifest::classes() const {
  std::vector<LabelClass> out;
  for (const auto& [c, _] : class_counts()) out.push_back(c);
  return out;
}

std::string Manifest::resolve(const Sample& s) const {
  fs::path p(s.image_path);
  if (p.is_absolute() || base_dir.empty()) return p.string();
  return (fs::path(base_dir) / p).string();
}

Manifest Manifest::filter(const std::vector<LabelClass>& keep) const {
  Manifest out;
  out.split = split;
  out.base_dir = base_dir;
  for (const auto& s : samples)
    if (std::find(keep.begin(), keep.end(), s.label) != keep.end())
      out.samples.push_back(s);
  return out;
}

std::string manifest_to_jsonl(const Manifest& m) {
  std::string out;
  for (const auto& s : m.samples) {
    json j;
    j["image_path"] = s.image_path;
    j["label"] = std::string(label_name(s.label));
    j["writer_id"] = s.writer_id;
    j["source"] = std::string(source_name(s.source));
    j["text"] = s.text;
    out += j.dump();
    out += '\n';
  }
  return out;
}

Manifest manifest_from_jsonl(std::string_view text, const std::string& base_dir) {
  Manifest m;
  m.base_dir = base_dir;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    const std::size_t line_start = pos;
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_start + (e.byte > 0 ? e.byte - 1 : 0), "invalid manifest line");
    }
    try {
      Sample s;
      s.image_path = j.at("image_path").get<std::string>();
      s.label = label_from_name(j.at("label").get<std::string>());
      s.writer_id = j.value("writer_id", std::string());
      s.source = source_from_name(j.value("source", std::string("external")));
      s.text = j.value("text", std::string());
      m.samples.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw ParseError(line_start, std::string("manifest record: ") + e.what());
    }
  }
  return m;
}

void write_manifest(const Manifest& m, const std::string& path) {
  write_file(path, manifest_to_jsonl(m));
}

Manifest read_manifest(const std::string& path) {
  auto m = manifest_from_jsonl(read_file(path), fs::path(path).parent_path().string());
  const auto stem = fs::path(path).stem().string();
  if (stem == "train") m.split = Split::kTrain;
  if (stem == "val") m.split = Split::kVal;
  if (stem == "test") m.split = Split::kTest;
  return m;
}

SynthesizedSample synthesize_sample(LabelClass cls, const SynthesisConfig& cfg,
                                    const Generators& gen, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Fixed draw order keeps every sample a pure function of its seed.
  const double u_printed = unit(rng);
  const double u_writer = unit(rng);
  const double u_width = unit(rng);
  const double u_ink = unit(rng);
  const double u_jitter = unit(rng);
  const double u_gap = unit(rng);

  SynthesizedSample out;
  out.sample.label = cls;
  out.sample.text = generate_text(cls, cfg.text, derive_seed(seed, 1));

  const bool printed = gen.font != nullptr && u_printed < cfg.printed_fraction;
  if (printed) {
    out.image = render_printed(out.sample.text, *gen.font, cfg.image_height,
                               derive_seed(seed, 2));
    out.sample.writer_id = "printed";
    out.sample.source = SampleSource::kPrinted;
    return out;
  }
  if (gen.glyphs == nullptr) throw ConfigError("no glyph bank configured for handwritten samples");

  const auto text32 = utf8_to_u32(out.sample.text);
  std::vector<std::string> writers;
  for (const auto& w : gen.glyphs->writers())
    if (gen.glyphs->supports_text(w, text32)) writers.push_back(w);
  if (writers.empty()) {
    const auto all = gen.glyphs->writers();
    if (all.empty()) throw ConfigError("glyph bank has no writers");
    for (char32_t ch : text32)
      if (!gen.glyphs->supports(all.front(), ch))
        throw UnsupportedCharacterError(ch, "no single writer covers '" + out.sample.text + "'");
    throw UnsupportedCharacterError(text32.front(), "no single writer covers '" + out.sample.text + "'");
  }
  const auto wi = std::min(writers.size() - 1,
                           static_cast<std::size_t>(u_writer * static_cast<double>(writers.size())));
  const std::string& writer = writers[wi];

  RenderSpec spec;
  spec.target_height = cfg.image_height;
  spec.stroke_width = std::max(1.0, (cfg.stroke_width_min + u_width * (cfg.stroke_width_max - cfg.stroke_width_min)) *
                                        cfg.image_height / 64.0);
  spec.ink_intensity = u_ink * cfg.ink_max;
  spec.jitter_sigma = u_jitter * cfg.jitter_max;
  spec.inter_glyph_gap = cfg.gap_min + u_gap * (cfg.gap_max - cfg.gap_min);
  spec.seed = derive_seed(seed, 3);

  auto composed = compose_string(*gen.glyphs, writer, out.sample.text,
                                 derive_seed(seed, 2), spec.inter_glyph_gap);
  out.image = render(composed.strokes, spec);
  out.sample.writer_id = writer;
  out.sample.source = SampleSource::kStrokeSynth;
  return out;
}

Manifest build_corpus(const CorpusSpec& spec, const Generators& gen,
                      std::uint64_t seed, const std::string& out_dir) {
  if (spec.counts.empty()) throw PreconditionError("build_corpus: no classes requested");
  for (const auto& [cls, n] : spec.counts)
    if (n < 1)
      throw PreconditionError("build_corpus: count for " + std::string(label_name(cls)) + " must be >= 1");

  const fs::path root(out_dir);
  std::error_code ec;
  fs::create_directories(root / "images", ec);
  if (ec) throw IoError((root / "images").string(), ec.message());

  Manifest m;
  m.base_dir = root.string();
  std::uint64_t index = 0;
  for (const auto& [cls, n] : spec.counts) {
    for (int j = 0; j < n; ++j, ++index) {
      SynthesizedSample s;
      try {
        s = synthesize_sample(cls, spec.synthesis, gen, derive_seed(seed, index));
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& e) {
        throw Error("sample " + std::to_string(index) + ": " + e.what());
      }
      char name[64];
      std::snprintf(name, sizeof(name), "images/%06llu_%s.png",
                    static_cast<unsigned long long>(index),
                    std::string(label_name(cls)).c_str());
      s.sample.image_path = name;
      write_png((root / name).string(), s.image);
      m.samples.push_back(std::move(s.sample));
    }
  }
  write_manifest(m, (root / "manifest.jsonl").string());
  return m;
}

SplitManifests split_manifest(const Manifest& m, std::array<double, 3> fractions,
                              std::uint64_t seed) {
  for (double f : fractions)
    if (!(f > 0.0)) throw PreconditionError("split fractions must be positive");
  if (std::abs(fractions[0] + fractions[1] + fractions[2] - 1.0) > 1e-9)
    throw PreconditionError("split fractions must sum to 1");

  std::map<LabelClass, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < m.samples.size(); ++i) by_class[m.samples[i].label].push_back(i);

  std::array<std::vector<std::size_t>, 3> assigned;
  for (auto& [cls, idx] : by_class) {
    const std::size_t n = idx.size();
    if (n < 3)
      throw StratificationError("class " + std::string(label_name(cls)) + " has " +
                                std::to_string(n) + " samples, fewer than 3 splits");
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(cls)));
    std::shuffle(idx.begin(), idx.end(), rng);

    std::array<std::size_t, 3> count{};
    std::array<double, 3> rem{};
    std::size_t used = 0;
    for (int k = 0; k < 3; ++k) {
      const double exact = fractions[k] * static_cast<double>(n);
      count[k] = static_cast<std::size_t>(std::floor(exact + 1e-9));
      rem[k] = exact - static_cast<double>(count[k]);
      used += count[k];
    }
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rem[a] > rem[b]; });
    for (std::size_t r = 0; used < n; ++r, ++used) ++count[order[r % 3]];
    for (int k = 0; k < 3; ++k)
      while (count[k] == 0) {
        auto big = std::max_element(count.begin(), count.end());
        --*big;
        ++count[k];
      }

    std::size_t pos = 0;
    for (int k = 0; k < 3; ++k)
      for (std::size_t c = 0; c < count[k]; ++c) assigned[k].push_back(idx[pos++]);
  }

  SplitManifests out;
  std::array<Manifest*, 3> parts{&out.train, &out.val, &out.test};
  const std::array<Split, 3> kinds{Split::kTrain, Split::kVal, Split::kTest};
  for (int k = 0; k < 3; ++k) {
    std::sort(assigned[k].begin(), assigned[k].end());
    parts[k]->split = kinds[k];
    parts[k]->base_dir = m.base_dir;
    for (std::size_t i : assigned[k]) parts[k]->samples.push_back(m.samples[i]);
  }
  return out;
}

std::optional<int> otsu_threshold(const GrayImage& image) {
  if (image.size() == 0) throw PreconditionError("otsu_threshold: empty image");
  std::array<std::int64_t, 256> hist{};
  for (Eigen::Index i = 0; i < image.size(); ++i) ++hist[image(i)];
  const std::int64_t total = image.size();
  std::int64_t sum_all = 0;
  for (int v = 0; v < 256; ++v) sum_all += v * hist[v];

  // Between-class variance is proportional to (w0*S - N*S0)^2 / (w0*w1).
  // Counts and sums are integers, so candidates compare exactly by
  // cross-multiplication while that fits in 128 bits; larger images fall back
  // to floating point.
  const bool exact = total <= 400000;
  using Wide = unsigned __int128;
  Wide best_num = 0, best_den = 1;
  double best = -1.0;
  std::int64_t w0 = 0, sum0 = 0;
  std::optional<int> best_t;
  for (int t = 1; t < 256; ++t) {
    w0 += hist[t - 1];
    sum0 += (t - 1) * hist[t - 1];
    const std::int64_t w1 = total - w0;
    if (w0 == 0 || w1 == 0) continue;
    const std::int64_t diff = w0 * sum_all - total * sum0;
    const Wide mag = static_cast<Wide>(diff < 0 ? -diff : diff);
    const Wide num = mag * mag;
    const Wide den = static_cast<Wide>(w0) * static_cast<Wide>(w1);
    bool better;
    if (exact) {
      better = !best_t || num * best_den > best_num * den;
    } else {
      const double v = static_cast<double>(diff) * static_cast<double>(diff) /
                       (static_cast<double>(w0) * static_cast<double>(w1));
      better = v > best;
      if (better) best = v;
    }
    if (better) {
      best_num = num;
      best_den = den;
      best_t = t;
    }
  }
  return best_t;
}

GrayImage binarize(const GrayImage& image) {
  const auto t = otsu_threshold(image);
  if (!t) return GrayImage::Constant(image.rows(), image.cols(), 255);
  return (image.cast<int>() >= *t).select(GrayImage::Constant(image.rows(), image.cols(), 255),
                                         GrayImage::Zero(image.rows(), image.cols()));
}

ImageArray<double> resize_bilinear(const ImageArray<double>& src, Eigen::Index rows,
                                   Eigen::Index cols) {
  if (src.size() == 0 || rows < 1 || cols < 1)
    throw PreconditionError("resize_bilinear: empty image or target");
  ImageArray<double> out(rows, cols);
  const double sy_scale = static_cast<double>(src.rows()) / static_cast<double>(rows);
  const double sx_scale = static_cast<double>(src.cols()) / static_cast<double>(cols);
  const auto last_r = static_cast<double>(src.rows() - 1);
  const auto last_c = static_cast<double>(src.cols() - 1);
  for (Eigen::Index y = 0; y < rows; ++y) {
    const double sy = std::clamp((static_cast<double>(y) + 0.5) * sy_scale - 0.5, 0.0, last_r);
    const auto y0 = static_cast<Eigen::Index>(std::floor(sy));
    const Eigen::Index y1 = std::min(y0 + 1, src.rows() - 1);
    const double fy = sy - static_cast<double>(y0);
    for (Eigen::Index x = 0; x < cols; ++x) {
      const double sx = std::clamp((static_cast<double>(x) + 0.5) * sx_scale - 0.5, 0.0, last_c);
      const auto x0 = static_cast<Eigen::Index>(std::floor(sx));
      const Eigen::Index x1 = std::min(x0 + 1, src.cols() - 1);
      const double fx = sx - static_cast<double>(x0);
      out(y, x) = (1 - fy) * ((1 - fx) * src(y0, x0) + fx * src(y0, x1)) +
                  fy * ((1 - fx) * src(y1, x0) + fx * src(y1, x1));
    }
  }
  return out;
}

nlohmann::json preprocess_config_to_json(const PreprocessConfig& cfg) {
  return {{"out_height", cfg.out_height}, {"out_width", cfg.out_width},
          {"pad_value", cfg.pad_value},   {"binarize", cfg.binarize},
          {"mean", cfg.mean},             {"std", cfg.std}};
}

PreprocessConfig preprocess_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("preprocess config must be an object");
  PreprocessConfig cfg;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "out_height") cfg.out_height = value.get<int>();
      else if (key == "out_width") cfg.out_width = value.get<int>();
      else if (key == "pad_value") cfg.pad_value = value.get<int>();
      else if (key == "binarize") cfg.binarize = value.get<bool>();
      else if (key == "mean") cfg.mean = value.get<double>();
      else if (key == "std") cfg.std = value.get<double>();
      else throw ConfigError("unknown preprocess config key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("preprocess config key '" + key + "': " + e.what());
    }
  }
  if (cfg.out_height < 1 || cfg.out_width < 1) throw ConfigError("preprocess: bad output size");
  if (cfg.pad_value < 0 || cfg.pad_value > 255) throw ConfigError("preprocess: pad_value outside [0,255]");
  if (!(cfg.std > 0.0)) throw ConfigError("preprocess: std must be positive");
  return cfg;
}

ImageArray<double> fit_to_canvas(const GrayImage& image, const PreprocessConfig& cfg) {
  if (image.size() == 0) throw PreconditionError("preprocess: empty image");
  if (cfg.out_height < 1 || cfg.out_width < 1) throw ConfigError("preprocess: bad output size");
  const GrayImage src = cfg.binarize ? binarize(image) : image;
  const auto new_w = std::max<Eigen::Index>(
      1, std::lround(static_cast<double>(src.cols()) * cfg.out_height / static_cast<double>(src.rows())));
  ImageArray<double> resized = resize_bilinear(src.cast<double>(), cfg.out_height, new_w);

  ImageArray<double> canvas = ImageArray<double>::Constant(cfg.out_height, cfg.out_width, cfg.pad_value);
  if (new_w <= cfg.out_width) {
    canvas.leftCols(new_w) = resized;
  } else {
    canvas = resized.middleCols((new_w - cfg.out_width) / 2, cfg.out_width);
  }
  return canvas / 255.0;
}

Tensord preprocess(const GrayImage& image, const PreprocessConfig& cfg) {
  if (!(cfg.std > 0.0)) throw ConfigError("preprocess: std must be positive");
  ImageArray<double> canvas = (fit_to_canvas(image, cfg) - cfg.mean) / cfg.std;
  Tensord t({1, cfg.out_height, cfg.out_width});
  t.matrix(cfg.out_height, cfg.out_width) = canvas.matrix();
  return t;
}

Tensord load_batch(const Manifest& m, const PreprocessConfig& cfg) {
  if (m.samples.empty()) throw PreconditionError("load_batch: empty manifest");
  Tensord out({static_cast<Eigen::Index>(m.samples.size()), 1, cfg.out_height, cfg.out_width});
  for (std::size_t i = 0; i < m.samples.size(); ++i)
    out.set_slice(static_cast<Eigen::Index>(i), preprocess(read_png(m.resolve(m.samples[i])), cfg));
  return out;
}

void fit_normalization(const Manifest& m, PreprocessConfig& cfg) {
  if (m.samples.empty()) throw PreconditionError("fit_normalization: empty manifest");
  double sum = 0.0, sum_sq = 0.0, n = 0.0;
  for (const auto& s : m.samples) {
    const auto canvas = fit_to_canvas(read_png(m.resolve(s)), cfg);
    sum += canvas.sum();
    sum_sq += canvas.square().sum();
    n += static_cast<double>(canvas.size());
  }
  cfg.mean = sum / n;
  cfg.std = std::sqrt(std::max(sum_sq / n - cfg.mean * cfg.mean, 1e-12));
}

}  // namespace hwcls
