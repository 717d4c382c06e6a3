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

#include <doctest.h>

#include <filesystem>
#include <random>
#include <set>

#include "hwcls/dataset.hpp"
#include "hwcls/experiment.hpp"
#include "testkit.hpp"

using namespace hwcls;
namespace fs = std::filesystem;

namespace {

const Resources& resources() {
  static const Resources r = Resources::load(HWCLS_TEST_DATA_DIR);
  return r;
}

SynthesisConfig synthesis() {
  SynthesisConfig s;
  s.image_height = 32;
  s.text.wordlist = resources().words;
  return s;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  return p;
}

Manifest fake_manifest(const std::vector<std::pair<LabelClass, int>>& counts) {
  Manifest m;
  int i = 0;
  for (const auto& [c, n] : counts)
    for (int j = 0; j < n; ++j) m.samples.push_back({"img" + std::to_string(i++) + ".png", c, "w", {}, "t"});
  return m;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("synthesized samples match their class and are deterministic") {
  SynthesisConfig cfg = synthesis();
  for (LabelClass c : all_label_classes()) {
    const auto a = synthesize_sample(c, cfg, resources().generators(), 9);
    const auto b = synthesize_sample(c, cfg, resources().generators(), 9);
    CHECK(a.sample.label == c);
    CHECK(a.image.rows() == 32);
    CHECK(a.sample == b.sample);
    CHECK((a.image == b.image).all());
    CHECK(a.sample.source == SampleSource::kStrokeSynth);
  }
  cfg.printed_fraction = 1.0;
  const auto p = synthesize_sample(LabelClass::kDate, cfg, resources().generators(), 3);
  CHECK(p.sample.source == SampleSource::kPrinted);
  CHECK(p.sample.writer_id == "printed");
}

TEST_CASE("corpus sizes and balance") {
  CorpusSpec spec;
  spec.synthesis = synthesis();
  spec.counts = {{LabelClass::kWord, 1}};
  const fs::path one = fresh_dir("hwcls_corpus_one");
  const Manifest m1 = build_corpus(spec, resources().generators(), 1, one.string());
  CHECK(m1.samples.size() == 1);
  CHECK(fs::exists(one / "manifest.jsonl"));
  CHECK(fs::exists(one / m1.samples[0].image_path));

  spec.counts = {{LabelClass::kWord, 2640}, {LabelClass::kNumber, 2640}, {LabelClass::kDate, 2640}};
  const fs::path big = fresh_dir("hwcls_corpus_large");
  const Manifest m = build_corpus(spec, resources().generators(), 2, big.string());
  CHECK(m.samples.size() == 7920);
  for (const auto& [c, n] : m.class_counts()) CHECK(n == 2640);
  CHECK(read_manifest((big / "manifest.jsonl").string()).samples == m.samples);
  fs::remove_all(big);
  CHECK_THROWS_AS(build_corpus(CorpusSpec{}, resources().generators(), 1, one.string()), PreconditionError);
}

TEST_CASE("corpus generation is reproducible") {
  CorpusSpec spec;
  spec.synthesis = synthesis();
  spec.synthesis.printed_fraction = 0.3;
  spec.counts = {{LabelClass::kZipCode, 5}, {LabelClass::kAlphanumeric, 5}};
  const fs::path a = fresh_dir("hwcls_corpus_a"), b = fresh_dir("hwcls_corpus_b");
  build_corpus(spec, resources().generators(), 7, a.string());
  build_corpus(spec, resources().generators(), 7, b.string());
  CHECK(read_file((a / "manifest.jsonl").string()) == read_file((b / "manifest.jsonl").string()));
  for (const auto& e : fs::directory_iterator(a / "images"))
    CHECK(read_file(e.path().string()) == read_file((b / "images" / e.path().filename()).string()));
}

TEST_CASE("stratified split arithmetic") {
  const Manifest m = fake_manifest({{LabelClass::kWord, 100}, {LabelClass::kDate, 100}});
  const auto s = split_manifest(m, {0.8, 0.1, 0.1}, 3);
  for (LabelClass c : {LabelClass::kWord, LabelClass::kDate}) {
    CHECK(s.train.class_counts().at(c) == 80);
    CHECK(s.val.class_counts().at(c) == 10);
    CHECK(s.test.class_counts().at(c) == 10);
  }
  std::set<std::string> seen;
  for (const auto* part : {&s.train, &s.val, &s.test})
    for (const auto& x : part->samples) CHECK(seen.insert(x.image_path).second);
  CHECK(seen.size() == 200);
  const auto again = split_manifest(m, {0.8, 0.1, 0.1}, 3);
  CHECK(again.test.samples == s.test.samples);
  CHECK(split_manifest(m, {0.8, 0.1, 0.1}, 4).test.samples != s.test.samples);
}

TEST_CASE("split rounding keeps every split non-empty") {
  const auto s = split_manifest(fake_manifest({{LabelClass::kNumber, 4}}), {0.9, 0.05, 0.05}, 1);
  CHECK(s.train.samples.size() == 2);
  CHECK(s.val.samples.size() == 1);
  CHECK(s.test.samples.size() == 1);
  const auto r = split_manifest(fake_manifest({{LabelClass::kNumber, 7}}), {0.7, 0.15, 0.15}, 1);
  CHECK(r.train.samples.size() + r.val.samples.size() + r.test.samples.size() == 7);
}

TEST_CASE("split contract errors") {
  const Manifest m = fake_manifest({{LabelClass::kWord, 10}});
  CHECK_THROWS_AS(split_manifest(m, {0.5, 0.5, 0.5}, 1), PreconditionError);
  CHECK_THROWS_AS(split_manifest(m, {1.0, 0.0, 0.0}, 1), PreconditionError);
  CHECK_THROWS_AS(split_manifest(fake_manifest({{LabelClass::kWord, 2}}), {0.4, 0.3, 0.3}, 1), StratificationError);
}

TEST_CASE("manifest jsonl round trip") {
  Manifest m = fake_manifest({{LabelClass::kWord, 2}, {LabelClass::kZipCode, 1}});
  m.samples[1].source = SampleSource::kPrinted;
  m.samples[1].text = "\xC3\xA9t\xC3\xA9";
  const Manifest back = manifest_from_jsonl(manifest_to_jsonl(m), "/base");
  CHECK(back.samples == m.samples);
  CHECK(back.resolve(back.samples[0]) == "/base/img0.png");
  CHECK(back.classes() == std::vector<LabelClass>{LabelClass::kWord, LabelClass::kZipCode});
  CHECK(back.filter({LabelClass::kZipCode}).samples.size() == 1);
  CHECK_THROWS_AS(manifest_from_jsonl("{\"image_path\": 3}\n", ""), ParseError);
}

TEST_CASE("otsu separates a bimodal image") {
  GrayImage img(10, 10);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> dark(20.0, 4.0), light(230.0, 4.0);
  for (Eigen::Index i = 0; i < img.size(); ++i)
    img(i) = static_cast<std::uint8_t>(std::clamp(std::lround(i % 3 == 0 ? dark(rng) : light(rng)), 0L, 255L));
  const auto t = otsu_threshold(img);
  REQUIRE(t);
  CHECK(t == testkit::otsu_oracle(img));
  for (Eigen::Index i = 0; i < img.size(); ++i) CHECK((img(i) < *t) == (i % 3 == 0));
}

TEST_CASE("otsu matches the exact sweep oracle") {
  const auto c = testkit::otsu_equivalence(300, 12);
  CHECK(c.mismatches == 0);
  GrayImage tie(1, 3);
  tie << 0, 10, 20;  // two partitions with equal between-class variance
  CHECK(otsu_threshold(tie) == 1);
}

TEST_CASE("binarization edge cases") {
  const GrayImage flat = GrayImage::Constant(4, 5, 128);
  CHECK(!otsu_threshold(flat));
  CHECK((binarize(flat) == 255).all());
  GrayImage bin(2, 2);
  bin << 0, 255, 255, 0;
  CHECK((binarize(bin) == bin).all());
  CHECK((binarize(binarize(bin)) == bin).all());
}

TEST_CASE("narrow images are padded on the right") {
  PreprocessConfig cfg;
  cfg.mean = 0.2;
  cfg.std = 0.5;
  const GrayImage img = GrayImage::Constant(64, 100, 0);
  const Tensord t = preprocess(img, cfg);
  CHECK(t.shape() == Shape{1, 64, 216});
  const auto m = t.matrix(64, 216);
  const double pad = (255.0 / 255.0 - 0.2) / 0.5;
  CHECK((m.rightCols(116).array() == pad).all());
  CHECK((m.leftCols(100).array() == (0.0 - 0.2) / 0.5).all());
}

TEST_CASE("exact double size images are averaged down without padding") {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> px(0, 255);
  GrayImage img(128, 432);
  for (Eigen::Index r = 0; r < 128; ++r)
    for (Eigen::Index c = 0; c < 432; ++c) img(r, c) = static_cast<std::uint8_t>((r + c) % 2 ? 255 : 0);
  PreprocessConfig cfg;
  const auto canvas = fit_to_canvas(img, cfg);
  CHECK(canvas.rows() == 64);
  CHECK(canvas.cols() == 216);
  CHECK((canvas - 0.5).abs().maxCoeff() < 1e-12);
  // Bilinear sampling at the 2x2 block centers equals the block mean.
  for (Eigen::Index i = 0; i < img.size(); ++i) img(i) = static_cast<std::uint8_t>(px(rng));
  const auto r = resize_bilinear(img.cast<double>(), 64, 216);
  for (Eigen::Index y = 0; y < 64; ++y)
    for (Eigen::Index x = 0; x < 216; ++x) {
      const double mean = img.cast<double>().block(2 * y, 2 * x, 2, 2).mean();
      CHECK(std::abs(r(y, x) - mean) < 1e-9);
    }
}

TEST_CASE("zero image with identity normalization is all zero") {
  PreprocessConfig cfg;
  cfg.out_height = 16;
  cfg.out_width = 40;
  const Tensord t = preprocess(GrayImage::Zero(16, 40), cfg);
  CHECK(t.values().isZero(0));
}

TEST_CASE("wide images are center cropped") {
  PreprocessConfig cfg;
  cfg.out_height = 4;
  cfg.out_width = 4;
  GrayImage img(4, 8);
  for (Eigen::Index c = 0; c < 8; ++c) img.col(c).setConstant(static_cast<std::uint8_t>(c * 10));
  const auto canvas = fit_to_canvas(img, cfg);
  CHECK(canvas(0, 0) == doctest::Approx(20.0 / 255.0));
  CHECK(canvas(0, 3) == doctest::Approx(50.0 / 255.0));
}

TEST_CASE("preprocess config json") {
  PreprocessConfig cfg;
  cfg.binarize = true;
  cfg.mean = 0.7;
  const auto back = preprocess_config_from_json(preprocess_config_to_json(cfg));
  CHECK(back.binarize);
  CHECK(back.mean == 0.7);
  CHECK_THROWS_AS(preprocess_config_from_json({{"resize", "lanczos"}}), ConfigError);
}

TEST_CASE("png round trip") {
  GrayImage img(3, 5);
  for (Eigen::Index i = 0; i < img.size(); ++i) img(i) = static_cast<std::uint8_t>(i * 17);
  const auto path = (fs::temp_directory_path() / "hwcls_png_test.png").string();
  write_png(path, img);
  CHECK((read_png(path) == img).all());
  CHECK_THROWS_AS(read_png("/nonexistent.png"), IoError);
}

}  // TEST_SUITE
