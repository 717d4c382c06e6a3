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

#include <string>

#include "hwcls/strokegen.hpp"

using namespace hwcls;

namespace {

Stroke line(double x0, double y0, double x1, double y1) {
  Stroke s(2, 2);
  s << x0, y0, x1, y1;
  return s;
}

// One writer covering 0-9, '.' and '-' with simple glyphs; '1' is 0.4 wide.
GlyphBank small_bank() {
  std::vector<LabeledStrokes> recs;
  for (char32_t ch : std::u32string(U"0123456789.-")) {
    LabeledStrokes r;
    r.label = ch;
    r.writer = "w";
    r.strokes = {ch == U'1' ? line(0, 0, 0.4, 1) : line(0, 0, 0.5, 1)};
    r.frame = Eigen::Vector2d(0, 1);
    recs.push_back(r);
  }
  return GlyphBank::from_records(recs);
}

bool same_image(const GrayImage& a, const GrayImage& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a == b).all();
}

int dark_rows(const GrayImage& img) {
  int n = 0;
  for (Eigen::Index r = 0; r < img.rows(); ++r) n += (img.row(r) < 128).any();
  return n;
}

}  // namespace

TEST_SUITE("strokegen") {

TEST_CASE("jsonl record passes through unmodified") {
  const std::string raw =
      R"({"char": "7", "writer": "a", "strokes": [[[0,0],[1,0],[2,0],[3,0],[4,0]],[[0,1],[1,1],[2,1],[3,1],[4,1.5]]]})"
      "\n";
  const auto recs = parse_stroke_file(raw, StrokeFormat::kJsonlPoints);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].label == U'7');
  CHECK(recs[0].writer == "a");
  REQUIRE(recs[0].strokes.size() == 2);
  CHECK(recs[0].strokes[0].rows() == 5);
  CHECK(recs[0].strokes[1](4, 1) == 1.5);
  CHECK(!recs[0].frame);
}

TEST_CASE("xml record passes through unmodified") {
  const std::string raw = R"(<GlyphSet><Glyph label="7" writer="b">
    <Stroke><Point x="1" y="2"/><Point x="3" y="4"/></Stroke>
    <Stroke><Point x="5" y="6"/></Stroke>
  </Glyph></GlyphSet>)";
  const auto recs = parse_stroke_file(raw, StrokeFormat::kXmlOnline);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].label == U'7');
  CHECK(recs[0].writer == "b");
  REQUIRE(recs[0].strokes.size() == 2);
  CHECK(recs[0].strokes[0](1, 0) == 3.0);
  CHECK(recs[0].strokes[1](0, 1) == 6.0);
}

TEST_CASE("empty files give no records") {
  CHECK(parse_stroke_file("", StrokeFormat::kJsonlPoints).empty());
  CHECK(parse_stroke_file("\n\n", StrokeFormat::kJsonlPoints).empty());
  CHECK(parse_stroke_file("", StrokeFormat::kXmlOnline).empty());
}

TEST_CASE("multi character labels are rejected records") {
  CHECK_THROWS_AS(parse_stroke_file(R"({"char": "ab", "strokes": [[[0,0]]]})", StrokeFormat::kJsonlPoints),
                  RejectedRecordError);
  CHECK_THROWS_AS(parse_stroke_file(R"(<GlyphSet><Glyph label="ab"><Stroke><Point x="0" y="0"/></Stroke></Glyph></GlyphSet>)",
                                    StrokeFormat::kXmlOnline),
                  RejectedRecordError);
  CHECK_THROWS_AS(parse_stroke_file("{not json", StrokeFormat::kJsonlPoints), ParseError);
}

TEST_CASE("normalization maps to unit height") {
  const auto sq = normalize_glyph({line(10, 10, 20, 20)});
  CHECK(sq.strokes[0](0, 0) == 0.0);
  CHECK(sq.strokes[0](1, 0) == 1.0);
  CHECK(sq.strokes[0](1, 1) == 1.0);
  CHECK(sq.advance_width == 1.0);
  const auto tall = normalize_glyph({line(0, 0, 5, 10)});
  CHECK(tall.strokes[0](1, 0) == 0.5);
  CHECK(tall.strokes[0](1, 1) == 1.0);
  CHECK(tall.advance_width == 0.5);
  Stroke dot(1, 2);
  dot << 3, 3;
  CHECK_THROWS_AS(normalize_glyph({dot}), DegenerateGlyphError);
}

TEST_CASE("normalization with a frame keeps the baseline") {
  const auto g = normalize_glyph({line(2, 50, 12, 100)}, Eigen::Vector2d(0, 100));
  CHECK(g.strokes[0](0, 0) == 0.0);
  CHECK(g.strokes[0](0, 1) == 0.5);
  CHECK(g.strokes[0](1, 1) == 1.0);
  CHECK(g.advance_width == doctest::Approx(0.1));
}

TEST_CASE("composition advances by width plus gap") {
  const GlyphBank bank = small_bank();
  const auto one = compose_string(bank, "w", "7", 1, 0.25);
  REQUIRE(one.placements.size() == 1);
  CHECK(one.placements[0].x_offset == 0.0);
  CHECK(one.strokes[0] == bank.variants("w", U'7')[0].strokes[0]);
  // Gap is 0.25 of the mean advance 0.4, so the second glyph starts at 0.5.
  const auto two = compose_string(bank, "w", "11", 1, 0.25);
  CHECK(two.placements[1].x_offset == doctest::Approx(0.5));
  CHECK(two.strokes[1](0, 0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(compose_string(bank, "w", "", 1), PreconditionError);
  CHECK_THROWS_AS(compose_string(bank, "w", "1a", 1), UnsupportedCharacterError);
  CHECK_THROWS_AS(compose_string(bank, "nobody", "1", 1), UnknownWriterError);
}

TEST_CASE("bank requires writers and digit coverage") {
  LabeledStrokes r;
  r.label = U'1';
  r.strokes = {line(0, 0, 1, 1)};
  CHECK_THROWS_AS(GlyphBank::from_records({r}), RejectedRecordError);
  r.writer = "w";
  CHECK_THROWS_AS(GlyphBank::from_records({r}), UnsupportedCharacterError);
  const GlyphBank bank = small_bank();
  CHECK(bank.writers() == std::vector<std::string>{"w"});
  CHECK(bank.supports_text("w", U"12.-"));
  CHECK(!bank.supports_text("w", U"a"));
}

TEST_CASE("rendering is deterministic") {
  RenderSpec spec;
  spec.jitter_sigma = 0.01;
  spec.seed = 4;
  const auto strokes = compose_string(small_bank(), "w", "2024", 3).strokes;
  CHECK(same_image(render(strokes, spec), render(strokes, spec)));
  RenderSpec other = spec;
  other.seed = 5;
  CHECK(!same_image(render(strokes, spec), render(strokes, other)));
}

TEST_CASE("one pixel horizontal segment darkens exactly one row") {
  RenderSpec spec;
  spec.target_height = 16;
  spec.stroke_width = 1.0;
  const GrayImage img = render({line(0, 0.5, 1, 0.5)}, spec);
  CHECK(img.rows() == 16);
  CHECK(dark_rows(img) == 1);
  CHECK(img.minCoeff() == 0);
}

TEST_CASE("ink intensity sets the darkest value") {
  RenderSpec spec;
  spec.target_height = 32;
  spec.stroke_width = 3.0;
  const auto strokes = std::vector<Stroke>{line(0, 0.2, 1, 0.8)};
  CHECK(render(strokes, spec).minCoeff() == 0);
  spec.ink_intensity = 0.5;
  CHECK(std::abs(static_cast<int>(render(strokes, spec).minCoeff()) - 128) <= 1);
  CHECK(render(strokes, spec).maxCoeff() == 255);
}

TEST_CASE("render spec validation") {
  RenderSpec spec;
  spec.target_height = 8;
  CHECK_THROWS_AS(render({line(0, 0, 1, 1)}, spec), PreconditionError);
  spec = RenderSpec{};
  spec.stroke_width = 0.5;
  CHECK_THROWS_AS(render({line(0, 0, 1, 1)}, spec), PreconditionError);
  CHECK_THROWS_AS(render({}, RenderSpec{}), PreconditionError);
}

TEST_CASE("utf8 round trip") {
  const std::string s = "12.\xC3\xA9-";
  CHECK(u32_to_utf8(utf8_to_u32(s)) == s);
  CHECK(utf8_to_u32(s).size() == 5);
}

}  // TEST_SUITE
