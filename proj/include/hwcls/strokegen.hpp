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

#ifndef HWCLS_STROKEGEN_HPP
#define HWCLS_STROKEGEN_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "hwcls/common.hpp"
#include "hwcls/image.hpp"

namespace hwcls {

/// One pen-down trajectory: an N x 2 matrix of (x, y) points, y pointing
/// down. Must be non-empty with finite coordinates.
using Stroke = Eigen::MatrixX2d;

/// Throws PreconditionError if the stroke is empty or has non-finite values.
void validate_stroke(const Stroke& stroke);

/// Strokes of one character occurrence as read from a stroke file.
struct LabeledStrokes {
  char32_t label = 0;
  std::vector<Stroke> strokes;
  std::string writer;                          // empty if the record has none
  std::optional<Eigen::Vector2d> frame;        // vertical (top, bottom) box
};

enum class StrokeFormat { kXmlOnline, kJsonlPoints };

/// A record that is well-formed but violates the content contract (for
/// example a label with more than one character).
class RejectedRecordError : public Error {
 public:
  RejectedRecordError(std::size_t record, std::size_t offset,
                      const std::string& what)
      : Error("rejected record " + std::to_string(record) + " at byte " +
              std::to_string(offset) + ": " + what),
        record_(record),
        offset_(offset) {}
  std::size_t record() const { return record_; }
  std::size_t offset() const { return offset_; }

 private:
  std::size_t record_;
  std::size_t offset_;
};

/// Parses labeled stroke data. Coordinates are passed through unmodified.
///
/// kJsonlPoints: one JSON object per line,
///   {"char": "7", "strokes": [[[x,y],...],...], "writer": "w", "frame": [t,b]}
/// ("writer" and "frame" optional; blank lines skipped).
///
/// kXmlOnline: IAM-OnDB style stroke sets grouped per glyph,
///   <GlyphSet><Glyph label="7" writer="w">
///     <Stroke><Point x=".." y=".."/>...</Stroke>...
///   </Glyph></GlyphSet>
///
/// Throws ParseError (with byte offset) on malformed input and
/// RejectedRecordError for labels that are not a single character.
std::vector<LabeledStrokes> parse_stroke_file(std::string_view raw,
                                              StrokeFormat format);

/// Glyph geometry after normalization.
struct GlyphGeometry {
  std::vector<Stroke> strokes;
  double advance_width = 0.0;
};

class DegenerateGlyphError : public Error {
 public:
  using Error::Error;
};

/// Translates the glyph so its bounding-box minimum is the origin and scales
/// it uniformly to unit height; advance_width is the scaled width. A glyph
/// with zero height but positive width (a dash) is scaled to unit width
/// instead. If `frame` = (top, bottom) is given, the vertical extent of that
/// reference box is used in place of the ink height so glyphs drawn in a
/// shared em box keep their baseline; x still starts at the ink minimum.
GlyphGeometry normalize_glyph(const std::vector<Stroke>& strokes,
                              const std::optional<Eigen::Vector2d>& frame = {});

struct Glyph {
  char32_t ch = 0;
  std::vector<Stroke> strokes;
  double advance_width = 0.0;
  std::string writer_id;
};

/// Per-writer glyph store. Immutable once built; every writer must cover at
/// least 0-9, '.' and '-'.
class GlyphBank {
 public:
  /// Builds a bank from parsed records. Records without a writer are
  /// rejected. Each glyph is normalized with its frame if present.
  static GlyphBank from_records(const std::vector<LabeledStrokes>& records);
  /// Loads the JSONL interchange format.
  static GlyphBank load(const std::string& path);

  std::vector<std::string> writers() const;
  bool has_writer(const std::string& writer) const;
  bool supports(const std::string& writer, char32_t ch) const;
  /// Returns true if the writer covers every code point of `text`.
  bool supports_text(const std::string& writer, std::u32string_view text) const;
  const std::vector<Glyph>& variants(const std::string& writer,
                                     char32_t ch) const;

 private:
  std::map<std::string, std::map<char32_t, std::vector<Glyph>>> glyphs_;
};

class UnsupportedCharacterError : public Error {
 public:
  UnsupportedCharacterError(char32_t ch, const std::string& context);
  char32_t character() const { return ch_; }

 private:
  char32_t ch_;
};

class UnknownWriterError : public Error {
 public:
  explicit UnknownWriterError(const std::string& writer)
      : Error("unknown writer '" + writer + "'") {}
};

struct GlyphPlacement {
  char32_t ch = 0;
  std::string writer_id;
  std::size_t variant = 0;
  double x_offset = 0.0;
  std::size_t first_stroke = 0;
  std::size_t stroke_count = 0;
};

struct ComposedText {
  std::vector<Stroke> strokes;
  std::vector<GlyphPlacement> placements;
};

/// Lays out `text` left to right with glyph variants drawn uniformly (seeded)
/// from `writer_id` only. The pen advances by each glyph's advance width plus
/// `gap_fraction` times the mean advance width of the placed glyphs.
ComposedText compose_string(const GlyphBank& bank, const std::string& writer_id,
                            std::string_view text, std::uint64_t rng_seed,
                            double gap_fraction = 0.15);

struct RenderSpec {
  int target_height = 64;
  double stroke_width = 2.0;     // pixels, >= 1
  double ink_intensity = 0.0;    // 0 = black ink, 1 = white
  double jitter_sigma = 0.0;     // normalized units
  double inter_glyph_gap = 0.15; // fraction of mean advance width
  std::uint64_t seed = 0;
};

void validate_render_spec(const RenderSpec& spec);

/// Pixel margin on each side of the rendered canvas.
int render_margin(const RenderSpec& spec);

/// Rasterizes strokes onto a white canvas of height spec.target_height. Each
/// segment is a capsule of radius stroke_width/2 with one-pixel
/// signed-distance antialiasing. Jitter is added per point in normalized
/// units before scaling. The vertical frame is [0,1] widened to the stroke
/// extent.
GrayImage render(const std::vector<Stroke>& strokes, const RenderSpec& spec);

/// UTF-8 helpers used for glyph labels and composed text.
std::u32string utf8_to_u32(std::string_view text);
std::string u32_to_utf8(std::u32string_view text);

}  // namespace hwcls

#endif  // HWCLS_STROKEGEN_HPP
