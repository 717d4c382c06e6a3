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

#include "hwcls/strokegen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <json.hpp>

namespace hwcls {

namespace pt = boost::property_tree;
using nlohmann::json;

std::u32string utf8_to_u32(std::string_view text) {
  std::u32string out;
  std::size_t i = 0;
  while (i < text.size()) {
    auto c = static_cast<unsigned char>(text[i]);
    int extra = 0;
    char32_t cp = 0;
    if (c < 0x80) {
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      cp = c & 0x1F;
      extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
      cp = c & 0x0F;
      extra = 2;
    } else if ((c & 0xF8) == 0xF0) {
      cp = c & 0x07;
      extra = 3;
    } else {
      throw ParseError(i, "invalid UTF-8 lead byte");
    }
    for (int k = 1; k <= extra; ++k) {
      if (i + k >= text.size())
        throw ParseError(i, "truncated UTF-8 sequence");
      auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) throw ParseError(i + k, "invalid UTF-8 byte");
      cp = (cp << 6) | (cc & 0x3F);
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

std::string u32_to_utf8(std::u32string_view text) {
  std::string out;
  for (char32_t cp : text) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

void validate_stroke(const Stroke& stroke) {
  if (stroke.rows() == 0) throw PreconditionError("stroke has no points");
  if (!stroke.allFinite())
    throw PreconditionError("stroke has non-finite coordinates");
}

namespace {

std::string_view trim_line(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
    s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

char32_t single_label(std::string_view label, std::size_t record,
                      std::size_t offset) {
  std::u32string cps;
  try {
    cps = utf8_to_u32(label);
  } catch (const ParseError&) {
    throw RejectedRecordError(record, offset, "label is not valid UTF-8");
  }
  if (cps.size() != 1)
    throw RejectedRecordError(record, offset,
                              "label '" + std::string(label) +
                                  "' is not a single character");
  return cps[0];
}

Stroke stroke_from_json(const json& pts, std::size_t offset) {
  if (!pts.is_array() || pts.empty())
    throw ParseError(offset, "stroke must be a non-empty array of points");
  Stroke s(static_cast<Eigen::Index>(pts.size()), 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
        !p[1].is_number())
      throw ParseError(offset, "point must be [x, y]");
    s(static_cast<Eigen::Index>(i), 0) = p[0].get<double>();
    s(static_cast<Eigen::Index>(i), 1) = p[1].get<double>();
  }
  if (!s.allFinite()) throw ParseError(offset, "non-finite coordinate");
  return s;
}

std::vector<LabeledStrokes> parse_jsonl(std::string_view raw) {
  std::vector<LabeledStrokes> out;
  std::size_t pos = 0;
  std::size_t record = 0;
  while (pos < raw.size()) {
    std::size_t end = raw.find('\n', pos);
    if (end == std::string_view::npos) end = raw.size();
    std::string_view line = trim_line(raw.substr(pos, end - pos));
    std::size_t line_start = pos;
    pos = end + 1;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
      throw ParseError(line_start + byte, "invalid JSON record");
    }
    if (!rec.is_object() || !rec.contains("char") || !rec["char"].is_string() ||
        !rec.contains("strokes") || !rec["strokes"].is_array())
      throw ParseError(line_start, "record needs string 'char' and array 'strokes'");
    LabeledStrokes ls;
    ls.label = single_label(rec["char"].get<std::string>(), record, line_start);
    for (const auto& s : rec["strokes"])
      ls.strokes.push_back(stroke_from_json(s, line_start));
    if (ls.strokes.empty()) throw ParseError(line_start, "record has no strokes");
    if (rec.contains("writer")) {
      if (!rec["writer"].is_string())
        throw ParseError(line_start, "'writer' must be a string");
      ls.writer = rec["writer"].get<std::string>();
    }
    if (rec.contains("frame")) {
      const auto& f = rec["frame"];
      if (!f.is_array() || f.size() != 2 || !f[0].is_number() ||
          !f[1].is_number())
        throw ParseError(line_start, "'frame' must be [top, bottom]");
      ls.frame = Eigen::Vector2d(f[0].get<double>(), f[1].get<double>());
    }
    out.push_back(std::move(ls));
    ++record;
  }
  return out;
}

std::size_t offset_of_line(std::string_view raw, unsigned long line) {
  std::size_t off = 0;
  for (unsigned long l = 1; l < line && off < raw.size(); ++off)
    if (raw[off] == '\n') ++l;
  return off;
}

std::size_t offset_of_nth(std::string_view raw, std::string_view needle,
                          std::size_t n) {
  std::size_t off = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    off = raw.find(needle, i == 0 ? 0 : off + 1);
    if (off == std::string_view::npos) return 0;
  }
  return off;
}

std::vector<LabeledStrokes> parse_xml(std::string_view raw) {
  std::vector<LabeledStrokes> out;
  if (trim_line(raw).empty()) return out;
  pt::ptree tree;
  std::istringstream in{std::string(raw)};
  try {
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(offset_of_line(raw, e.line()), e.message());
  }
  auto set = tree.get_child_optional("GlyphSet");
  if (!set) throw ParseError(0, "missing <GlyphSet> root element");
  std::size_t record = 0;
  for (const auto& [tag, glyph] : *set) {
    if (tag != "Glyph") continue;
    std::size_t off = offset_of_nth(raw, "<Glyph ", record);
    auto label = glyph.get_optional<std::string>("<xmlattr>.label");
    if (!label) throw ParseError(off, "<Glyph> without label attribute");
    LabeledStrokes ls;
    ls.label = single_label(*label, record, off);
    ls.writer = glyph.get<std::string>("<xmlattr>.writer", "");
    auto top = glyph.get_optional<double>("<xmlattr>.frame_top");
    auto bottom = glyph.get_optional<double>("<xmlattr>.frame_bottom");
    if (top && bottom) ls.frame = Eigen::Vector2d(*top, *bottom);
    for (const auto& [stag, stroke] : glyph) {
      if (stag != "Stroke") continue;
      std::vector<Eigen::Vector2d> pts;
      for (const auto& [ptag, point] : stroke) {
        if (ptag != "Point") continue;
        auto x = point.get_optional<double>("<xmlattr>.x");
        auto y = point.get_optional<double>("<xmlattr>.y");
        if (!x || !y) throw ParseError(off, "<Point> needs numeric x and y");
        pts.emplace_back(*x, *y);
      }
      if (pts.empty()) throw ParseError(off, "empty <Stroke>");
      Stroke s(static_cast<Eigen::Index>(pts.size()), 2);
      for (std::size_t i = 0; i < pts.size(); ++i)
        s.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
      if (!s.allFinite()) throw ParseError(off, "non-finite coordinate");
      ls.strokes.push_back(std::move(s));
    }
    if (ls.strokes.empty()) throw ParseError(off, "<Glyph> has no strokes");
    out.push_back(std::move(ls));
    ++record;
  }
  return out;
}

struct Bounds {
  Eigen::Vector2d min{std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::infinity()};
  Eigen::Vector2d max{-std::numeric_limits<double>::infinity(),
                      -std::numeric_limits<double>::infinity()};
};

Bounds bounds_of(const std::vector<Stroke>& strokes) {
  Bounds b;
  for (const auto& s : strokes) {
    if (s.rows() == 0) continue;
    b.min = b.min.cwiseMin(s.colwise().minCoeff().transpose());
    b.max = b.max.cwiseMax(s.colwise().maxCoeff().transpose());
  }
  return b;
}

std::string describe(char32_t ch) {
  if (ch >= 0x20 && ch < 0x7F) return std::string("'") + static_cast<char>(ch) + "'";
  std::ostringstream ss;
  ss << "U+" << std::hex << std::uppercase << static_cast<std::uint32_t>(ch);
  return ss.str();
}

}  // namespace

std::vector<LabeledStrokes> parse_stroke_file(std::string_view raw,
                                              StrokeFormat format) {
  switch (format) {
    case StrokeFormat::kJsonlPoints:
      return parse_jsonl(raw);
    case StrokeFormat::kXmlOnline:
      return parse_xml(raw);
  }
  throw PreconditionError("unknown stroke format");
}

GlyphGeometry normalize_glyph(const std::vector<Stroke>& strokes,
                              const std::optional<Eigen::Vector2d>& frame) {
  std::size_t points = 0;
  for (const auto& s : strokes) {
    if (!s.allFinite()) throw PreconditionError("glyph has non-finite coordinates");
    points += static_cast<std::size_t>(s.rows());
  }
  if (points == 0) throw PreconditionError("glyph has no points");

  const Bounds b = bounds_of(strokes);
  const Eigen::Vector2d extent = b.max - b.min;
  Eigen::Vector2d origin = b.min;
  double scale = 0.0;
  if (frame) {
    const double h = (*frame)(1) - (*frame)(0);
    if (!(h > 0.0)) throw PreconditionError("glyph frame must have top < bottom");
    origin(1) = (*frame)(0);
    scale = 1.0 / h;
  } else if (extent(1) > 0.0) {
    scale = 1.0 / extent(1);
  } else if (extent(0) > 0.0) {
    scale = 1.0 / extent(0);
  } else {
    throw DegenerateGlyphError("degenerate glyph: zero width and zero height");
  }

  GlyphGeometry g;
  g.strokes.reserve(strokes.size());
  for (const auto& s : strokes) {
    if (s.rows() == 0) continue;
    Stroke t = (s.rowwise() - origin.transpose()) * scale;
    g.strokes.push_back(std::move(t));
  }
  g.advance_width = extent(0) * scale;
  return g;
}

UnsupportedCharacterError::UnsupportedCharacterError(char32_t ch,
                                                     const std::string& context)
    : Error("unsupported character " + describe(ch) +
            (context.empty() ? "" : " (" + context + ")")),
      ch_(ch) {}

GlyphBank GlyphBank::from_records(const std::vector<LabeledStrokes>& records) {
  GlyphBank bank;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.writer.empty())
      throw RejectedRecordError(i, 0, "glyph bank record without writer");
    auto geom = normalize_glyph(r.strokes, r.frame);
    // Purely vertical glyphs ('l', '1') still need horizontal room.
    geom.advance_width = std::max(geom.advance_width, 0.05);
    Glyph g{r.label, std::move(geom.strokes), geom.advance_width, r.writer};
    bank.glyphs_[r.writer][r.label].push_back(std::move(g));
  }
  const std::u32string required = U"0123456789.-";
  for (const auto& [writer, chars] : bank.glyphs_)
    for (char32_t ch : required)
      if (!chars.count(ch))
        throw UnsupportedCharacterError(
            ch, "writer '" + writer + "' lacks a required glyph");
  return bank;
}

GlyphBank GlyphBank::load(const std::string& path) {
  return from_records(parse_stroke_file(read_file(path), StrokeFormat::kJsonlPoints));
}

std::vector<std::string> GlyphBank::writers() const {
  std::vector<std::string> out;
  for (const auto& [w, _] : glyphs_) out.push_back(w);
  return out;
}

bool GlyphBank::has_writer(const std::string& writer) const {
  return glyphs_.count(writer) > 0;
}

bool GlyphBank::supports(const std::string& writer, char32_t ch) const {
  auto it = glyphs_.find(writer);
  return it != glyphs_.end() && it->second.count(ch) > 0;
}

bool GlyphBank::supports_text(const std::string& writer,
                              std::u32string_view text) const {
  return std::all_of(text.begin(), text.end(),
                     [&](char32_t c) { return supports(writer, c); });
}

const std::vector<Glyph>& GlyphBank::variants(const std::string& writer,
                                              char32_t ch) const {
  auto it = glyphs_.find(writer);
  if (it == glyphs_.end()) throw UnknownWriterError(writer);
  auto jt = it->second.find(ch);
  if (jt == it->second.end())
    throw UnsupportedCharacterError(ch, "writer '" + writer + "'");
  return jt->second;
}

ComposedText compose_string(const GlyphBank& bank, const std::string& writer_id,
                            std::string_view text, std::uint64_t rng_seed,
                            double gap_fraction) {
  if (text.empty()) throw PreconditionError("compose_string: empty text");
  if (!(gap_fraction >= 0.0))
    throw PreconditionError("compose_string: gap must be >= 0");
  if (!bank.has_writer(writer_id)) throw UnknownWriterError(writer_id);
  const std::u32string chars = utf8_to_u32(text);

  std::mt19937_64 rng(rng_seed);
  std::vector<const Glyph*> chosen;
  std::vector<std::size_t> variant_index;
  double advance_sum = 0.0;
  for (char32_t ch : chars) {
    const auto& vs = bank.variants(writer_id, ch);
    std::uniform_int_distribution<std::size_t> pick(0, vs.size() - 1);
    std::size_t v = pick(rng);
    chosen.push_back(&vs[v]);
    variant_index.push_back(v);
    advance_sum += vs[v].advance_width;
  }
  const double gap = gap_fraction * advance_sum / static_cast<double>(chosen.size());

  ComposedText out;
  double pen = 0.0;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    const Glyph& g = *chosen[i];
    GlyphPlacement p;
    p.ch = g.ch;
    p.writer_id = g.writer_id;
    p.variant = variant_index[i];
    p.x_offset = pen;
    p.first_stroke = out.strokes.size();
    p.stroke_count = g.strokes.size();
    for (const auto& s : g.strokes) {
      Stroke t = s;
      t.col(0).array() += pen;
      out.strokes.push_back(std::move(t));
    }
    out.placements.push_back(std::move(p));
    pen += g.advance_width + gap;
  }
  return out;
}

void validate_render_spec(const RenderSpec& spec) {
  if (spec.target_height < 16)
    throw PreconditionError("render: target_height must be >= 16");
  if (!(spec.stroke_width >= 1.0))
    throw PreconditionError("render: stroke_width must be >= 1");
  if (!(spec.ink_intensity >= 0.0 && spec.ink_intensity <= 1.0))
    throw PreconditionError("render: ink_intensity must be in [0,1]");
  if (!(spec.jitter_sigma >= 0.0))
    throw PreconditionError("render: jitter_sigma must be >= 0");
  if (!(spec.inter_glyph_gap >= 0.0))
    throw PreconditionError("render: inter_glyph_gap must be >= 0");
}

int render_margin(const RenderSpec& spec) {
  return static_cast<int>(std::ceil(spec.stroke_width / 2.0)) + 1;
}

GrayImage render(const std::vector<Stroke>& strokes, const RenderSpec& spec) {
  validate_render_spec(spec);
  if (strokes.empty()) throw PreconditionError("render: no strokes");
  for (const auto& s : strokes) validate_stroke(s);

  std::vector<Stroke> pts = strokes;
  if (spec.jitter_sigma > 0.0) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.jitter_sigma);
    for (auto& s : pts)
      for (Eigen::Index i = 0; i < s.rows(); ++i) {
        s(i, 0) += noise(rng);
        s(i, 1) += noise(rng);
      }
  }

  const Bounds b = bounds_of(pts);
  const double y0 = std::min(0.0, b.min(1));
  const double y1 = std::max(1.0, b.max(1));
  const int margin = render_margin(spec);
  const int height = spec.target_height;
  const double scale = (height - 2 * margin) / (y1 - y0);
  const int width =
      static_cast<int>(std::ceil((b.max(0) - b.min(0)) * scale)) + 2 * margin;

  ImageArray<double> coverage = ImageArray<double>::Zero(height, width);
  const double radius = spec.stroke_width / 2.0;

  auto to_pixel = [&](const Eigen::Vector2d& p) {
    return Eigen::Vector2d(margin + (p(0) - b.min(0)) * scale,
                           margin + (p(1) - y0) * scale);
  };

  auto draw_capsule = [&](const Eigen::Vector2d& a, const Eigen::Vector2d& c) {
    const Eigen::Vector2d ab = c - a;
    const double len2 = ab.squaredNorm();
    const double reach = radius + 1.0;
    const int c0 = std::max(0, static_cast<int>(std::floor(std::min(a(0), c(0)) - reach)));
    const int c1 = std::min(width - 1, static_cast<int>(std::ceil(std::max(a(0), c(0)) + reach)));
    const int r0 = std::max(0, static_cast<int>(std::floor(std::min(a(1), c(1)) - reach)));
    const int r1 = std::min(height - 1, static_cast<int>(std::ceil(std::max(a(1), c(1)) + reach)));
    for (int r = r0; r <= r1; ++r)
      for (int col = c0; col <= c1; ++col) {
        // Pixel centers sit on integer coordinates, so a one-pixel stroke
        // along a grid line darkens exactly one row.
        const Eigen::Vector2d q(col, r);
        double t = len2 > 0.0 ? (q - a).dot(ab) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double d = (q - (a + t * ab)).norm();
        const double cov = std::clamp(radius + 0.5 - d, 0.0, 1.0);
        if (cov > coverage(r, col)) coverage(r, col) = cov;
      }
  };

  for (const auto& s : pts) {
    if (s.rows() == 1) {
      const Eigen::Vector2d p = to_pixel(s.row(0).transpose());
      draw_capsule(p, p);
      continue;
    }
    for (Eigen::Index i = 0; i + 1 < s.rows(); ++i)
      draw_capsule(to_pixel(s.row(i).transpose()),
                   to_pixel(s.row(i + 1).transpose()));
  }

  const double ink = 255.0 * spec.ink_intensity;
  GrayImage out(height, width);
  for (Eigen::Index i = 0; i < coverage.size(); ++i) {
    const double v = 255.0 - coverage(i) * (255.0 - ink);
    out(i) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  }
  return out;
}

}  // namespace hwcls
