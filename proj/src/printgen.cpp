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

#include "hwcls/printgen.hpp"

#include <array>
#include <cmath>
#include <random>

#include <json.hpp>

#include "hwcls/common.hpp"
#include "hwcls/strokegen.hpp"

namespace hwcls {

std::string base64_decode(std::string_view in) {
  static const std::array<int, 256> table = [] {
    std::array<int, 256> t{};
    t.fill(-1);
    const std::string_view alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    for (std::size_t i = 0; i < alphabet.size(); ++i)
      t[static_cast<unsigned char>(alphabet[i])] = static_cast<int>(i);
    return t;
  }();
  std::string out;
  unsigned buffer = 0;
  int bits = 0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const char c = in[i];
    if (c == '=') break;
    const int v = table[static_cast<unsigned char>(c)];
    if (v < 0) throw ParseError(i, "invalid base64 character");
    buffer = (buffer << 6) | static_cast<unsigned>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<char>((buffer >> bits) & 0xFF));
    }
  }
  return out;
}

BitmapFont parse_font(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.byte > 0 ? e.byte - 1 : 0, "invalid font JSON");
  }
  BitmapFont font;
  nlohmann::json glyphs;
  try {
    font.name = doc.value("name", std::string("unnamed"));
    font.cell_width = doc.at("cell_width").get<int>();
    font.cell_height = doc.at("cell_height").get<int>();
    glyphs = doc.at("glyphs");
    for (const auto& [key, value] : glyphs.items()) (void)value.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("font: ") + e.what());
  }
  if (font.cell_width <= 0 || font.cell_height <= 0)
    throw ConfigError("font cell dimensions must be positive");
  const auto cell = static_cast<std::size_t>(font.cell_width * font.cell_height);
  for (const auto& [key, value] : glyphs.items()) {
    const auto cps = utf8_to_u32(key);
    if (cps.size() != 1) throw ConfigError("font glyph key '" + key + "' is not one character");
    const std::string bits = base64_decode(value.get<std::string>());
    if (bits.size() != cell)
      throw ConfigError("font glyph '" + key + "' has " + std::to_string(bits.size()) +
                        " bytes, expected " + std::to_string(cell));
    GrayImage g(font.cell_height, font.cell_width);
    for (std::size_t i = 0; i < cell; ++i)
      g(static_cast<Eigen::Index>(i)) = bits[i] ? 1 : 0;
    font.glyphs.emplace(cps[0], std::move(g));
  }
  return font;
}

BitmapFont load_font(const std::string& path) { return parse_font(read_file(path)); }

namespace {

int scaled(int length, int cell_total, int target_height) {
  // round(length * target / cell_total) in integers
  return (length * target_height + cell_total / 2) / cell_total;
}

}  // namespace

int printed_width(int glyph_count, const BitmapFont& font, int target_height) {
  const int w = glyph_count * font.cell_width + (glyph_count - 1) + 2 * kPrintedMarginCells;
  const int h = font.cell_height + 2 * kPrintedMarginCells;
  return scaled(w, h, target_height);
}

GrayImage render_printed(std::string_view text, const BitmapFont& font,
                         int target_height, std::uint64_t seed) {
  if (text.empty()) throw PreconditionError("render_printed: empty text");
  if (target_height < 1) throw PreconditionError("render_printed: bad target height");
  const std::u32string chars = utf8_to_u32(text);
  for (char32_t ch : chars)
    if (!font.covers(ch)) throw UnsupportedCharacterError(ch, "font '" + font.name + "'");

  const int n = static_cast<int>(chars.size());
  const int m = kPrintedMarginCells;
  const int src_w = n * font.cell_width + (n - 1) + 2 * m;
  const int src_h = font.cell_height + 2 * m;
  GrayImage mask = GrayImage::Zero(src_h, src_w);
  for (int i = 0; i < n; ++i) {
    const int x0 = m + i * (font.cell_width + 1);
    mask.block(m, x0, font.cell_height, font.cell_width) = font.glyphs.at(chars[static_cast<std::size_t>(i)]);
  }

  std::mt19937_64 rng(seed);
  const double ink = std::uniform_real_distribution<double>(0.0, 0.3)(rng);
  const auto ink_value = static_cast<std::uint8_t>(std::lround(255.0 * ink));

  const int out_w = scaled(src_w, src_h, target_height);
  GrayImage out(target_height, out_w);
  for (int r = 0; r < target_height; ++r) {
    const int sr = std::min(src_h - 1, (2 * r + 1) * src_h / (2 * target_height));
    for (int c = 0; c < out_w; ++c) {
      const int sc = std::min(src_w - 1, (2 * c + 1) * src_w / (2 * out_w));
      out(r, c) = mask(sr, sc) ? ink_value : std::uint8_t{255};
    }
  }
  return out;
}

}  // namespace hwcls
