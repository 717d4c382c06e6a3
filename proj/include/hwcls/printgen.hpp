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

#ifndef HWCLS_PRINTGEN_HPP
#define HWCLS_PRINTGEN_HPP

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "hwcls/image.hpp"

namespace hwcls {

/// Fixed-cell bitmap font. Each glyph is cell_height x cell_width with
/// 1 = ink.
struct BitmapFont {
  std::string name;
  int cell_width = 0;
  int cell_height = 0;
  std::map<char32_t, GrayImage> glyphs;

  bool covers(char32_t ch) const { return glyphs.count(ch) > 0; }
};

/// Font file: {"name", "cell_width", "cell_height",
///             "glyphs": {"a": base64(cell_width*cell_height bytes)}}.
BitmapFont parse_font(std::string_view json_text);
BitmapFont load_font(const std::string& path);

/// Decodes standard (RFC 4648) base64 with optional padding.
std::string base64_decode(std::string_view in);

/// Blank cells around the composed bitmap before scaling.
inline constexpr int kPrintedMarginCells = 1;

/// Width of render_printed's output for `glyph_count` characters.
int printed_width(int glyph_count, const BitmapFont& font, int target_height);

/// Blits glyphs left to right with one blank column between cells and a
/// one-pixel margin, then scales to target_height with nearest-neighbor
/// sampling. Ink intensity is drawn from [0, 0.3] using `seed`.
GrayImage render_printed(std::string_view text, const BitmapFont& font,
                         int target_height, std::uint64_t seed);

}  // namespace hwcls

#endif  // HWCLS_PRINTGEN_HPP
