#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace gapcha::font {

inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;

/// Row bitmaps, top row first; bit 4 is the leftmost column.
using GlyphBits = std::array<std::uint8_t, kGlyphHeight>;

/// Bitmap for an uppercase letter or digit; nullopt for anything else.
std::optional<GlyphBits> glyph(char ch);

inline bool lit(const GlyphBits& bits, int col, int row) {
  return (bits[static_cast<std::size_t>(row)] >> (kGlyphWidth - 1 - col)) & 1U;
}

}  // namespace gapcha::font
