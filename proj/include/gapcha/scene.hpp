#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gapcha/types.hpp"

namespace gapcha {

struct Color {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  std::uint8_t a = 255;
  friend auto operator<=>(const Color&, const Color&) = default;
};

struct Point {
  double x = 0;
  double y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct CircleShape {
  double cx = 0;
  double cy = 0;
  double radius = 0;
  friend bool operator==(const CircleShape&, const CircleShape&) = default;
};

/// Axis-aligned; covers points with x <= px < x + width (same for y).
struct RectShape {
  double x = 0;
  double y = 0;
  double width = 0;
  double height = 0;
  friend bool operator==(const RectShape&, const RectShape&) = default;
};

/// Convex polygon, vertices in either winding order.
struct PolygonShape {
  std::vector<Point> vertices;
  friend bool operator==(const PolygonShape&, const PolygonShape&) = default;
};

/// Character from the built-in 5x7 bitmap font, each font cell drawn as a
/// scale x scale block with its top-left corner at (x, y).
struct GlyphShape {
  int x = 0;
  int y = 0;
  int scale = 1;
  char ch = ' ';
  friend bool operator==(const GlyphShape&, const GlyphShape&) = default;
};

using Shape = std::variant<CircleShape, RectShape, PolygonShape, GlyphShape>;

struct Layer {
  Shape shape;
  Color color;
  int z = 0;
  std::string region;  // optional semantic id, e.g. "net:1:2"
  friend bool operator==(const Layer&, const Layer&) = default;
};

/// Selectable/placeable grid cells in canvas coordinates.
struct GridGeometry {
  int rows = 0;
  int cols = 0;
  std::vector<PixelRect> cells;  // row-major
  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;
};

// ---------------------------------------------------------------------------
// animations
// ---------------------------------------------------------------------------

/// Union of glyph cells; dots drift along pixel rows, wrapping within the row's
/// mask pixels.
struct GlyphMask {
  std::vector<GlyphShape> glyphs;
  int drift_px = 2;
  friend bool operator==(const GlyphMask&, const GlyphMask&) = default;
};

/// Integer-centred annulus; dots rotate around the centre at drift_px per
/// frame measured on the mid radius. direction is +1 (clockwise on screen) or -1.
struct AnnulusMask {
  int cx = 0;
  int cy = 0;
  int inner_radius = 0;
  int outer_radius = 0;
  int drift_px = 2;
  int direction = 1;
  friend bool operator==(const AnnulusMask&, const AnnulusMask&) = default;
};

using DotRegion = std::variant<GlyphMask, AnnulusMask>;

enum class BackgroundMotion { Rerandomize };

/// Random-dot kinematogram: region dots move coherently, background dots are
/// resampled every frame. Density is equal inside and outside the regions.
struct DotField {
  int dot_count = 0;
  double dot_radius = 1.0;
  Color dot_color;
  std::vector<DotRegion> regions;
  BackgroundMotion background = BackgroundMotion::Rerandomize;
  std::uint64_t noise_key = 0;
  friend bool operator==(const DotField&, const DotField&) = default;
};

struct TimedDots {
  std::vector<DotEvent> dots;
  Color color;
  friend bool operator==(const TimedDots&, const TimedDots&) = default;
};

struct Animation {
  int frame_count = 0;
  int frame_ms = 0;
  std::variant<DotField, TimedDots> content;
  friend bool operator==(const Animation&, const Animation&) = default;
};

/// Everything needed to paint a challenge's assets. Server-side only.
struct SceneDescription {
  int width = 0;
  int height = 0;
  Color background;
  std::vector<Layer> layers;  // unique z values
  std::optional<Animation> animation;
  std::optional<GridGeometry> cells;
  /// Non-empty for tile puzzles: asset i is the tile of board cell tray_order[i].
  std::vector<int> tray_order;
  friend bool operator==(const SceneDescription&, const SceneDescription&) = default;
};

/// Appends layers with strictly increasing z.
class SceneBuilder {
 public:
  SceneBuilder(int width, int height, Color background) {
    scene_.width = width;
    scene_.height = height;
    scene_.background = background;
  }

  SceneBuilder& add(Shape shape, Color color, std::string region = {}) {
    scene_.layers.push_back(Layer{std::move(shape), color, next_z_++, std::move(region)});
    return *this;
  }

  SceneDescription& scene() { return scene_; }
  SceneDescription release() { return std::move(scene_); }

 private:
  SceneDescription scene_;
  int next_z_ = 0;
};

}  // namespace gapcha
