#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gapcha/scene.hpp"
#include "gapcha/types.hpp"

namespace gapcha::raster {

/// RGBA8 pixel buffer, row-major, no padding.
class Image {
 public:
  Image() = default;
  Image(int width, int height, Color fill);

  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<std::uint8_t>& rgba() const { return rgba_; }
  std::vector<std::uint8_t>& rgba() { return rgba_; }

  Color at(int x, int y) const;
  void set(int x, int y, Color c);
  Image crop(const PixelRect& rect) const;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> rgba_;
};

struct Asset {
  int asset_id = 0;
  AssetKind kind = AssetKind::StaticImage;
  int width = 0;
  int height = 0;
  int frame_ms = 0;  // animations only
  std::vector<std::vector<std::uint8_t>> frames;  // RGBA8, one buffer per frame
};

/// Center-inside coverage: true iff the point lies inside (or on) the shape.
/// Rectangles are half-open on their right and bottom edges.
bool covers(const Shape& shape, double x, double y);

struct Bounds {
  double min_x = 0;
  double min_y = 0;
  double max_x = 0;
  double max_y = 0;
};
Bounds bounds(const Shape& shape);

/// Paints one primitive; no blending, the primitive colour replaces the pixel.
void paint(Image& image, const Shape& shape, Color color);

/// Throws CanvasOverflow if any primitive or scheduled dot leaves the canvas,
/// or InvalidParams if z values are not unique.
void check_scene(const SceneDescription& scene);

/// Background plus every layer in ascending z. No animation, no tiling.
Image render_static(const SceneDescription& scene);

struct PixelCoord {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const PixelCoord&, const PixelCoord&) = default;
};

/// Ordered pixel lanes of a dot region. Coherent motion is a cyclic shift
/// along each lane: pixel rows for glyph masks, integer radius bands ordered
/// by angle for annuli.
std::vector<std::vector<PixelCoord>> region_lanes(const DotRegion& region, int width, int height);

/// Pixels of a region in lane order.
std::vector<PixelCoord> region_pixels(const DotRegion& region, int width, int height);

/// Dot centre pixels for every frame of a dot-field animation.
std::vector<std::vector<PixelCoord>> expand_dot_field(const SceneDescription& scene);

/// Turns a scene into its client-visible assets: a single image, an animation,
/// or one tile per tray slot for tile puzzles.
std::vector<Asset> rasterize(const SceneDescription& scene);

/// Every frame of the scene's animation as full images (one frame if static).
std::vector<Image> render_frames(const SceneDescription& scene);

std::vector<std::uint8_t> encode_png(int width, int height, std::span<const std::uint8_t> rgba);
std::vector<std::uint8_t> encode_apng(int width, int height,
                                      const std::vector<std::vector<std::uint8_t>>& frames,
                                      int frame_ms);
/// PNG for static images, APNG for animations.
std::vector<std::uint8_t> encode(const Asset& asset);

}  // namespace gapcha::raster
