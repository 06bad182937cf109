#include "gapcha/raster.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "gapcha/font.hpp"
#include "gapcha/random.hpp"

namespace gapcha::raster {

namespace {

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool polygon_covers(const PolygonShape& poly, double x, double y) {
  const auto& v = poly.vertices;
  if (v.size() < 3) return false;
  bool any_pos = false;
  bool any_neg = false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    const double cross = (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x);
    if (cross > 0) any_pos = true;
    if (cross < 0) any_neg = true;
    if (any_pos && any_neg) return false;
  }
  return true;
}

bool glyph_covers(const GlyphShape& g, double x, double y) {
  const auto bits = font::glyph(g.ch);
  if (!bits || g.scale <= 0) return false;
  const double fx = (x - g.x) / g.scale;
  const double fy = (y - g.y) / g.scale;
  if (fx < 0 || fy < 0 || fx >= font::kGlyphWidth || fy >= font::kGlyphHeight) return false;
  return font::lit(*bits, static_cast<int>(fx), static_cast<int>(fy));
}

void paint_disc(Image& image, double cx, double cy, double radius, Color color) {
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
  const int x1 = std::min(image.width() - 1, static_cast<int>(std::ceil(cx + radius)));
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
  const int y1 = std::min(image.height() - 1, static_cast<int>(std::ceil(cy + radius)));
  const double r2 = radius * radius;
  for (int y = y0; y <= y1; ++y) {
    const double dy = y + 0.5 - cy;
    for (int x = x0; x <= x1; ++x) {
      const double dx = x + 0.5 - cx;
      if (dx * dx + dy * dy <= r2) image.set(x, y, color);
    }
  }
}

bool annulus_contains(const AnnulusMask& m, int px, int py, std::int64_t* dist2_quarter = nullptr) {
  const std::int64_t dx = 2LL * px + 1 - 2LL * m.cx;
  const std::int64_t dy = 2LL * py + 1 - 2LL * m.cy;
  const std::int64_t d2 = dx * dx + dy * dy;  // 4 * squared distance
  if (dist2_quarter) *dist2_quarter = d2;
  const std::int64_t lo = 4LL * m.inner_radius * m.inner_radius;
  const std::int64_t hi = 4LL * m.outer_radius * m.outer_radius;
  return d2 >= lo && d2 <= hi;
}

std::int64_t isqrt(std::int64_t v) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

/// Screen-clockwise angle order around the centre, starting on the +x axis.
bool angle_less(std::int64_t ax, std::int64_t ay, std::int64_t bx, std::int64_t by) {
  auto half = [](std::int64_t x, std::int64_t y) { return (y > 0 || (y == 0 && x > 0)) ? 0 : 1; };
  const int ha = half(ax, ay);
  const int hb = half(bx, by);
  if (ha != hb) return ha < hb;
  return ax * by - ay * bx > 0;
}

/// Lane speed in lane positions per frame.
double lane_speed(const DotRegion& region, std::size_t lane_length) {
  return std::visit(
      Overloaded{
          [](const GlyphMask& m) { return static_cast<double>(m.drift_px); },
          [&](const AnnulusMask& m) {
            const double mid = 0.5 * (m.inner_radius + m.outer_radius);
            const double omega = m.drift_px / mid;  // radians per frame
            return m.direction * omega * static_cast<double>(lane_length) / (2.0 * std::numbers::pi);
          },
      },
      region);
}

/// Jittered systematic sample of `count` indices out of [0, total).
std::vector<std::size_t> stratified_indices(std::size_t total, std::size_t count, Stream& stream) {
  std::vector<std::size_t> out;
  out.reserve(count);
  if (total == 0 || count == 0) return out;
  const double step = static_cast<double>(total) / static_cast<double>(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double pos = (static_cast<double>(k) + stream.uniform01()) * step;
    out.push_back(std::min(total - 1, static_cast<std::size_t>(pos)));
  }
  return out;
}

/// Lanes that move together: identical pixel columns for glyph rows, every
/// band of an annulus (all bands turn at the same angular speed).
std::vector<std::vector<std::size_t>> lane_groups(const DotRegion& region,
                                                  const std::vector<std::vector<PixelCoord>>& lanes) {
  if (std::holds_alternative<AnnulusMask>(region)) {
    std::vector<std::size_t> all(lanes.size());
    for (std::size_t l = 0; l < lanes.size(); ++l) all[l] = l;
    return {all};
  }
  std::map<std::vector<int>, std::vector<std::size_t>> by_columns;
  for (std::size_t l = 0; l < lanes.size(); ++l) {
    std::vector<int> xs;
    for (const auto& p : lanes[l]) xs.push_back(p.x);
    by_columns[xs].push_back(l);
  }
  std::vector<std::vector<std::size_t>> groups;
  for (auto& [xs, members] : by_columns) groups.push_back(std::move(members));
  std::sort(groups.begin(), groups.end());
  return groups;
}

/// Systematic split of `count` over weights: floor(u + count * cumulative / total).
std::vector<std::size_t> systematic_counts(const std::vector<std::size_t>& weights, std::size_t count, double u) {
  std::size_t total = 0;
  for (auto w : weights) total += w;
  std::vector<std::size_t> out;
  std::size_t before = 0;
  for (auto w : weights) {
    const auto lo = std::floor(u + static_cast<double>(count) * static_cast<double>(before) / static_cast<double>(total));
    before += w;
    const auto hi = std::floor(u + static_cast<double>(count) * static_cast<double>(before) / static_cast<double>(total));
    out.push_back(static_cast<std::size_t>(hi - lo));
  }
  return out;
}

/// Initial dot positions (lane, index). Within a group the dots sit at evenly
/// spaced fractions of the lane length and the lanes take turns, so the group
/// stays evenly covered under any common cyclic shift.
std::vector<std::pair<std::size_t, std::size_t>> place_on_lanes(const std::vector<std::vector<PixelCoord>>& lanes,
                                                                const std::vector<std::vector<std::size_t>>& groups,
                                                                std::size_t count, Stream& stream) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t area = 0;
  std::vector<std::size_t> group_area;
  for (const auto& g : groups) {
    std::size_t a = 0;
    for (auto l : g) a += lanes[l].size();
    group_area.push_back(a);
    area += a;
  }
  if (area == 0 || count == 0) return out;
  const auto per_group = systematic_counts(group_area, count, stream.uniform01());
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    const std::size_t n = per_group[gi];
    if (n == 0) continue;
    std::vector<std::size_t> lens;
    for (auto l : g) lens.push_back(lanes[l].size());
    const auto per_lane = systematic_counts(lens, n, stream.uniform01());
    // Stride scheduling: lane l's j-th turn has key (j + phase_l) / c_l.
    std::vector<std::pair<double, std::size_t>> turns;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double phase = stream.uniform01();
      for (std::size_t j = 0; j < per_lane[i]; ++j) {
        turns.push_back({(static_cast<double>(j) + phase) / static_cast<double>(per_lane[i]), g[i]});
      }
    }
    std::sort(turns.begin(), turns.end());
    const double u = stream.uniform01();
    for (std::size_t k = 0; k < turns.size(); ++k) {
      const auto lane = turns[k].second;
      const auto len = lanes[lane].size();
      const double t = (static_cast<double>(k) + u) / static_cast<double>(turns.size());
      out.push_back({lane, std::min(len - 1, static_cast<std::size_t>(t * static_cast<double>(len)))});
    }
  }
  return out;
}

}  // namespace

Image::Image(int width, int height, Color fill)
    : width_(width), height_(height), rgba_(static_cast<std::size_t>(width) * height * 4) {
  for (std::size_t i = 0; i < rgba_.size(); i += 4) {
    rgba_[i] = fill.r;
    rgba_[i + 1] = fill.g;
    rgba_[i + 2] = fill.b;
    rgba_[i + 3] = fill.a;
  }
}

Color Image::at(int x, int y) const {
  const auto i = (static_cast<std::size_t>(y) * width_ + x) * 4;
  return Color{rgba_[i], rgba_[i + 1], rgba_[i + 2], rgba_[i + 3]};
}

void Image::set(int x, int y, Color c) {
  const auto i = (static_cast<std::size_t>(y) * width_ + x) * 4;
  rgba_[i] = c.r;
  rgba_[i + 1] = c.g;
  rgba_[i + 2] = c.b;
  rgba_[i + 3] = c.a;
}

Image Image::crop(const PixelRect& rect) const {
  Image out(rect.width, rect.height, Color{});
  for (int y = 0; y < rect.height; ++y) {
    const auto src = (static_cast<std::size_t>(rect.y + y) * width_ + rect.x) * 4;
    const auto dst = static_cast<std::size_t>(y) * rect.width * 4;
    std::copy_n(rgba_.begin() + static_cast<std::ptrdiff_t>(src), rect.width * 4,
                out.rgba_.begin() + static_cast<std::ptrdiff_t>(dst));
  }
  return out;
}

bool covers(const Shape& shape, double x, double y) {
  return std::visit(
      Overloaded{
          [&](const CircleShape& c) {
            const double dx = x - c.cx;
            const double dy = y - c.cy;
            return dx * dx + dy * dy <= c.radius * c.radius;
          },
          [&](const RectShape& r) { return x >= r.x && x < r.x + r.width && y >= r.y && y < r.y + r.height; },
          [&](const PolygonShape& p) { return polygon_covers(p, x, y); },
          [&](const GlyphShape& g) { return glyph_covers(g, x, y); },
      },
      shape);
}

Bounds bounds(const Shape& shape) {
  return std::visit(
      Overloaded{
          [](const CircleShape& c) {
            return Bounds{c.cx - c.radius, c.cy - c.radius, c.cx + c.radius, c.cy + c.radius};
          },
          [](const RectShape& r) { return Bounds{r.x, r.y, r.x + r.width, r.y + r.height}; },
          [](const PolygonShape& p) {
            Bounds b{1e300, 1e300, -1e300, -1e300};
            for (const auto& v : p.vertices) {
              b.min_x = std::min(b.min_x, v.x);
              b.min_y = std::min(b.min_y, v.y);
              b.max_x = std::max(b.max_x, v.x);
              b.max_y = std::max(b.max_y, v.y);
            }
            return b;
          },
          [](const GlyphShape& g) {
            return Bounds{static_cast<double>(g.x), static_cast<double>(g.y),
                          static_cast<double>(g.x + font::kGlyphWidth * g.scale),
                          static_cast<double>(g.y + font::kGlyphHeight * g.scale)};
          },
      },
      shape);
}

void paint(Image& image, const Shape& shape, Color color) {
  const auto b = bounds(shape);
  const int x0 = std::max(0, static_cast<int>(std::floor(b.min_x)));
  const int x1 = std::min(image.width() - 1, static_cast<int>(std::ceil(b.max_x)));
  const int y0 = std::max(0, static_cast<int>(std::floor(b.min_y)));
  const int y1 = std::min(image.height() - 1, static_cast<int>(std::ceil(b.max_y)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (covers(shape, x + 0.5, y + 0.5)) image.set(x, y, color);
    }
  }
}

void check_scene(const SceneDescription& scene) {
  if (scene.width <= 0 || scene.height <= 0) {
    throw Error(ErrorCode::CanvasOverflow, "empty canvas");
  }
  std::set<int> z_values;
  for (const auto& layer : scene.layers) {
    const auto b = bounds(layer.shape);
    if (b.min_x < 0 || b.min_y < 0 || b.max_x > scene.width || b.max_y > scene.height) {
      throw Error(ErrorCode::CanvasOverflow,
                  "primitive at z=" + std::to_string(layer.z) + " (" + layer.region + ") escapes the canvas");
    }
    if (!z_values.insert(layer.z).second) {
      throw Error(ErrorCode::InvalidParams, "duplicate z value " + std::to_string(layer.z));
    }
  }
  if (scene.animation) {
    if (const auto* timed = std::get_if<TimedDots>(&scene.animation->content)) {
      for (const auto& d : timed->dots) {
        if (d.x - d.radius < 0 || d.y - d.radius < 0 || d.x + d.radius > scene.width ||
            d.y + d.radius > scene.height) {
          throw Error(ErrorCode::CanvasOverflow, "scheduled dot escapes the canvas");
        }
      }
    }
  }
  if (!scene.tray_order.empty()) {
    if (!scene.cells) throw Error(ErrorCode::InvalidParams, "tray order without cell geometry");
    for (const auto& cell : scene.cells->cells) {
      if (cell.x < 0 || cell.y < 0 || cell.x + cell.width > scene.width ||
          cell.y + cell.height > scene.height) {
        throw Error(ErrorCode::CanvasOverflow, "tile escapes the canvas");
      }
    }
  }
}

Image render_static(const SceneDescription& scene) {
  check_scene(scene);
  Image image(scene.width, scene.height, scene.background);
  std::vector<const Layer*> order;
  order.reserve(scene.layers.size());
  for (const auto& layer : scene.layers) order.push_back(&layer);
  std::sort(order.begin(), order.end(), [](const Layer* a, const Layer* b) { return a->z < b->z; });
  for (const auto* layer : order) paint(image, layer->shape, layer->color);
  return image;
}

std::vector<std::vector<PixelCoord>> region_lanes(const DotRegion& region, int width, int height) {
  return std::visit(
      Overloaded{
          [&](const GlyphMask& m) {
            std::vector<std::vector<PixelCoord>> lanes(static_cast<std::size_t>(height));
            for (int y = 0; y < height; ++y) {
              for (int x = 0; x < width; ++x) {
                for (const auto& g : m.glyphs) {
                  if (glyph_covers(g, x + 0.5, y + 0.5)) {
                    lanes[static_cast<std::size_t>(y)].push_back({x, y});
                    break;
                  }
                }
              }
            }
            std::erase_if(lanes, [](const auto& lane) { return lane.empty(); });
            return lanes;
          },
          [&](const AnnulusMask& m) {
            std::vector<std::vector<PixelCoord>> lanes(static_cast<std::size_t>(m.outer_radius) + 1);
            const int x0 = std::max(0, m.cx - m.outer_radius - 1);
            const int x1 = std::min(width - 1, m.cx + m.outer_radius + 1);
            const int y0 = std::max(0, m.cy - m.outer_radius - 1);
            const int y1 = std::min(height - 1, m.cy + m.outer_radius + 1);
            for (int y = y0; y <= y1; ++y) {
              for (int x = x0; x <= x1; ++x) {
                std::int64_t d2 = 0;
                if (!annulus_contains(m, x, y, &d2)) continue;
                const auto band = static_cast<std::size_t>(isqrt(d2) / 2);
                lanes[std::min(band, lanes.size() - 1)].push_back({x, y});
              }
            }
            for (auto& lane : lanes) {
              std::sort(lane.begin(), lane.end(), [&](const PixelCoord& a, const PixelCoord& b) {
                return angle_less(2LL * a.x + 1 - 2LL * m.cx, 2LL * a.y + 1 - 2LL * m.cy,
                                  2LL * b.x + 1 - 2LL * m.cx, 2LL * b.y + 1 - 2LL * m.cy);
              });
            }
            std::erase_if(lanes, [](const auto& lane) { return lane.empty(); });
            return lanes;
          },
      },
      region);
}

std::vector<PixelCoord> region_pixels(const DotRegion& region, int width, int height) {
  std::vector<PixelCoord> out;
  for (const auto& lane : region_lanes(region, width, height)) out.insert(out.end(), lane.begin(), lane.end());
  return out;
}

std::vector<std::vector<PixelCoord>> expand_dot_field(const SceneDescription& scene) {
  if (!scene.animation) return {};
  const auto* field = std::get_if<DotField>(&scene.animation->content);
  if (!field) return {};
  const int w = scene.width;
  const int h = scene.height;
  const auto frames = static_cast<std::size_t>(scene.animation->frame_count);
  const double canvas_area = static_cast<double>(w) * h;

  std::vector<std::uint8_t> claimed(static_cast<std::size_t>(w) * h, 0);
  struct Track {
    std::size_t lane;
    std::size_t pos;
  };
  struct RegionDots {
    std::vector<std::vector<PixelCoord>> lanes;
    std::vector<double> speeds;
    std::vector<Track> tracks;
  };
  std::vector<RegionDots> regions;
  std::size_t region_dot_total = 0;

  for (std::size_t r = 0; r < field->regions.size(); ++r) {
    RegionDots rd;
    for (auto lane : region_lanes(field->regions[r], w, h)) {
      // A pixel belongs to the first region that claims it.
      std::erase_if(lane, [&](const PixelCoord& p) {
        return claimed[static_cast<std::size_t>(p.y) * w + p.x] != 0;
      });
      if (lane.empty()) continue;
      for (const auto& p : lane) claimed[static_cast<std::size_t>(p.y) * w + p.x] = 1;
      rd.speeds.push_back(lane_speed(field->regions[r], lane.size()));
      rd.lanes.push_back(std::move(lane));
    }
    std::size_t area = 0;
    for (const auto& lane : rd.lanes) area += lane.size();
    const auto count = static_cast<std::size_t>(
        std::llround(static_cast<double>(field->dot_count) * static_cast<double>(area) / canvas_area));
    auto stream = derive_stream(Seed{field->noise_key}, "region:" + std::to_string(r));
    for (const auto& [lane, pos] : place_on_lanes(rd.lanes, lane_groups(field->regions[r], rd.lanes), count, stream)) {
      rd.tracks.push_back({lane, pos});
    }
    region_dot_total += rd.tracks.size();
    regions.push_back(std::move(rd));
  }

  std::vector<PixelCoord> background;
  background.reserve(claimed.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!claimed[static_cast<std::size_t>(y) * w + x]) background.push_back({x, y});
    }
  }
  const std::size_t bg_count =
      static_cast<std::size_t>(field->dot_count) > region_dot_total
          ? static_cast<std::size_t>(field->dot_count) - region_dot_total
          : 0;

  std::vector<std::vector<PixelCoord>> out(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    auto& dots = out[f];
    dots.reserve(static_cast<std::size_t>(field->dot_count));
    for (const auto& rd : regions) {
      for (const auto& t : rd.tracks) {
        const auto& lane = rd.lanes[t.lane];
        const auto len = static_cast<std::int64_t>(lane.size());
        const auto shift = std::llround(static_cast<double>(f) * rd.speeds[t.lane]);
        const auto pos = ((static_cast<std::int64_t>(t.pos) + shift) % len + len) % len;
        dots.push_back(lane[static_cast<std::size_t>(pos)]);
      }
    }
    auto stream = derive_stream(Seed{field->noise_key}, "background:" + std::to_string(f));
    for (auto idx : stratified_indices(background.size(), bg_count, stream)) {
      dots.push_back(background[idx]);
    }
  }
  return out;
}

std::vector<Image> render_frames(const SceneDescription& scene) {
  const Image base = render_static(scene);
  if (!scene.animation) return {base};
  const auto& anim = *scene.animation;
  std::vector<Image> frames;
  frames.reserve(static_cast<std::size_t>(anim.frame_count));
  if (const auto* field = std::get_if<DotField>(&anim.content)) {
    for (const auto& dots : expand_dot_field(scene)) {
      Image frame = base;
      for (const auto& d : dots) paint_disc(frame, d.x + 0.5, d.y + 0.5, field->dot_radius, field->dot_color);
      frames.push_back(std::move(frame));
    }
  } else {
    const auto& timed = std::get<TimedDots>(anim.content);
    for (int f = 0; f < anim.frame_count; ++f) {
      const std::int64_t t = static_cast<std::int64_t>(f) * anim.frame_ms;
      Image frame = base;
      for (const auto& d : timed.dots) {
        if (d.appear_ms <= t && t < d.disappear_ms) paint_disc(frame, d.x, d.y, d.radius, timed.color);
      }
      frames.push_back(std::move(frame));
    }
  }
  return frames;
}

std::vector<Asset> rasterize(const SceneDescription& scene) {
  std::vector<Asset> assets;
  if (!scene.tray_order.empty()) {
    const Image base = render_static(scene);
    for (std::size_t i = 0; i < scene.tray_order.size(); ++i) {
      const auto cell = static_cast<std::size_t>(scene.tray_order[i]);
      if (cell >= scene.cells->cells.size()) throw Error(ErrorCode::InvalidParams, "tray cell out of range");
      const Image tile = base.crop(scene.cells->cells[cell]);
      assets.push_back(Asset{static_cast<int>(i), AssetKind::StaticImage, tile.width(), tile.height(), 0,
                             {tile.rgba()}});
    }
    return assets;
  }
  auto frames = render_frames(scene);
  Asset asset;
  asset.asset_id = 0;
  asset.width = scene.width;
  asset.height = scene.height;
  if (scene.animation) {
    asset.kind = AssetKind::Animation;
    asset.frame_ms = scene.animation->frame_ms;
  }
  for (auto& f : frames) asset.frames.push_back(std::move(f.rgba()));
  assets.push_back(std::move(asset));
  return assets;
}

}  // namespace gapcha::raster
