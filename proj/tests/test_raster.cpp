#include <gtest/gtest.h>

#include <cmath>

#include "gapcha/font.hpp"
#include "gapcha/random.hpp"
#include "gapcha/raster.hpp"
#include "png_reader.hpp"

using namespace gapcha;
using raster::Image;

namespace {

const Color kRed{255, 0, 0, 255};
const Color kBlue{0, 0, 255, 255};
const Color kWhite{255, 255, 255, 255};
const Color kBlack{0, 0, 0, 255};

SceneDescription blank(int w, int h, Color bg = kWhite) {
  SceneDescription s;
  s.width = w;
  s.height = h;
  s.background = bg;
  return s;
}

std::size_t count_color(const Image& img, Color c) {
  std::size_t n = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) n += img.at(x, y) == c;
  }
  return n;
}

// Independent point-in-convex-polygon: all edge cross products share a sign (or are zero).
bool inside_polygon(const std::vector<Point>& v, double px, double py) {
  int sign = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    const double cross = (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
    const int s = cross > 0 ? 1 : (cross < 0 ? -1 : 0);
    if (s == 0) continue;
    if (sign == 0) sign = s;
    if (s != sign) return false;
  }
  return true;
}

}  // namespace

TEST(Rasterize, FullCanvasRectangleFillsEverything) {
  auto s = blank(37, 23);
  s.layers.push_back({RectShape{0, 0, 37, 23}, kRed, 0, ""});
  const auto img = raster::render_static(s);
  EXPECT_EQ(count_color(img, kRed), 37u * 23u);
}

TEST(Rasterize, HigherZWinsRegardlessOfListOrder) {
  auto s = blank(40, 40);
  s.layers.push_back({RectShape{10, 10, 20, 20}, kRed, 5, ""});
  s.layers.push_back({RectShape{0, 0, 25, 25}, kBlue, 1, ""});
  const auto img = raster::render_static(s);
  EXPECT_EQ(img.at(15, 15), kRed);
  EXPECT_EQ(img.at(5, 5), kBlue);
  EXPECT_EQ(img.at(28, 28), kRed);
}

TEST(Rasterize, CircleMatchesCenterInsideCount) {
  auto s = blank(100, 100);
  s.layers.push_back({CircleShape{50, 50, 10}, kBlack, 0, ""});
  const auto img = raster::render_static(s);
  std::size_t expected = 0;
  for (int y = 0; y < 100; ++y) {
    for (int x = 0; x < 100; ++x) {
      const double dx = x + 0.5 - 50;
      const double dy = y + 0.5 - 50;
      const bool in = dx * dx + dy * dy <= 100;
      expected += in;
      ASSERT_EQ(img.at(x, y) == kBlack, in) << x << "," << y;
    }
  }
  EXPECT_EQ(count_color(img, kBlack), expected);
}

TEST(Rasterize, CoverageRuleExactForEveryPrimitive) {
  auto stream = derive_stream(Seed{99}, "coverage");
  for (int trial = 0; trial < 40; ++trial) {
    auto s = blank(64, 64);
    Shape shape;
    switch (trial % 4) {
      case 0:
        shape = CircleShape{stream.uniform_real(15, 49), stream.uniform_real(15, 49), stream.uniform_real(2, 14)};
        break;
      case 1:
        shape = RectShape{stream.uniform_real(0, 30), stream.uniform_real(0, 30), stream.uniform_real(1, 30),
                          stream.uniform_real(1, 30)};
        break;
      case 2: {
        PolygonShape p;
        const double cx = stream.uniform_real(20, 44);
        const double cy = stream.uniform_real(20, 44);
        const int n = static_cast<int>(stream.uniform_int(3, 8));
        const double phase = stream.uniform01();
        for (int i = 0; i < n; ++i) {
          const double a = phase + 2 * 3.141592653589793 * i / n;
          p.vertices.push_back({cx + 18 * std::cos(a), cy + 15 * std::sin(a)});
        }
        shape = p;
        break;
      }
      default:
        shape = GlyphShape{static_cast<int>(stream.uniform_int(0, 20)), static_cast<int>(stream.uniform_int(0, 20)),
                           static_cast<int>(stream.uniform_int(1, 5)), "AK47XY"[trial % 6]};
    }
    s.layers.push_back({shape, kBlack, 0, ""});
    const auto img = raster::render_static(s);
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) {
        const double px = x + 0.5;
        const double py = y + 0.5;
        bool in = false;
        if (const auto* c = std::get_if<CircleShape>(&shape)) {
          in = (px - c->cx) * (px - c->cx) + (py - c->cy) * (py - c->cy) <= c->radius * c->radius;
        } else if (const auto* r = std::get_if<RectShape>(&shape)) {
          in = px >= r->x && px < r->x + r->width && py >= r->y && py < r->y + r->height;
        } else if (const auto* p = std::get_if<PolygonShape>(&shape)) {
          in = inside_polygon(p->vertices, px, py);
        } else {
          const auto& g = std::get<GlyphShape>(shape);
          const int col = static_cast<int>(std::floor((px - g.x) / g.scale));
          const int row = static_cast<int>(std::floor((py - g.y) / g.scale));
          if (col >= 0 && col < font::kGlyphWidth && row >= 0 && row < font::kGlyphHeight) {
            in = font::lit(*font::glyph(g.ch), col, row);
          }
        }
        ASSERT_EQ(img.at(x, y) == kBlack, in) << "trial " << trial << " at " << x << "," << y;
      }
    }
  }
}

TEST(Rasterize, OutOfCanvasPrimitiveIsCanvasOverflow) {
  auto s = blank(50, 50);
  s.layers.push_back({CircleShape{45, 25, 10}, kBlack, 0, ""});
  try {
    raster::rasterize(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CanvasOverflow);
  }
}

TEST(Rasterize, DuplicateZRejected) {
  auto s = blank(50, 50);
  s.layers.push_back({CircleShape{25, 25, 5}, kBlack, 1, ""});
  s.layers.push_back({CircleShape{20, 25, 5}, kRed, 1, ""});
  EXPECT_THROW(raster::rasterize(s), Error);
}

TEST(Encode, OnePixelWhitePng) {
  const std::vector<std::uint8_t> px = {255, 255, 255, 255};
  const auto bytes = raster::encode_png(1, 1, px);
  const auto img = testsupport::decode_png(bytes);
  ASSERT_EQ(img.width, 1);
  ASSERT_EQ(img.height, 1);
  EXPECT_EQ(img.rgba, px);
}

TEST(Encode, AnimationHasFramesAndDelay) {
  raster::Asset a;
  a.kind = AssetKind::Animation;
  a.width = 8;
  a.height = 6;
  a.frame_ms = 60;
  for (int f = 0; f < 24; ++f) {
    std::vector<std::uint8_t> buf(8 * 6 * 4, static_cast<std::uint8_t>(f * 10));
    a.frames.push_back(buf);
  }
  const auto anim = testsupport::decode_apng(raster::encode(a));
  EXPECT_EQ(anim.declared_frames, 24);
  ASSERT_EQ(anim.frames.size(), 24u);
  for (std::size_t f = 0; f < 24; ++f) {
    EXPECT_NEAR(anim.delays_s[f], 0.060, 1e-12);
    EXPECT_EQ(anim.frames[f].rgba, a.frames[f]);
  }
}

TEST(Encode, RoundTripOverRandomScenes) {
  auto stream = derive_stream(Seed{2024}, "scenes");
  for (int trial = 0; trial < 50; ++trial) {
    const int w = static_cast<int>(stream.uniform_int(20, 120));
    const int h = static_cast<int>(stream.uniform_int(20, 120));
    auto s = blank(w, h, Color{static_cast<std::uint8_t>(stream.uniform_int(0, 255)), 10, 20, 255});
    const int n = static_cast<int>(stream.uniform_int(1, 12));
    for (int i = 0; i < n; ++i) {
      const Color c{static_cast<std::uint8_t>(stream.uniform_int(0, 255)),
                    static_cast<std::uint8_t>(stream.uniform_int(0, 255)),
                    static_cast<std::uint8_t>(stream.uniform_int(0, 255)),
                    static_cast<std::uint8_t>(stream.uniform_int(0, 255))};
      const double r = stream.uniform_real(1, std::min(w, h) / 2.0 - 1);
      s.layers.push_back({CircleShape{stream.uniform_real(r, w - r), stream.uniform_real(r, h - r), r}, c, i, ""});
    }
    const auto assets = raster::rasterize(s);
    ASSERT_EQ(assets.size(), 1u);
    const auto img = testsupport::decode_png(raster::encode(assets[0]));
    ASSERT_EQ(img.width, w);
    ASSERT_EQ(img.height, h);
    ASSERT_EQ(img.rgba, assets[0].frames[0]) << "trial " << trial;
  }
}

TEST(Rasterize, TimedDotsVisibleOnlyInWindow) {
  auto s = blank(60, 60);
  s.animation = Animation{10, 100, TimedDots{{DotEvent{30, 30, 5, 200, 500}}, kRed}};
  const auto frames = raster::render_frames(s);
  ASSERT_EQ(frames.size(), 10u);
  for (int f = 0; f < 10; ++f) {
    const bool visible = f * 100 >= 200 && f * 100 < 500;
    EXPECT_EQ(frames[static_cast<std::size_t>(f)].at(30, 30) == kRed, visible) << f;
  }
}

TEST(Rasterize, TilesFollowTrayOrder) {
  auto s = blank(20, 10);
  s.layers.push_back({RectShape{10, 0, 10, 10}, kRed, 0, ""});
  s.cells = GridGeometry{1, 2, {{0, 0, 10, 10}, {10, 0, 10, 10}}};
  s.tray_order = {1, 0};
  const auto assets = raster::rasterize(s);
  ASSERT_EQ(assets.size(), 2u);
  EXPECT_EQ(assets[0].frames[0][0], 255);  // red tile first
  EXPECT_EQ(assets[0].frames[0][1], 0);
  EXPECT_EQ(assets[1].frames[0][1], 255);  // white tile second
}

TEST(Rasterize, DotFieldDeterministic) {
  auto s = blank(80, 40, kBlack);
  DotField field;
  field.dot_count = 200;
  field.dot_color = kWhite;
  field.noise_key = 42;
  field.regions.push_back(GlyphMask{{GlyphShape{10, 5, 4, 'H'}}, 2});
  s.animation = Animation{6, 60, field};
  EXPECT_EQ(raster::expand_dot_field(s), raster::expand_dot_field(s));
  for (const auto& frame : raster::expand_dot_field(s)) EXPECT_EQ(frame.size(), 200u);
}
