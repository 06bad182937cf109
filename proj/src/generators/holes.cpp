#include <algorithm>

#include "common.hpp"

namespace gapcha::gen {

namespace {

using namespace detail;

struct Disc {
  double x;
  double y;
  double r;
};

PolygonShape rotated_ellipse(double cx, double cy, double rx, double ry, double theta) {
  PolygonShape poly;
  constexpr int kSides = 16;
  for (int i = 0; i < kSides; ++i) {
    const double a = 2.0 * std::numbers::pi * i / kSides;
    const double ex = rx * std::cos(a);
    const double ey = ry * std::sin(a);
    poly.vertices.push_back({cx + ex * std::cos(theta) - ey * std::sin(theta),
                             cy + ex * std::sin(theta) + ey * std::cos(theta)});
  }
  return poly;
}

/// Distance from (cx, cy) to the nearest edge of a convex polygon.
double inscribed_radius(const PolygonShape& poly, double cx, double cy) {
  double best = 1e300;
  const auto& v = poly.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    best = std::min(best, std::abs((b.x - a.x) * (a.y - cy) - (a.x - cx) * (b.y - a.y)) / len);
  }
  return best;
}

}  // namespace

GeneratedInstance hole_counting(Seed seed, const DifficultyParams& params) {
  const int hole_count = param(params, "hole_count");
  auto stream = derive_stream(seed, "hole_counting");

  const double cx = 180 + stream.uniform_int(-10, 10);
  const double cy = 180 + stream.uniform_int(-10, 10);
  Shape outer;
  double inner_limit = 0;
  if (stream.bernoulli(0.5)) {
    const double radius = static_cast<double>(stream.uniform_int(115, 145));
    outer = CircleShape{cx, cy, radius};
    inner_limit = radius;
  } else {
    auto poly = regular_polygon(cx, cy, static_cast<double>(stream.uniform_int(125, 150)),
                                static_cast<double>(stream.uniform_int(115, 150)),
                                static_cast<int>(stream.uniform_int(5, 8)), stream.uniform_real(0, 1));
    inner_limit = inscribed_radius(poly, cx, cy);
    outer = std::move(poly);
  }

  std::vector<Disc> placed;
  std::vector<Shape> holes;
  for (int attempt = 0; static_cast<int>(holes.size()) < hole_count; ++attempt) {
    if (attempt == kMaxAttempts) retry_exceeded("disjoint hole placement");
    const bool round = stream.bernoulli(0.5);
    const double rx = static_cast<double>(stream.uniform_int(14, 28));
    const double ry = round ? rx : static_cast<double>(stream.uniform_int(12, 24));
    const double extent = std::max(rx, ry);
    const double reach = inner_limit - extent - 10;
    const double angle = stream.uniform_real(0, 2 * std::numbers::pi);
    const double dist = reach * std::sqrt(stream.uniform01());
    const Disc d{cx + dist * std::cos(angle), cy + dist * std::sin(angle), extent};
    const bool clear = std::all_of(placed.begin(), placed.end(), [&](const Disc& o) {
      return std::hypot(o.x - d.x, o.y - d.y) >= o.r + d.r + 10;
    });
    if (reach <= 0 || !clear) continue;
    placed.push_back(d);
    if (round) {
      holes.push_back(CircleShape{d.x, d.y, rx});
    } else {
      holes.push_back(rotated_ellipse(d.x, d.y, rx, ry, stream.uniform_real(0, std::numbers::pi)));
    }
  }

  const Color body = stream.pick(palette());
  const Color freckle_color = rgb(body.r * 3 / 5, body.g * 3 / 5, body.b * 3 / 5);
  std::vector<Disc> freckles;
  const int freckle_target = static_cast<int>(stream.uniform_int(2, 6));
  for (int attempt = 0; attempt < kMaxAttempts && static_cast<int>(freckles.size()) < freckle_target; ++attempt) {
    const double r = static_cast<double>(stream.uniform_int(4, 7));
    const double reach = inner_limit - r - 6;
    const double angle = stream.uniform_real(0, 2 * std::numbers::pi);
    const double dist = reach * std::sqrt(stream.uniform01());
    const Disc d{cx + dist * std::cos(angle), cy + dist * std::sin(angle), r};
    const auto apart = [&](const Disc& o) { return std::hypot(o.x - d.x, o.y - d.y) >= o.r + d.r + 6; };
    if (std::all_of(placed.begin(), placed.end(), apart) && std::all_of(freckles.begin(), freckles.end(), apart)) {
      freckles.push_back(d);
    }
  }

  SceneBuilder b(360, 360, kPaper);
  b.add(outer, body, "outer");
  for (std::size_t i = 0; i < holes.size(); ++i) b.add(holes[i], kPaper, "hole");
  for (const auto& f : freckles) b.add(CircleShape{f.x, f.y, f.r}, freckle_color, "freckle");

  auto inst = make_instance(family::kHoleCounting, seed, params);
  inst.scene = b.release();
  inst.instruction = instruction(family::kHoleCounting, {});
  inst.interaction_schema = NumericSchema{0, 0, 9};
  inst.truth.payload = NumericAnswer{hole_count};
  return inst;
}

}  // namespace gapcha::gen
