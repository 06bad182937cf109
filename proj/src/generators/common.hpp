#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "gapcha/generators.hpp"
#include "gapcha/random.hpp"
#include "gapcha/registry.hpp"

namespace gapcha::gen::detail {

inline int param(const DifficultyParams& params, const std::string& name) {
  auto it = params.find(name);
  if (it == params.end()) throw Error(ErrorCode::InvalidParams, "missing parameter " + name);
  return it->second;
}

inline Color rgb(int r, int g, int b) {
  return Color{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b), 255};
}

/// Saturated colours that are easy to tell apart.
inline const std::vector<Color>& palette() {
  static const std::vector<Color> colors = {
      rgb(220, 40, 40),  rgb(40, 160, 60), rgb(40, 90, 220), rgb(240, 200, 30),
      rgb(150, 60, 190), rgb(250, 130, 20), rgb(30, 190, 200), rgb(120, 80, 40),
  };
  return colors;
}

inline const Color kInk = rgb(40, 40, 48);
inline const Color kPaper = rgb(245, 245, 240);
inline const Color kPanel = rgb(225, 225, 220);

/// Regular-ish convex polygon with `sides` vertices around (cx, cy).
inline PolygonShape regular_polygon(double cx, double cy, double rx, double ry, int sides, double phase) {
  PolygonShape poly;
  for (int i = 0; i < sides; ++i) {
    const double a = phase + 2.0 * std::numbers::pi * i / sides;
    poly.vertices.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
  }
  return poly;
}

/// Thick straight segment as a convex quad.
inline PolygonShape segment(Point a, Point b, double width) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len = std::hypot(dx, dy);
  const double nx = -dy / len * width / 2;
  const double ny = dx / len * width / 2;
  return PolygonShape{{{a.x + nx, a.y + ny}, {b.x + nx, b.y + ny}, {b.x - nx, b.y - ny}, {a.x - nx, a.y - ny}}};
}

inline GridGeometry uniform_grid(int rows, int cols, int x0, int y0, int cell_w, int cell_h) {
  GridGeometry grid{rows, cols, {}};
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) grid.cells.push_back(PixelRect{x0 + c * cell_w, y0 + r * cell_h, cell_w, cell_h});
  }
  return grid;
}

inline SelectSchema select_schema(const GridGeometry& grid) {
  return SelectSchema{0, grid.rows, grid.cols, grid.cells};
}

/// Replaces "{key}" in the family's instruction template.
inline std::string instruction(std::string_view family_id, const std::map<std::string, std::string>& values) {
  std::string text = registry_lookup(family_id).default_instruction_template;
  for (const auto& [key, value] : values) {
    const std::string token = "{" + key + "}";
    for (auto pos = text.find(token); pos != std::string::npos; pos = text.find(token)) {
      text.replace(pos, token.size(), value);
    }
  }
  return text;
}

inline GeneratedInstance make_instance(std::string_view family_id, Seed seed, const DifficultyParams& params) {
  GeneratedInstance inst;
  inst.family_id = std::string(family_id);
  inst.seed = seed;
  inst.params = params;
  return inst;
}

[[noreturn]] inline void retry_exceeded(std::string_view what) {
  throw Error(ErrorCode::GenerationRetryExceeded, std::string(what) + " after " + std::to_string(kMaxAttempts) + " attempts");
}

}  // namespace gapcha::gen::detail
