#include <algorithm>

#include "common.hpp"
#include "gapcha/raster.hpp"

namespace gapcha::gen {

namespace {

using namespace detail;

constexpr std::array<std::string_view, 4> kKinds = {"circle", "square", "triangle", "diamond"};

Shape make_shape(int kind, double cx, double cy, double h) {
  switch (kind) {
    case 0: return CircleShape{cx, cy, h};
    case 1: return RectShape{cx - h, cy - h, 2 * h, 2 * h};
    case 2: return PolygonShape{{{cx, cy - h}, {cx + h, cy + 0.8 * h}, {cx - h, cy + 0.8 * h}}};
    default: return PolygonShape{{{cx, cy - h}, {cx + h, cy}, {cx, cy + h}, {cx - h, cy}}};
  }
}

/// Every shape below the top keeps at least 15% of its pixels in view.
bool all_visible(const std::vector<Shape>& stack, const PixelRect& cell) {
  std::vector<int> own(stack.size(), 0);
  std::vector<int> seen(stack.size(), 0);
  for (int y = cell.y; y < cell.y + cell.height; ++y) {
    for (int x = cell.x; x < cell.x + cell.width; ++x) {
      bool covered_above = false;
      for (std::size_t i = stack.size(); i-- > 0;) {
        if (!raster::covers(stack[i], x + 0.5, y + 0.5)) continue;
        ++own[i];
        if (!covered_above) ++seen[i];
        covered_above = true;
      }
    }
  }
  for (std::size_t i = 0; i < stack.size(); ++i) {
    if (own[i] == 0 || seen[i] * 100 < own[i] * 15) return false;
  }
  return true;
}

}  // namespace

GeneratedInstance layered_stack(Seed seed, const DifficultyParams& params) {
  const int depth = param(params, "stack_depth");
  constexpr int kCell = 120;
  auto stream = derive_stream(seed, "layered_stack");
  const auto grid = uniform_grid(3, 3, 20, 20, kCell, kCell);

  const int rule_kind = static_cast<int>(stream.uniform_int(0, 3));
  const int rule_beneath = static_cast<int>(stream.uniform_int(1, depth - 1));

  std::vector<std::vector<int>> kinds(grid.cells.size());
  for (int attempt = 0;; ++attempt) {
    if (attempt == kMaxAttempts) retry_exceeded("mixed stack board");
    int hits = 0;
    for (auto& stack : kinds) {
      stack.assign(static_cast<std::size_t>(stream.uniform_int(1, depth)), 0);
      for (auto& k : stack) k = static_cast<int>(stream.uniform_int(0, 3));
      if (stream.bernoulli(0.4)) stack.back() = rule_kind;
      if (stack.back() == rule_kind && static_cast<int>(stack.size()) - 1 >= rule_beneath) ++hits;
    }
    if (hits > 0 && hits < static_cast<int>(kinds.size())) break;
  }

  SceneBuilder b(400, 400, kPaper);
  SelectionAnswer truth;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const auto& cell = grid.cells[i];
    b.add(RectShape{cell.x + 2.0, cell.y + 2.0, cell.width - 4.0, cell.height - 4.0}, kPanel);
    std::vector<Shape> shapes;
    for (int attempt = 0;; ++attempt) {
      if (attempt == kMaxAttempts) retry_exceeded("visible stack layout");
      shapes.clear();
      for (int kind : kinds[i]) {
        const double h = static_cast<double>(stream.uniform_int(22, 34));
        const double cx = cell.x + kCell / 2.0 + static_cast<double>(stream.uniform_int(-18, 18));
        const double cy = cell.y + kCell / 2.0 + static_cast<double>(stream.uniform_int(-18, 18));
        shapes.push_back(make_shape(kind, cx, cy, h));
      }
      if (all_visible(shapes, cell)) break;
    }
    std::vector<Color> colors(palette().begin(), palette().end());
    stream.shuffle(colors);
    for (std::size_t j = 0; j < shapes.size(); ++j) {
      b.add(shapes[j], colors[j], "cell:" + std::to_string(i) + ":stack");
    }
    const auto& stack = kinds[i];
    if (stack.back() == rule_kind && static_cast<int>(stack.size()) - 1 >= rule_beneath) {
      truth.cells.insert(static_cast<int>(i));
    }
  }

  auto inst = make_instance(family::kLayeredStack, seed, params);
  inst.scene = b.release();
  inst.scene.cells = grid;
  inst.instruction = instruction(family::kLayeredStack, {{"shape", std::string(kKinds[static_cast<std::size_t>(rule_kind)])},
                                                         {"m", std::to_string(rule_beneath)}});
  inst.interaction_schema = select_schema(grid);
  inst.truth.payload = truth;
  return inst;
}

}  // namespace gapcha::gen
