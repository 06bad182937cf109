#include <algorithm>

#include "common.hpp"
#include "gapcha/raster.hpp"

namespace gapcha::gen {

namespace {

using namespace detail;

constexpr int kTile = 100;
constexpr int kBlock = 10;

SceneDescription base_image(Stream& stream, int rows, int cols) {
  const int w = cols * kTile;
  const int h = rows * kTile;
  std::array<std::array<int, 3>, 4> corners;
  for (auto& c : corners) {
    for (auto& ch : c) ch = static_cast<int>(stream.uniform_int(30, 225));
  }
  SceneBuilder b(w, h, kPaper);
  for (int by = 0; by < h / kBlock; ++by) {
    for (int bx = 0; bx < w / kBlock; ++bx) {
      const double u = (bx + 0.5) * kBlock / w;
      const double v = (by + 0.5) * kBlock / h;
      std::array<int, 3> rgbv;
      for (std::size_t ch = 0; ch < 3; ++ch) {
        const double top = corners[0][ch] * (1 - u) + corners[1][ch] * u;
        const double bottom = corners[2][ch] * (1 - u) + corners[3][ch] * u;
        rgbv[ch] = static_cast<int>(std::lround(top * (1 - v) + bottom * v));
      }
      b.add(RectShape{double(bx * kBlock), double(by * kBlock), kBlock, kBlock}, rgb(rgbv[0], rgbv[1], rgbv[2]));
    }
  }
  const int shapes = static_cast<int>(stream.uniform_int(4, 5)) * rows * cols / 3 + 3;
  for (int i = 0; i < shapes; ++i) {
    const double r = static_cast<double>(stream.uniform_int(8, 24));
    const double cx = stream.uniform_real(r, w - r);
    const double cy = stream.uniform_real(r, h - r);
    const Color color = stream.pick(palette());
    switch (stream.uniform_int(0, 2)) {
      case 0: b.add(CircleShape{cx, cy, r}, color); break;
      case 1: b.add(RectShape{cx - r, cy - r * 0.6, 2 * r, 1.2 * r}, color); break;
      default: b.add(PolygonShape{{{cx, cy - r}, {cx + r, cy + r}, {cx - r, cy + r}}}, color); break;
    }
  }
  auto scene = b.release();
  scene.cells = uniform_grid(rows, cols, 0, 0, kTile, kTile);
  return scene;
}

bool tiles_distinct(const SceneDescription& scene) {
  const auto image = raster::render_static(scene);
  std::vector<raster::Image> tiles;
  for (const auto& cell : scene.cells->cells) tiles.push_back(image.crop(cell));
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    for (std::size_t j = i + 1; j < tiles.size(); ++j) {
      if (tiles[i] == tiles[j]) return false;
    }
  }
  return true;
}

}  // namespace

GeneratedInstance static_jigsaw(Seed seed, const DifficultyParams& params) {
  const int rows = param(params, "rows");
  const int cols = param(params, "cols");
  if (rows * cols < 2) throw Error(ErrorCode::InvalidParams, "a jigsaw needs at least two pieces");
  auto stream = derive_stream(seed, "static_jigsaw");

  SceneDescription scene;
  for (int attempt = 0;; ++attempt) {
    if (attempt == kMaxAttempts) retry_exceeded("jigsaw with distinct tiles");
    scene = base_image(stream, rows, cols);
    if (tiles_distinct(scene)) break;
  }

  const int n = rows * cols;
  std::vector<int> tray(static_cast<std::size_t>(n));
  for (int attempt = 0;; ++attempt) {
    if (attempt == kMaxAttempts) retry_exceeded("non-identity tray order");
    for (int i = 0; i < n; ++i) tray[static_cast<std::size_t>(i)] = i;
    stream.shuffle(tray);
    if (!std::is_sorted(tray.begin(), tray.end())) break;
  }
  scene.tray_order = tray;

  PlacementAnswer truth;
  PlacementSchema schema{rows, cols, kTile, kTile, {}};
  for (int i = 0; i < n; ++i) {
    truth.piece_to_cell[i] = tray[static_cast<std::size_t>(i)];
    schema.tray_asset_ids.push_back(i);
  }

  auto inst = make_instance(family::kStaticJigsaw, seed, params);
  inst.scene = std::move(scene);
  inst.instruction = instruction(family::kStaticJigsaw, {});
  inst.interaction_schema = schema;
  inst.truth.payload = truth;
  return inst;
}

}  // namespace gapcha::gen
