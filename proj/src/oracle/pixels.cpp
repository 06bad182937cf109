#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include "gapcha/oracle.hpp"

namespace gapcha::oracle {

int count_holes(const raster::Image& image, Color background) {
  const int w = image.width();
  const int h = image.height();
  std::vector<std::uint8_t> state(static_cast<std::size_t>(w) * h, 0);  // 0 unvisited, 1 blocked, 2 seen
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (image.at(x, y) != background) state[static_cast<std::size_t>(y) * w + x] = 1;
    }
  }
  auto fill = [&](int sx, int sy) {
    std::deque<std::pair<int, int>> queue{{sx, sy}};
    state[static_cast<std::size_t>(sy) * w + sx] = 2;
    while (!queue.empty()) {
      const auto [x, y] = queue.front();
      queue.pop_front();
      const int nbr[4][2] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
      for (const auto& [nx, ny] : nbr) {
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        auto& s = state[static_cast<std::size_t>(ny) * w + nx];
        if (s != 0) continue;
        s = 2;
        queue.push_back({nx, ny});
      }
    }
  };
  for (int x = 0; x < w; ++x) {
    for (int y : {0, h - 1}) {
      if (state[static_cast<std::size_t>(y) * w + x] == 0) fill(x, y);
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x : {0, w - 1}) {
      if (state[static_cast<std::size_t>(y) * w + x] == 0) fill(x, y);
    }
  }
  int holes = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (state[static_cast<std::size_t>(y) * w + x] == 0) {
        ++holes;
        fill(x, y);
      }
    }
  }
  return holes;
}

std::set<int> solve_colors(const SceneDescription& scene, int k) {
  const auto image = raster::render_static(scene);
  const Color paper = image.at(0, 0);
  std::set<int> out;
  for (std::size_t i = 0; i < scene.cells->cells.size(); ++i) {
    const auto& cell = scene.cells->cells[i];
    const Color panel = image.at(cell.x + 3, cell.y + 3);
    std::set<Color> colors;
    for (int y = cell.y; y < cell.y + cell.height; ++y) {
      for (int x = cell.x; x < cell.x + cell.width; ++x) {
        const Color c = image.at(x, y);
        if (c != paper && c != panel) colors.insert(c);
      }
    }
    if (static_cast<int>(colors.size()) == k) out.insert(static_cast<int>(i));
  }
  return out;
}

ClickSchedule solve_red_dots(const SceneDescription& scene, int quota) {
  const auto frames = raster::render_frames(scene);
  const int frame_ms = scene.animation->frame_ms;
  struct Blob {
    double x;
    double y;
    double area;
  };
  auto is_red = [](Color c) { return c.r >= 200 && c.g <= 80 && c.b <= 80; };

  ClickSchedule out;
  out.quota = quota;
  std::vector<Blob> open;  // blob tracked in the previous frame
  std::vector<std::int64_t> first_frame;
  std::vector<double> max_area;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto& img = frames[f];
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(img.width()) * img.height(), 0);
    std::vector<Blob> blobs;
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        if (seen[static_cast<std::size_t>(y) * img.width() + x] || !is_red(img.at(x, y))) continue;
        double sx = 0;
        double sy = 0;
        double n = 0;
        std::deque<std::pair<int, int>> queue{{x, y}};
        seen[static_cast<std::size_t>(y) * img.width() + x] = 1;
        while (!queue.empty()) {
          const auto [px, py] = queue.front();
          queue.pop_front();
          sx += px + 0.5;
          sy += py + 0.5;
          n += 1;
          const int nbr[4][2] = {{px + 1, py}, {px - 1, py}, {px, py + 1}, {px, py - 1}};
          for (const auto& [nx, ny] : nbr) {
            if (nx < 0 || ny < 0 || nx >= img.width() || ny >= img.height()) continue;
            auto& s = seen[static_cast<std::size_t>(ny) * img.width() + nx];
            if (s || !is_red(img.at(nx, ny))) continue;
            s = 1;
            queue.push_back({nx, ny});
          }
        }
        blobs.push_back({sx / n, sy / n, n});
      }
    }
    if (blobs.size() > 1) throw Error(ErrorCode::InvalidParams, "more than one red dot visible at once");
    const bool continuing = !blobs.empty() && !open.empty() &&
                            std::hypot(blobs[0].x - open[0].x, blobs[0].y - open[0].y) < 1.0;
    if (!open.empty() && !continuing) {
      out.dots.back().disappear_ms = static_cast<std::int64_t>(f) * frame_ms;
    }
    if (!blobs.empty() && !continuing) {
      const auto& b = blobs[0];
      out.dots.push_back(DotEvent{b.x, b.y, std::sqrt(b.area / std::numbers::pi),
                                  static_cast<std::int64_t>(f) * frame_ms, 0});
    }
    open = blobs;
  }
  if (!open.empty()) out.dots.back().disappear_ms = static_cast<std::int64_t>(frames.size()) * frame_ms;
  return out;
}

PlacementAnswer solve_jigsaw(const SceneDescription& scene) {
  const auto board = raster::render_static(scene);
  const auto assets = raster::rasterize(scene);
  PlacementAnswer out;
  for (const auto& asset : assets) {
    for (std::size_t c = 0; c < scene.cells->cells.size(); ++c) {
      if (board.crop(scene.cells->cells[c]).rgba() == asset.frames.front()) {
        out.piece_to_cell[asset.asset_id] = static_cast<int>(c);
        break;
      }
    }
  }
  return out;
}

}  // namespace gapcha::oracle
