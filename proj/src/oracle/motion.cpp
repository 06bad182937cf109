#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <bit>

#include "gapcha/font.hpp"
#include "gapcha/generators.hpp"
#include "gapcha/oracle.hpp"

namespace gapcha::oracle {

namespace {

using raster::PixelCoord;

const DotField& dot_field(const SceneDescription& scene) {
  if (!scene.animation || !std::holds_alternative<DotField>(scene.animation->content)) {
    throw Error(ErrorCode::InvalidParams, "scene has no dot field");
  }
  return std::get<DotField>(scene.animation->content);
}

class Occupancy {
 public:
  Occupancy(const std::vector<std::vector<PixelCoord>>& frames, int width, int height)
      : width_(width), height_(height), cells_(frames.size() * static_cast<std::size_t>(width) * height, 0) {
    for (std::size_t f = 0; f < frames.size(); ++f) {
      for (const auto& p : frames[f]) cells_[index(f, p.x, p.y)] = 1;
    }
  }

  bool at(std::size_t frame, int x, int y) const {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) return false;
    return cells_[index(frame, x, y)] != 0;
  }

 private:
  std::size_t index(std::size_t f, int x, int y) const {
    return (f * static_cast<std::size_t>(height_) + static_cast<std::size_t>(y)) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> cells_;
};

/// Splits region pixels at the median row, then each half into `columns`
/// equal-count column bands.
std::vector<std::vector<PixelCoord>> quantile_bins(std::vector<PixelCoord> pixels, int columns) {
  std::sort(pixels.begin(), pixels.end(), [](const PixelCoord& a, const PixelCoord& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
  const auto mid = static_cast<std::ptrdiff_t>(pixels.size() / 2);
  std::vector<std::vector<PixelCoord>> bins;
  for (auto half : {std::vector<PixelCoord>(pixels.begin(), pixels.begin() + mid),
                    std::vector<PixelCoord>(pixels.begin() + mid, pixels.end())}) {
    std::sort(half.begin(), half.end(), [](const PixelCoord& a, const PixelCoord& b) {
      return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    for (int c = 0; c < columns; ++c) {
      const auto lo = half.size() * static_cast<std::size_t>(c) / static_cast<std::size_t>(columns);
      const auto hi = half.size() * static_cast<std::size_t>(c + 1) / static_cast<std::size_t>(columns);
      bins.emplace_back(half.begin() + static_cast<std::ptrdiff_t>(lo), half.begin() + static_cast<std::ptrdiff_t>(hi));
    }
  }
  return bins;
}

/// Dots at p in frame f that reappear at p + v in frame f + 1, summed over frames.
std::vector<int> pair_map(const std::vector<std::vector<PixelCoord>>& frames, const Occupancy& occ, int width,
                          int height, int vx, int vy) {
  std::vector<int> map(static_cast<std::size_t>(width) * height, 0);
  for (std::size_t f = 0; f + 1 < frames.size(); ++f) {
    for (const auto& p : frames[f]) {
      if (occ.at(f + 1, p.x + vx, p.y + vy)) ++map[static_cast<std::size_t>(p.y) * width + p.x];
    }
  }
  return map;
}

}  // namespace

UniformityReport frame_uniformity(const SceneDescription& scene, double alpha) {
  const auto& field = dot_field(scene);
  std::vector<int> bin_of(static_cast<std::size_t>(scene.width) * scene.height, -1);
  std::vector<double> bin_size;
  for (const auto& region : field.regions) {
    const int columns = std::holds_alternative<GlyphMask>(region) ? 4 : 2;
    for (const auto& bin : quantile_bins(raster::region_pixels(region, scene.width, scene.height), columns)) {
      for (const auto& p : bin) bin_of[static_cast<std::size_t>(p.y) * scene.width + p.x] = static_cast<int>(bin_size.size());
      bin_size.push_back(static_cast<double>(bin.size()));
    }
  }
  const double total = std::accumulate(bin_size.begin(), bin_size.end(), 0.0);

  UniformityReport report;
  report.bins = static_cast<int>(bin_size.size());
  const boost::math::chi_squared dist(report.bins - 1);
  report.critical = boost::math::quantile(boost::math::complement(dist, alpha));
  for (const auto& dots : raster::expand_dot_field(scene)) {
    std::vector<double> observed(bin_size.size(), 0);
    double n = 0;
    for (const auto& p : dots) {
      const int b = bin_of[static_cast<std::size_t>(p.y) * scene.width + p.x];
      if (b < 0) continue;
      observed[static_cast<std::size_t>(b)] += 1;
      n += 1;
    }
    double stat = 0;
    for (std::size_t b = 0; b < bin_size.size(); ++b) {
      const double expected = n * bin_size[b] / total;
      if (expected > 0) stat += (observed[b] - expected) * (observed[b] - expected) / expected;
    }
    ++report.frames;
    report.worst_statistic = std::max(report.worst_statistic, stat);
    if (stat > report.critical) ++report.rejections;
  }
  return report;
}

double max_density_gap(const SceneDescription& scene) {
  const auto& field = dot_field(scene);
  std::vector<std::uint8_t> inside(static_cast<std::size_t>(scene.width) * scene.height, 0);
  double area = 0;
  for (const auto& region : field.regions) {
    for (const auto& p : raster::region_pixels(region, scene.width, scene.height)) {
      auto& cell = inside[static_cast<std::size_t>(p.y) * scene.width + p.x];
      if (!cell) area += 1;
      cell = 1;
    }
  }
  const double outside_area = static_cast<double>(scene.width) * scene.height - area;
  double worst = 0;
  for (const auto& dots : raster::expand_dot_field(scene)) {
    double in = 0;
    for (const auto& p : dots) in += inside[static_cast<std::size_t>(p.y) * scene.width + p.x];
    const double out = static_cast<double>(dots.size()) - in;
    const double din = in / area;
    const double dout = out / outside_area;
    worst = std::max(worst, std::abs(din - dout) / dout);
  }
  return worst;
}

std::vector<TrackPoint> coherent_points(const std::vector<std::vector<PixelCoord>>& frames, int width, int height,
                                        int tolerance) {
  const Occupancy occ(frames, width, height);
  auto step_ok = [](int dx, int dy) {
    const int d = std::max(std::abs(dx), std::abs(dy));
    return d >= 1 && d <= 4;
  };
  std::vector<TrackPoint> out;
  for (std::size_t f = 0; f + 3 < frames.size(); ++f) {
    for (const auto& p : frames[f]) {
      bool found = false;
      for (int dy1 = -4; dy1 <= 4 && !found; ++dy1) {
        for (int dx1 = -4; dx1 <= 4 && !found; ++dx1) {
          if (!step_ok(dx1, dy1) || !occ.at(f + 1, p.x + dx1, p.y + dy1)) continue;
          const int x1 = p.x + dx1;
          const int y1 = p.y + dy1;
          for (int ey2 = -tolerance; ey2 <= tolerance && !found; ++ey2) {
            for (int ex2 = -tolerance; ex2 <= tolerance && !found; ++ex2) {
              const int dx2 = dx1 + ex2;
              const int dy2 = dy1 + ey2;
              if (!step_ok(dx2, dy2) || !occ.at(f + 2, x1 + dx2, y1 + dy2)) continue;
              const int x2 = x1 + dx2;
              const int y2 = y1 + dy2;
              for (int ey3 = -tolerance; ey3 <= tolerance && !found; ++ey3) {
                for (int ex3 = -tolerance; ex3 <= tolerance && !found; ++ex3) {
                  const int dx3 = dx2 + ex3;
                  const int dy3 = dy2 + ey3;
                  if (step_ok(dx3, dy3) && occ.at(f + 3, x2 + dx3, y2 + dy3)) found = true;
                }
              }
            }
          }
        }
      }
      if (found) out.push_back({p.x, p.y, static_cast<int>(f)});
    }
  }
  return out;
}

std::string solve_spooky_text(const SceneDescription& scene) {
  const auto frames = raster::expand_dot_field(scene);
  const int w = scene.width;
  const int h = scene.height;
  const Occupancy occ(frames, w, h);

  // Dominant frame-to-frame displacement.
  int best_vx = 0;
  int best_vy = 0;
  long best_count = -1;
  for (int vy = -4; vy <= 4; ++vy) {
    for (int vx = -4; vx <= 4; ++vx) {
      if (vx == 0 && vy == 0) continue;
      const auto m = pair_map(frames, occ, w, h, vx, vy);
      const long count = std::accumulate(m.begin(), m.end(), 0L);
      if (count > best_count) {
        best_count = count;
        best_vx = vx;
        best_vy = vy;
      }
    }
  }
  const auto motion = pair_map(frames, occ, w, h, best_vx, best_vy);

  constexpr int kScale = 8;
  constexpr int kSpacing = 12;
  constexpr int kLitThreshold = 10;
  const int glyph_w = font::kGlyphWidth * kScale;
  const int y0 = (h - font::kGlyphHeight * kScale) / 2;

  std::string best_text;
  long best_outside = std::numeric_limits<long>::max();
  for (int length = 4; length <= 6; ++length) {
    const int x0 = (w - (length * glyph_w + (length - 1) * kSpacing)) / 2;
    std::vector<std::uint8_t> in_slot(static_cast<std::size_t>(w) * h, 0);
    std::string text;
    bool blank_slot = false;
    for (int g = 0; g < length; ++g) {
      const int gx = x0 + g * (glyph_w + kSpacing);
      font::GlyphBits bits{};
      int lit = 0;
      for (int row = 0; row < font::kGlyphHeight; ++row) {
        for (int col = 0; col < font::kGlyphWidth; ++col) {
          int sum = 0;
          for (int y = y0 + row * kScale; y < y0 + (row + 1) * kScale; ++y) {
            for (int x = gx + col * kScale; x < gx + (col + 1) * kScale; ++x) {
              sum += motion[static_cast<std::size_t>(y) * w + x];
              in_slot[static_cast<std::size_t>(y) * w + x] = 1;
            }
          }
          if (sum >= kLitThreshold) {
            bits[static_cast<std::size_t>(row)] |= static_cast<std::uint8_t>(1U << (font::kGlyphWidth - 1 - col));
            ++lit;
          }
        }
      }
      if (lit == 0) blank_slot = true;
      char best_char = '?';
      int best_distance = std::numeric_limits<int>::max();
      for (char c : kSpookyAlphabet) {
        const auto ref = *font::glyph(c);
        int distance = 0;
        for (int row = 0; row < font::kGlyphHeight; ++row) {
          distance += std::popcount(static_cast<unsigned>(ref[static_cast<std::size_t>(row)] ^ bits[static_cast<std::size_t>(row)]));
        }
        if (distance < best_distance) {
          best_distance = distance;
          best_char = c;
        }
      }
      text.push_back(best_char);
    }
    if (blank_slot) continue;
    long outside = 0;
    for (std::size_t i = 0; i < motion.size(); ++i) {
      if (!in_slot[i]) outside += motion[i];
    }
    if (outside < best_outside) {
      best_outside = outside;
      best_text = text;
    }
  }
  return best_text;
}

int solve_spooky_circles(const SceneDescription& scene) {
  const auto frames = raster::expand_dot_field(scene);
  const auto points = coherent_points(frames, scene.width, scene.height, 1);

  // Single-linkage clusters of coherent points within kLink pixels.
  constexpr int kLink = 6;
  constexpr std::size_t kMinCluster = 40;
  std::vector<std::size_t> parent(points.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::map<std::pair<int, int>, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < points.size(); ++i) buckets[{points[i].x / kLink, points[i].y / kLink}].push_back(i);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int bx = points[i].x / kLink;
    const int by = points[i].y / kLink;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        auto it = buckets.find({bx + dx, by + dy});
        if (it == buckets.end()) continue;
        for (auto j : it->second) {
          const int ddx = points[i].x - points[j].x;
          const int ddy = points[i].y - points[j].y;
          if (ddx * ddx + ddy * ddy <= kLink * kLink) parent[find(i)] = find(j);
        }
      }
    }
  }
  std::map<std::size_t, std::size_t> sizes;
  for (std::size_t i = 0; i < points.size(); ++i) ++sizes[find(i)];
  int count = 0;
  for (const auto& [root, size] : sizes) {
    if (size >= kMinCluster) ++count;
  }
  return count;
}

}  // namespace gapcha::oracle
