#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "gapcha/oracle.hpp"

namespace gapcha::oracle {

namespace {

using Vec = std::array<int, 3>;
using Mat = std::array<Vec, 3>;  // rows

Vec rotate(const Mat& m, const Vec& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2], m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
          m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

Mat multiply(const Mat& a, const Mat& b) {
  Mat out{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) out[i][j] += a[i][k] * b[k][j];
    }
  }
  return out;
}

int determinant(const Mat& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// Quarter turns; x east, y north, z up.
// Rolling east carries the top face to the east: (x, y, z) -> (z, y, -x).
constexpr Mat kRollEast{{{0, 0, 1}, {0, 1, 0}, {-1, 0, 0}}};
constexpr Mat kRollWest{{{0, 0, -1}, {0, 1, 0}, {1, 0, 0}}};
constexpr Mat kRollNorth{{{1, 0, 0}, {0, 0, 1}, {0, -1, 0}}};
constexpr Mat kRollSouth{{{1, 0, 0}, {0, 0, -1}, {0, 1, 0}}};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

Point centre_of(const Shape& shape) {
  const auto b = raster::bounds(shape);
  return {(b.min_x + b.max_x) / 2, (b.min_y + b.max_y) / 2};
}

int cell_at(const SceneDescription& scene, Point p) {
  if (!scene.cells) throw Error(ErrorCode::InvalidParams, "scene has no cell grid");
  for (std::size_t i = 0; i < scene.cells->cells.size(); ++i) {
    if (scene.cells->cells[i].contains(p.x, p.y)) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

int solve_dice(const SceneDescription& scene) {
  std::map<std::string, int> pips;
  const RectShape* start = nullptr;
  std::vector<const PolygonShape*> heads;
  for (const auto& layer : scene.layers) {
    if (layer.region.starts_with("pip:")) ++pips[layer.region.substr(4)];
    if (layer.region == "die:start") start = &std::get<RectShape>(layer.shape);
    if (layer.region == "arrowhead") heads.push_back(&std::get<PolygonShape>(layer.shape));
  }
  if (!start) throw Error(ErrorCode::InvalidParams, "no start cell");
  const double pitch = start->width + 2;

  // Face value -> outward direction.
  std::map<int, Vec> faces;
  faces[pips["top"]] = {0, 0, 1};
  faces[7 - pips["top"]] = {0, 0, -1};
  faces[pips["north"]] = {0, 1, 0};
  faces[7 - pips["north"]] = {0, -1, 0};
  faces[pips["east"]] = {1, 0, 0};
  faces[7 - pips["east"]] = {-1, 0, 0};
  if (faces.size() != 6) throw Error(ErrorCode::InvalidParams, "legend faces are not a die");

  struct Arrow {
    Point tip;
    int dx;
    int dy;
  };
  std::vector<Arrow> arrows;
  for (const auto* head : heads) {
    const auto& v = head->vertices;
    // The tip is the vertex opposite the longest edge.
    std::size_t tip = 0;
    double longest = -1;
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& a = v[(i + 1) % 3];
      const auto& b = v[(i + 2) % 3];
      const double len = std::hypot(a.x - b.x, a.y - b.y);
      if (len > longest) {
        longest = len;
        tip = i;
      }
    }
    const auto& a = v[(tip + 1) % 3];
    const auto& b = v[(tip + 2) % 3];
    const double ux = v[tip].x - (a.x + b.x) / 2;
    const double uy = v[tip].y - (a.y + b.y) / 2;
    Arrow arrow{v[tip], 0, 0};
    if (std::abs(ux) > std::abs(uy)) arrow.dx = ux > 0 ? 1 : -1;
    else arrow.dy = uy > 0 ? 1 : -1;
    arrows.push_back(arrow);
  }

  Point at{start->x + start->width / 2, start->y + start->height / 2};
  std::vector<bool> used(arrows.size(), false);
  for (std::size_t step = 0; step < arrows.size(); ++step) {
    bool moved = false;
    for (std::size_t i = 0; i < arrows.size(); ++i) {
      if (used[i]) continue;
      const double sx = arrows[i].tip.x - 40 * arrows[i].dx;
      const double sy = arrows[i].tip.y - 40 * arrows[i].dy;
      if (std::abs(sx - at.x) >= pitch / 2 || std::abs(sy - at.y) >= pitch / 2) continue;
      used[i] = true;
      moved = true;
      const Mat* m = nullptr;
      if (arrows[i].dx == 1) m = &kRollEast;
      if (arrows[i].dx == -1) m = &kRollWest;
      if (arrows[i].dy == -1) m = &kRollNorth;
      if (arrows[i].dy == 1) m = &kRollSouth;
      for (auto& [value, dir] : faces) dir = rotate(*m, dir);
      at.x += pitch * arrows[i].dx;
      at.y += pitch * arrows[i].dy;
      break;
    }
    if (!moved) throw Error(ErrorCode::InvalidParams, "arrows do not form a path from the start cell");
  }
  for (const auto& [value, dir] : faces) {
    if (dir == Vec{0, 0, 1}) return value;
  }
  throw Error(ErrorCode::InvalidParams, "no face on top");
}

std::set<std::array<int, 3>> folded_views(const std::vector<std::array<int, 3>>& net) {
  // Folding away from the viewer: a neighbour to the east turns its face
  // normal from +z to +x, one to the north from +z to +y.
  constexpr Mat kFoldEast{{{0, 0, 1}, {0, 1, 0}, {-1, 0, 0}}};
  constexpr Mat kFoldWest{{{0, 0, -1}, {0, 1, 0}, {1, 0, 0}}};
  constexpr Mat kFoldNorth{{{1, 0, 0}, {0, 0, 1}, {0, -1, 0}}};
  constexpr Mat kFoldSouth{{{1, 0, 0}, {0, 0, -1}, {0, 1, 0}}};
  constexpr Mat kIdentity{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

  std::vector<Mat> frame(net.size());
  std::vector<bool> seen(net.size(), false);
  std::map<Vec, int> color_of;
  std::function<void(std::size_t)> visit = [&](std::size_t i) {
    seen[i] = true;
    color_of[rotate(frame[i], {0, 0, 1})] = net[i][2];
    for (std::size_t j = 0; j < net.size(); ++j) {
      if (seen[j]) continue;
      const int dr = net[j][0] - net[i][0];
      const int dc = net[j][1] - net[i][1];
      const Mat* fold = nullptr;
      if (dr == 0 && dc == 1) fold = &kFoldEast;
      if (dr == 0 && dc == -1) fold = &kFoldWest;
      if (dr == -1 && dc == 0) fold = &kFoldNorth;
      if (dr == 1 && dc == 0) fold = &kFoldSouth;
      if (!fold) continue;
      frame[j] = multiply(frame[i], *fold);
      visit(j);
    }
  };
  frame[0] = kIdentity;
  visit(0);
  if (color_of.size() != 6) throw Error(ErrorCode::InvalidParams, "net does not fold into a cube");

  std::set<std::array<int, 3>> views;
  std::array<int, 3> perm{0, 1, 2};
  do {
    for (int signs = 0; signs < 8; ++signs) {
      Mat r{};
      for (int i = 0; i < 3; ++i) r[i][perm[i]] = (signs >> i & 1) ? -1 : 1;
      if (determinant(r) != 1) continue;
      // Colour that ends up facing direction d came from r^T d.
      auto source = [&](const Vec& d) {
        Vec s{};
        for (int i = 0; i < 3; ++i) {
          for (int k = 0; k < 3; ++k) s[i] += r[k][i] * d[k];
        }
        return color_of.at(s);
      };
      views.insert({source({0, 0, 1}), source({0, -1, 0}), source({1, 0, 0})});
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return views;
}

std::set<int> solve_box(const SceneDescription& scene) {
  std::vector<std::array<int, 3>> net;
  std::map<Color, int> ids;
  auto id_of = [&](Color c) { return ids.emplace(c, static_cast<int>(ids.size())).first->second; };
  std::map<int, std::array<int, 3>> views;
  for (const auto& layer : scene.layers) {
    const auto parts = split(layer.region, ':');
    if (parts[0] == "net") net.push_back({std::stoi(parts[1]), std::stoi(parts[2]), id_of(layer.color)});
    if (parts[0] == "view") {
      const int face = parts[2] == "top" ? 0 : parts[2] == "front" ? 1 : 2;
      views[std::stoi(parts[1])][static_cast<std::size_t>(face)] = id_of(layer.color);
    }
  }
  const auto consistent = folded_views(net);
  std::set<int> out;
  for (const auto& [index, triple] : views) {
    if (consistent.contains(triple)) out.insert(index);
  }
  return out;
}

std::set<int> solve_stack(const SceneDescription& scene, std::string_view shape, int beneath) {
  std::map<int, std::vector<const Layer*>> stacks;
  for (const auto& layer : scene.layers) {
    if (!layer.region.ends_with(":stack")) continue;
    stacks[cell_at(scene, centre_of(layer.shape))].push_back(&layer);
  }
  auto kind = [](const Shape& s) -> std::string {
    if (std::holds_alternative<CircleShape>(s)) return "circle";
    if (std::holds_alternative<RectShape>(s)) return "square";
    const auto& p = std::get<PolygonShape>(s);
    return p.vertices.size() == 3 ? "triangle" : p.vertices.size() == 4 ? "diamond" : "polygon";
  };
  std::set<int> out;
  for (auto& [cell, stack] : stacks) {
    std::sort(stack.begin(), stack.end(), [](const Layer* a, const Layer* b) { return a->z < b->z; });
    if (kind(stack.back()->shape) == shape && static_cast<int>(stack.size()) - 1 >= beneath) out.insert(cell);
  }
  return out;
}

std::set<int> solve_subway(const SceneDescription& scene, int target) {
  struct Map {
    std::map<int, std::set<int>> adjacent;
    int start = -1;
    int end = -1;
    std::set<int> stamps;
  };
  std::map<int, Map> maps;
  for (const auto& layer : scene.layers) {
    const auto parts = split(layer.region, ':');
    if (parts[0] != "map") continue;
    auto& m = maps[std::stoi(parts[1])];
    if (parts[2] == "edge") {
      const int a = std::stoi(parts[3]);
      const int b = std::stoi(parts[4]);
      m.adjacent[a].insert(b);
      m.adjacent[b].insert(a);
    } else if (parts[2] == "node") {
      const int id = std::stoi(parts[3]);
      if (parts[4] == "start") m.start = id;
      if (parts[4] == "end") m.end = id;
      if (parts[4] == "stamp") m.stamps.insert(id);
    }
  }
  std::set<int> out;
  for (const auto& [index, m] : maps) {
    int routes = 0;
    std::vector<int> path{m.start};
    std::function<void(int)> dfs = [&](int node) {
      if (node == m.end) {
        const bool stamped = std::all_of(m.stamps.begin(), m.stamps.end(), [&](int s) {
          return std::find(path.begin(), path.end(), s) != path.end();
        });
        if (stamped) ++routes;
        return;
      }
      auto it = m.adjacent.find(node);
      if (it == m.adjacent.end()) return;
      for (int next : it->second) {
        if (std::find(path.begin(), path.end(), next) != path.end()) continue;
        path.push_back(next);
        dfs(next);
        path.pop_back();
      }
    };
    dfs(m.start);
    if (routes == target) out.insert(index);
  }
  return out;
}

}  // namespace gapcha::oracle
