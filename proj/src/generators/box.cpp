#include <algorithm>
#include <deque>
#include <set>

#include "common.hpp"

namespace gapcha {

const std::vector<NetCells>& cube_nets() {
  static const std::vector<NetCells> nets = [] {
    std::vector<NetCells> out;
    for (auto [a, b] : std::vector<std::array<int, 2>>{{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 1}, {1, 2}}) {
      out.push_back({{1, 0}, {1, 1}, {1, 2}, {1, 3}, {0, a}, {2, b}});
    }
    for (int c = 1; c <= 3; ++c) out.push_back({{0, 0}, {0, 1}, {1, 1}, {1, 2}, {1, 3}, {2, c}});
    out.push_back({{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}, {2, 3}});
    out.push_back({{0, 0}, {0, 1}, {0, 2}, {1, 2}, {1, 3}, {1, 4}});
    return out;
  }();
  return nets;
}

namespace gen {

namespace {

using namespace detail;

enum Dir { kEast, kWest, kNorth, kSouth, kTop, kBottom };

/// Colour index showing in each direction.
using Cube = std::array<int, 6>;

Cube roll_cube(const Cube& c, Dir d) {
  Cube n = c;
  switch (d) {
    case kEast: n[kEast] = c[kTop]; n[kBottom] = c[kEast]; n[kWest] = c[kBottom]; n[kTop] = c[kWest]; break;
    case kWest: n[kWest] = c[kTop]; n[kBottom] = c[kWest]; n[kEast] = c[kBottom]; n[kTop] = c[kEast]; break;
    case kNorth: n[kNorth] = c[kTop]; n[kBottom] = c[kNorth]; n[kSouth] = c[kBottom]; n[kTop] = c[kSouth]; break;
    case kSouth: n[kSouth] = c[kTop]; n[kBottom] = c[kSouth]; n[kNorth] = c[kBottom]; n[kTop] = c[kNorth]; break;
    default: break;
  }
  return n;
}

using Triple = std::array<int, 3>;  // top, front (south), right (east)

std::vector<Cube> orientations(const Cube& cube) {
  std::vector<Cube> out{cube};
  std::deque<Cube> queue{cube};
  while (!queue.empty()) {
    const Cube c = queue.front();
    queue.pop_front();
    for (const Cube& n : {roll_cube(c, kEast), roll_cube(c, kNorth)}) {
      if (std::find(out.begin(), out.end(), n) == out.end()) {
        out.push_back(n);
        queue.push_back(n);
      }
    }
  }
  return out;
}

std::set<Triple> visible_triples(const Cube& cube) {
  std::set<Triple> out;
  for (const auto& c : orientations(cube)) out.insert({c[kTop], c[kSouth], c[kEast]});
  return out;
}

/// Folds a net (cell colours given per cell) with its printed side outwards and
/// the first cell on top.
Cube fold(const NetCells& cells, const std::vector<int>& colors) {
  Cube identity{kEast, kWest, kNorth, kSouth, kTop, kBottom};
  std::array<int, 6> painted;
  painted.fill(-1);
  std::vector<Cube> state(cells.size());
  std::vector<bool> done(cells.size(), false);
  state[0] = identity;
  done[0] = true;
  painted[static_cast<std::size_t>(identity[kBottom])] = colors[0];
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    const auto i = queue.front();
    queue.pop_front();
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (done[j]) continue;
      const int dr = cells[j][0] - cells[i][0];
      const int dc = cells[j][1] - cells[i][1];
      Dir d;
      if (dr == 0 && dc == 1) d = kEast;
      else if (dr == 0 && dc == -1) d = kWest;
      else if (dr == -1 && dc == 0) d = kNorth;
      else if (dr == 1 && dc == 0) d = kSouth;
      else continue;
      state[j] = roll_cube(state[i], d);
      done[j] = true;
      auto& slot = painted[static_cast<std::size_t>(state[j][kBottom])];
      if (slot != -1) throw Error(ErrorCode::InvalidParams, "hexomino is not a cube net");
      slot = colors[j];
      queue.push_back(j);
    }
  }
  Cube colored;
  for (int d = 0; d < 6; ++d) colored[static_cast<std::size_t>(d)] = painted[static_cast<std::size_t>(d)];
  std::swap(colored[kTop], colored[kBottom]);
  return colored;
}

NetCells transform(NetCells cells, int rotations, bool mirror) {
  for (auto& [r, c] : cells) {
    if (mirror) c = -c;
    for (int k = 0; k < rotations; ++k) {
      const int nr = c;
      const int nc = -r;
      r = nr;
      c = nc;
    }
  }
  int min_r = 1 << 20;
  int min_c = 1 << 20;
  for (const auto& [r, c] : cells) {
    min_r = std::min(min_r, r);
    min_c = std::min(min_c, c);
  }
  for (auto& [r, c] : cells) {
    r -= min_r;
    c -= min_c;
  }
  return cells;
}

void draw_view(SceneBuilder& b, const PixelRect& cell, const Triple& t, const std::vector<Color>& colors, int index) {
  b.add(RectShape{cell.x + 4.0, cell.y + 4.0, cell.width - 8.0, cell.height - 8.0}, rgb(255, 255, 255));
  const double cx = cell.x + cell.width / 2.0;
  const double cy = cell.y + cell.height / 2.0 + 4;
  const double s = 45;
  const double h = s * 0.8660254037844386;
  const std::string prefix = "view:" + std::to_string(index) + ":";
  b.add(PolygonShape{{{cx, cy - s}, {cx + h, cy - s / 2}, {cx, cy}, {cx - h, cy - s / 2}}},
        colors[static_cast<std::size_t>(t[0])], prefix + "top");
  b.add(PolygonShape{{{cx - h, cy - s / 2}, {cx, cy}, {cx, cy + s}, {cx - h, cy + s / 2}}},
        colors[static_cast<std::size_t>(t[1])], prefix + "front");
  b.add(PolygonShape{{{cx, cy}, {cx + h, cy - s / 2}, {cx + h, cy + s / 2}, {cx, cy + s}}},
        colors[static_cast<std::size_t>(t[2])], prefix + "right");
}

}  // namespace

GeneratedInstance box_folding(Seed seed, const DifficultyParams& params) {
  const int correct_count = param(params, "correct_count");
  constexpr int kCandidates = 4;
  auto stream = derive_stream(seed, "box_folding");

  const auto& nets = cube_nets();
  const NetCells net = transform(nets[static_cast<std::size_t>(stream.uniform_int(0, 10))],
                                 static_cast<int>(stream.uniform_int(0, 3)), stream.bernoulli(0.5));
  std::vector<Color> colors(palette().begin(), palette().end());
  stream.shuffle(colors);
  colors.resize(6);
  std::vector<int> cell_color{0, 1, 2, 3, 4, 5};
  stream.shuffle(cell_color);

  const Cube cube = fold(net, cell_color);
  const auto consistent = visible_triples(cube);
  const std::vector<Triple> pool(consistent.begin(), consistent.end());

  std::vector<Triple> candidates;
  auto fresh = [&](const Triple& t) { return std::find(candidates.begin(), candidates.end(), t) == candidates.end(); };
  while (static_cast<int>(candidates.size()) < correct_count) {
    const auto& t = stream.pick(pool);
    if (fresh(t)) candidates.push_back(t);
  }
  for (int attempt = 0; static_cast<int>(candidates.size()) < kCandidates; ++attempt) {
    if (attempt == kMaxAttempts) retry_exceeded("box folding distractors");
    Triple t;
    if (stream.bernoulli(0.5)) {
      const auto& base = stream.pick(pool);
      t = {base[0], base[2], base[1]};
    } else {
      Cube swapped = cube;
      const auto a = static_cast<std::size_t>(stream.uniform_int(0, 5));
      const auto c = static_cast<std::size_t>(stream.uniform_int(0, 5));
      std::swap(swapped[a], swapped[c]);
      const auto views = orientations(swapped);
      const auto& o = stream.pick(views);
      t = {o[kTop], o[kSouth], o[kEast]};
    }
    if (!consistent.contains(t) && fresh(t)) candidates.push_back(t);
  }
  stream.shuffle(candidates);

  constexpr int kNetCell = 40;
  int rows = 0;
  int cols = 0;
  for (const auto& [r, c] : net) {
    rows = std::max(rows, r + 1);
    cols = std::max(cols, c + 1);
  }
  const int net_x = 10 + (220 - cols * kNetCell) / 2;
  const int net_y = 40 + (240 - rows * kNetCell) / 2;

  SceneBuilder b(620, 320, kPanel);
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto [r, c] = net[i];
    const double x = net_x + c * kNetCell;
    const double y = net_y + r * kNetCell;
    b.add(RectShape{x, y, kNetCell, kNetCell}, kInk);
    b.add(RectShape{x + 2, y + 2, kNetCell - 4, kNetCell - 4}, colors[static_cast<std::size_t>(cell_color[i])],
          "net:" + std::to_string(r) + ":" + std::to_string(c));
  }
  const auto grid = uniform_grid(2, 2, 250, 5, 180, 155);
  SelectionAnswer truth;
  for (int i = 0; i < kCandidates; ++i) {
    draw_view(b, grid.cells[static_cast<std::size_t>(i)], candidates[static_cast<std::size_t>(i)], colors, i);
    if (consistent.contains(candidates[static_cast<std::size_t>(i)])) truth.cells.insert(i);
  }

  auto inst = make_instance(family::kBoxFolding, seed, params);
  inst.scene = b.release();
  inst.scene.cells = grid;
  inst.instruction = instruction(family::kBoxFolding, {});
  inst.interaction_schema = select_schema(grid);
  inst.truth.payload = truth;
  return inst;
}

}  // namespace gen
}  // namespace gapcha
