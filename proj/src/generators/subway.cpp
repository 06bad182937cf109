#include <algorithm>

#include "common.hpp"

namespace gapcha {

std::int64_t count_stamp_routes(int node_count, const std::vector<std::array<int, 2>>& edges, int start, int end,
                                const std::vector<int>& stamps) {
  if (node_count <= 0 || node_count > 20) throw Error(ErrorCode::InvalidParams, "node count out of range");
  const auto n = static_cast<std::size_t>(node_count);
  std::vector<std::uint32_t> adjacent(n, 0);
  for (const auto& [a, b] : edges) {
    adjacent[static_cast<std::size_t>(a)] |= 1U << b;
    adjacent[static_cast<std::size_t>(b)] |= 1U << a;
  }
  std::uint32_t required = 0;
  for (int s : stamps) required |= 1U << s;

  // ways[mask][v]: simple paths from start covering exactly `mask`, ending at v.
  const std::size_t masks = std::size_t{1} << n;
  std::vector<std::int64_t> ways(masks * n, 0);
  ways[(std::size_t{1} << start) * n + static_cast<std::size_t>(start)] = 1;
  std::int64_t total = 0;
  for (std::size_t mask = 1; mask < masks; ++mask) {
    for (std::size_t v = 0; v < n; ++v) {
      const auto w = ways[mask * n + v];
      if (w == 0) continue;
      if (static_cast<int>(v) == end) {
        if ((mask & required) == required) total += w;
        continue;
      }
      for (std::size_t u = 0; u < n; ++u) {
        if ((adjacent[v] >> u & 1U) && !(mask >> u & 1U)) ways[(mask | (std::size_t{1} << u)) * n + u] += w;
      }
    }
  }
  return total;
}

namespace gen {

namespace {

using namespace detail;

struct SubwayMap {
  std::vector<Point> nodes;
  std::vector<std::array<int, 2>> edges;
  int start = 0;
  int end = 0;
  std::vector<int> stamps;
  std::int64_t routes = 0;
};

bool connected(int n, const std::vector<std::array<int, 2>>& edges) {
  std::vector<int> parent(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  int components = n;
  for (const auto& [a, b] : edges) {
    const int ra = find(a);
    const int rb = find(b);
    if (ra != rb) {
      parent[static_cast<std::size_t>(ra)] = rb;
      --components;
    }
  }
  return components == 1;
}

SubwayMap random_map(Stream& stream, const PixelRect& cell) {
  for (;;) {
    SubwayMap map;
    const int n = static_cast<int>(stream.uniform_int(6, 9));
    std::vector<int> slots{0, 1, 2, 3, 4, 5, 6, 7, 8};
    stream.shuffle(slots);
    slots.resize(static_cast<std::size_t>(n));
    std::sort(slots.begin(), slots.end());
    std::array<int, 9> index;
    index.fill(-1);
    for (int i = 0; i < n; ++i) {
      const int slot = slots[static_cast<std::size_t>(i)];
      index[static_cast<std::size_t>(slot)] = i;
      map.nodes.push_back({cell.x + 45.0 + (slot % 3) * 70 + static_cast<double>(stream.uniform_int(-8, 8)),
                           cell.y + 40.0 + (slot / 3) * 55 + static_cast<double>(stream.uniform_int(-8, 8))});
    }
    auto link = [&](int a, int b, double p) {
      const int ia = index[static_cast<std::size_t>(a)];
      const int ib = index[static_cast<std::size_t>(b)];
      if (ia >= 0 && ib >= 0 && stream.bernoulli(p)) map.edges.push_back({std::min(ia, ib), std::max(ia, ib)});
    };
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        if (c < 2) link(r * 3 + c, r * 3 + c + 1, 0.7);
        if (r < 2) link(r * 3 + c, (r + 1) * 3 + c, 0.7);
        if (r < 2 && c < 2) {
          if (stream.bernoulli(0.5)) link(r * 3 + c, (r + 1) * 3 + c + 1, 0.3);
          else link(r * 3 + c + 1, (r + 1) * 3 + c, 0.3);
        }
      }
    }
    if (!connected(n, map.edges)) continue;
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    stream.shuffle(order);
    map.start = order[0];
    map.end = order[1];
    const int stamp_count = static_cast<int>(stream.uniform_int(1, 2));
    map.stamps.assign(order.begin() + 2, order.begin() + 2 + stamp_count);
    std::sort(map.stamps.begin(), map.stamps.end());
    map.routes = count_stamp_routes(n, map.edges, map.start, map.end, map.stamps);
    return map;
  }
}

void draw_map(SceneBuilder& b, const SubwayMap& map, const PixelRect& cell, int index) {
  b.add(RectShape{cell.x + 4.0, cell.y + 4.0, cell.width - 8.0, cell.height - 8.0}, rgb(255, 255, 255));
  const std::string prefix = "map:" + std::to_string(index) + ":";
  for (const auto& [a, c] : map.edges) {
    b.add(segment(map.nodes[static_cast<std::size_t>(a)], map.nodes[static_cast<std::size_t>(c)], 5), rgb(90, 90, 100),
          prefix + "edge:" + std::to_string(a) + ":" + std::to_string(c));
  }
  for (std::size_t j = 0; j < map.nodes.size(); ++j) {
    const auto& p = map.nodes[j];
    const int id = static_cast<int>(j);
    std::string role = "plain";
    Color fill = rgb(255, 255, 255);
    if (id == map.start) {
      role = "start";
      fill = rgb(120, 210, 120);
    } else if (id == map.end) {
      role = "end";
      fill = rgb(240, 120, 110);
    } else if (std::find(map.stamps.begin(), map.stamps.end(), id) != map.stamps.end()) {
      role = "stamp";
      fill = rgb(250, 160, 30);
    }
    b.add(CircleShape{p.x, p.y, 12}, kInk);
    b.add(CircleShape{p.x, p.y, 10}, fill, prefix + "node:" + std::to_string(j) + ":" + role);
    if (role == "start" || role == "end") {
      b.add(GlyphShape{static_cast<int>(std::lround(p.x)) - 5, static_cast<int>(std::lround(p.y)) - 7, 2,
                       role == "start" ? 'S' : 'T'},
            kInk);
    }
  }
}

}  // namespace

GeneratedInstance subway_paths(Seed seed, const DifficultyParams& params) {
  const int target = param(params, "target_count");
  constexpr int kMaps = 4;
  auto stream = derive_stream(seed, "subway_paths");
  const auto grid = uniform_grid(2, 2, 5, 5, 230, 190);

  std::vector<bool> wanted(kMaps, false);
  const int selected = static_cast<int>(stream.uniform_int(1, kMaps - 1));
  for (int i = 0; i < selected; ++i) wanted[static_cast<std::size_t>(i)] = true;
  stream.shuffle(wanted);

  SceneBuilder b(470, 390, kPanel);
  SelectionAnswer truth;
  for (int i = 0; i < kMaps; ++i) {
    const auto& cell = grid.cells[static_cast<std::size_t>(i)];
    SubwayMap map;
    for (int attempt = 0;; ++attempt) {
      if (attempt == kMaxAttempts) retry_exceeded("subway map with the wanted route count");
      map = random_map(stream, cell);
      if ((map.routes == target) == wanted[static_cast<std::size_t>(i)]) break;
    }
    draw_map(b, map, cell, i);
    if (map.routes == target) truth.cells.insert(i);
  }

  auto inst = make_instance(family::kSubwayPaths, seed, params);
  inst.scene = b.release();
  inst.scene.cells = grid;
  inst.instruction = instruction(family::kSubwayPaths, {{"target_count", std::to_string(target)}}) +
                     ". A valid route runs from S to T along the lines, never visits a station twice, and "
                     "passes through every orange station.";
  inst.interaction_schema = select_schema(grid);
  inst.truth.payload = truth;
  return inst;
}

}  // namespace gen
}  // namespace gapcha
