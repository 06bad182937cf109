#include "common.hpp"

namespace gapcha {

DieState roll(DieState d, Heading heading) {
  switch (heading) {
    case Heading::East: return {7 - d.east, d.north, d.top};
    case Heading::West: return {d.east, d.north, 7 - d.top};
    case Heading::North: return {7 - d.north, d.top, d.east};
    case Heading::South: return {d.north, 7 - d.top, d.east};
  }
  return d;
}

DieState roll_path(DieState die, const std::vector<Heading>& path) {
  for (auto h : path) die = roll(die, h);
  return die;
}

namespace gen {

namespace {

using namespace detail;

constexpr int kGrid = 5;
constexpr int kCell = 64;
constexpr int kGridX = 16;
constexpr int kGridY = 20;
constexpr double kTipReach = 0.85 * kCell;

constexpr std::array<std::array<int, 2>, 4> kSteps = {{{0, -1}, {1, 0}, {0, 1}, {-1, 0}}};  // N E S W as (dx, dy)

void draw_face(SceneBuilder& b, int x, int y, int value, const std::string& name) {
  constexpr int kFace = 40;
  b.add(RectShape{double(x), double(y), kFace, kFace}, kInk);
  b.add(RectShape{double(x + 2), double(y + 2), kFace - 4, kFace - 4}, rgb(255, 255, 255));
  static const std::array<std::vector<std::array<int, 2>>, 6> kPips = {{
      {{1, 1}},
      {{0, 0}, {2, 2}},
      {{0, 0}, {1, 1}, {2, 2}},
      {{0, 0}, {2, 0}, {0, 2}, {2, 2}},
      {{0, 0}, {2, 0}, {1, 1}, {0, 2}, {2, 2}},
      {{0, 0}, {2, 0}, {0, 1}, {2, 1}, {0, 2}, {2, 2}},
  }};
  for (const auto& [c, r] : kPips[static_cast<std::size_t>(value - 1)]) {
    b.add(CircleShape{x + 10.0 + 10.0 * c, y + 10.0 + 10.0 * r, 4}, kInk, "pip:" + name);
  }
}

void draw_label(SceneBuilder& b, int x, int y, std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    b.add(GlyphShape{x + static_cast<int>(i) * 12, y, 2, text[i]}, kInk);
  }
}

}  // namespace

GeneratedInstance dice_roll_path(Seed seed, const DifficultyParams& params) {
  const int path_len = param(params, "path_len");
  auto stream = derive_stream(seed, "dice_roll_path");

  DieState die;
  for (int i = 0; i < 12; ++i) die = roll(die, static_cast<Heading>(stream.uniform_int(0, 3)));

  int start_r = 0;
  int start_c = 0;
  std::vector<Heading> path;
  for (int attempt = 0;; ++attempt) {
    if (attempt == kMaxAttempts) retry_exceeded("self-avoiding dice path");
    start_r = static_cast<int>(stream.uniform_int(0, kGrid - 1));
    start_c = static_cast<int>(stream.uniform_int(0, kGrid - 1));
    std::array<std::array<bool, kGrid>, kGrid> seen{};
    seen[start_r][start_c] = true;
    path.clear();
    int r = start_r;
    int c = start_c;
    while (static_cast<int>(path.size()) < path_len) {
      std::vector<int> options;
      for (int h = 0; h < 4; ++h) {
        const int nc = c + kSteps[h][0];
        const int nr = r + kSteps[h][1];
        if (nr >= 0 && nr < kGrid && nc >= 0 && nc < kGrid && !seen[nr][nc]) options.push_back(h);
      }
      if (options.empty()) break;
      const int h = stream.pick(options);
      c += kSteps[h][0];
      r += kSteps[h][1];
      seen[r][c] = true;
      path.push_back(static_cast<Heading>(h));
    }
    if (static_cast<int>(path.size()) == path_len) break;
  }

  SceneBuilder b(480, 360, kPaper);
  b.add(RectShape{double(kGridX), double(kGridY), kGrid * kCell, kGrid * kCell}, kInk);
  for (int r = 0; r < kGrid; ++r) {
    for (int c = 0; c < kGrid; ++c) {
      const bool start = r == start_r && c == start_c;
      b.add(RectShape{double(kGridX + c * kCell + 1), double(kGridY + r * kCell + 1), kCell - 2, kCell - 2},
            start ? rgb(150, 220, 150) : rgb(250, 250, 250), start ? "die:start" : "");
    }
  }
  int r = start_r;
  int c = start_c;
  for (auto h : path) {
    const auto [dx, dy] = kSteps[static_cast<std::size_t>(h)];
    const Point centre{kGridX + (c + 0.5) * kCell, kGridY + (r + 0.5) * kCell};
    const Point tip{centre.x + dx * kTipReach, centre.y + dy * kTipReach};
    const Point base{tip.x - dx * 12.0, tip.y - dy * 12.0};
    b.add(segment(centre, base, 6), rgb(200, 60, 40), "arrow");
    b.add(PolygonShape{{tip, {base.x - dy * 9.0, base.y + dx * 9.0}, {base.x + dy * 9.0, base.y - dx * 9.0}}},
          rgb(200, 60, 40), "arrowhead");
    c += dx;
    r += dy;
  }

  draw_face(b, 392, 106, die.north, "north");
  draw_face(b, 392, 150, die.top, "top");
  draw_face(b, 436, 150, die.east, "east");
  draw_label(b, 407, 86, "N");
  draw_label(b, 395, 196, "TOP");
  draw_label(b, 451, 196, "E");

  auto inst = make_instance(family::kDiceRollPath, seed, params);
  inst.scene = b.release();
  inst.instruction = instruction(family::kDiceRollPath, {});
  inst.interaction_schema = NumericSchema{0, 1, 6};
  inst.truth.payload = NumericAnswer{roll_path(die, path).top};
  return inst;
}

}  // namespace gen
}  // namespace gapcha
