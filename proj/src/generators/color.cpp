#include <algorithm>

#include "common.hpp"

namespace gapcha::gen {

namespace {

using namespace detail;

struct Blob {
  double x;
  double y;
  double r;
};

}  // namespace

GeneratedInstance color_counting(Seed seed, const DifficultyParams& params) {
  const int k = param(params, "target_color_count");
  constexpr int kRows = 3;
  constexpr int kCols = 3;
  constexpr int kCell = 120;
  auto stream = derive_stream(seed, "color_counting");
  const auto grid = uniform_grid(kRows, kCols, 20, 20, kCell, kCell);

  std::vector<int> distinct(kRows * kCols);
  for (int attempt = 0;; ++attempt) {
    if (attempt == kMaxAttempts) retry_exceeded("mixed color board");
    for (auto& d : distinct) d = stream.bernoulli(0.35) ? k : static_cast<int>(stream.uniform_int(1, 5));
    const auto hits = std::count(distinct.begin(), distinct.end(), k);
    if (hits > 0 && hits < static_cast<long>(distinct.size())) break;
  }

  SceneBuilder b(400, 400, kPaper);
  SelectionAnswer truth;
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    const auto& cell = grid.cells[i];
    b.add(RectShape{cell.x + 2.0, cell.y + 2.0, cell.width - 4.0, cell.height - 4.0}, kPanel);
    const int want = distinct[i];
    const int blob_count = static_cast<int>(stream.uniform_int(std::max(3, want), 7));

    std::vector<Color> chosen(palette().begin(), palette().end());
    stream.shuffle(chosen);
    chosen.resize(static_cast<std::size_t>(want));
    std::vector<Color> fills(chosen);
    while (static_cast<int>(fills.size()) < blob_count) fills.push_back(stream.pick(chosen));
    stream.shuffle(fills);

    std::vector<Blob> blobs;
    for (int attempt = 0;; ++attempt) {
      if (attempt == kMaxAttempts) retry_exceeded("blob placement");
      blobs.clear();
      for (int j = 0; j < blob_count; ++j) {
        for (int tries = 0; tries < 200; ++tries) {
          const double r = static_cast<double>(stream.uniform_int(9, 15));
          const Blob blob{cell.x + 8 + r + stream.uniform01() * (cell.width - 16 - 2 * r),
                          cell.y + 8 + r + stream.uniform01() * (cell.height - 16 - 2 * r), r};
          const bool apart = std::all_of(blobs.begin(), blobs.end(), [&](const Blob& o) {
            return std::hypot(o.x - blob.x, o.y - blob.y) >= o.r + blob.r + 4;
          });
          if (apart) {
            blobs.push_back(blob);
            break;
          }
        }
      }
      if (static_cast<int>(blobs.size()) == blob_count) break;
    }
    for (std::size_t j = 0; j < blobs.size(); ++j) {
      const auto& blob = blobs[j];
      const std::string region = "cell:" + std::to_string(i) + ":blob";
      if (stream.bernoulli(0.5)) {
        b.add(CircleShape{blob.x, blob.y, blob.r}, fills[j], region);
      } else {
        b.add(regular_polygon(blob.x, blob.y, blob.r, blob.r, static_cast<int>(stream.uniform_int(3, 6)),
                              stream.uniform_real(0, 1)),
              fills[j], region);
      }
    }
    if (want == k) truth.cells.insert(static_cast<int>(i));
  }

  auto inst = make_instance(family::kColorCounting, seed, params);
  inst.scene = b.release();
  inst.scene.cells = grid;
  inst.instruction = instruction(family::kColorCounting, {{"k", std::to_string(k)}});
  inst.interaction_schema = select_schema(grid);
  inst.truth.payload = truth;
  return inst;
}

}  // namespace gapcha::gen
