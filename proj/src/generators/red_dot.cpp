#include <algorithm>

#include "common.hpp"

namespace gapcha::gen {

namespace {

using namespace detail;

constexpr int kWidth = 400;
constexpr int kHeight = 300;
constexpr std::int64_t kSessionMs = 12000;
constexpr int kFrameMs = 100;
constexpr std::int64_t kFirstAppearMs = 500;
constexpr std::int64_t kMinGapMs = 200;
constexpr std::int64_t kMinVisibleMs = 1200;
constexpr std::int64_t kMaxVisibleMs = 2000;

}  // namespace

GeneratedInstance red_dot(Seed seed, const DifficultyParams& params) {
  const int quota = param(params, "quota");
  const int n = quota + 2;
  auto stream = derive_stream(seed, "red_dot");

  // Every dot gets the minimum window and gap; the slack is handed out in 100 ms steps.
  std::int64_t slack = kSessionMs - kFirstAppearMs - n * kMinVisibleMs - (n - 1) * kMinGapMs;
  std::vector<std::int64_t> visible(static_cast<std::size_t>(n), kMinVisibleMs);
  std::vector<std::int64_t> gaps(static_cast<std::size_t>(n), kMinGapMs);
  for (auto& v : visible) {
    const std::int64_t extra = std::min<std::int64_t>(slack, stream.uniform_int(0, 8) * 100);
    v += extra;
    slack -= extra;
  }
  for (auto& g : gaps) {
    const std::int64_t extra = std::min<std::int64_t>(slack, stream.uniform_int(0, 4) * 100);
    g += extra;
    slack -= extra;
  }

  ClickSchedule schedule;
  schedule.quota = quota;
  std::int64_t t = kFirstAppearMs;
  for (int i = 0; i < n; ++i) {
    const double radius = static_cast<double>(stream.uniform_int(18, 28));
    DotEvent dot;
    for (int attempt = 0;; ++attempt) {
      if (attempt == kMaxAttempts) retry_exceeded("red dot placement");
      dot = DotEvent{static_cast<double>(stream.uniform_int(static_cast<int>(radius) + 2, kWidth - static_cast<int>(radius) - 2)),
                     static_cast<double>(stream.uniform_int(static_cast<int>(radius) + 2, kHeight - static_cast<int>(radius) - 2)),
                     radius, t, t + visible[static_cast<std::size_t>(i)]};
      if (schedule.dots.empty()) break;
      const auto& prev = schedule.dots.back();
      if (std::hypot(prev.x - dot.x, prev.y - dot.y) >= 60) break;
    }
    schedule.dots.push_back(dot);
    t = dot.disappear_ms + gaps[static_cast<std::size_t>(i)];
  }

  SceneBuilder b(kWidth, kHeight, kPaper);
  const int decoys = static_cast<int>(stream.uniform_int(3, 6));
  for (int i = 0; i < decoys; ++i) {
    const double r = static_cast<double>(stream.uniform_int(10, 22));
    b.add(CircleShape{stream.uniform_real(r, kWidth - r), stream.uniform_real(r, kHeight - r), r},
          rgb(205, 200, 215), "decoy");
  }

  auto inst = make_instance(family::kRedDot, seed, params);
  inst.scene = b.release();
  inst.scene.animation = Animation{static_cast<int>(kSessionMs / kFrameMs), kFrameMs,
                                   TimedDots{schedule.dots, rgb(230, 30, 30)}};
  inst.instruction = instruction(family::kRedDot, {{"quota", std::to_string(quota)}});
  inst.interaction_schema = ClickSchema{0, kWidth, kHeight, kSessionMs, quota, 3};
  inst.truth.payload = schedule;
  return inst;
}

}  // namespace gapcha::gen
