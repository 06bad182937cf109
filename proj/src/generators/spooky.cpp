#include <algorithm>

#include "common.hpp"
#include "gapcha/font.hpp"

namespace gapcha::gen {

namespace {

using namespace detail;

constexpr int kGlyphScale = 8;
constexpr int kGlyphSpacing = 12;

const Color kNight = rgb(18, 18, 24);
const Color kDot = rgb(235, 235, 225);

struct FieldParams {
  int dot_count;
  int frames;
  int frame_ms;
  int drift_px;
};

FieldParams field_params(const DifficultyParams& params) {
  FieldParams f{param(params, "dot_count"), param(params, "frames"), param(params, "frame_ms"), param(params, "drift_px")};
  if (f.frames < 2) throw Error(ErrorCode::InvalidParams, "motion needs at least two frames");
  return f;
}

Animation dot_animation(const FieldParams& f, std::vector<DotRegion> regions, std::uint64_t noise_key) {
  DotField field;
  field.dot_count = f.dot_count;
  field.dot_radius = 1.0;
  field.dot_color = kDot;
  field.regions = std::move(regions);
  field.background = BackgroundMotion::Rerandomize;
  field.noise_key = noise_key;
  return Animation{f.frames, f.frame_ms, std::move(field)};
}

}  // namespace

GeneratedInstance spooky_text(Seed seed, const DifficultyParams& params) {
  const int length = param(params, "length");
  const auto field = field_params(params);
  auto stream = derive_stream(seed, "spooky_text");

  std::string text;
  for (int i = 0; i < length; ++i) {
    text.push_back(kSpookyAlphabet[static_cast<std::size_t>(stream.uniform_int(0, kSpookyAlphabet.size() - 1))]);
  }

  constexpr int kWidth = 360;
  constexpr int kHeight = 120;
  const int glyph_w = font::kGlyphWidth * kGlyphScale;
  const int total = length * glyph_w + (length - 1) * kGlyphSpacing;
  const int x0 = (kWidth - total) / 2;
  const int y0 = (kHeight - font::kGlyphHeight * kGlyphScale) / 2;
  GlyphMask mask{{}, field.drift_px};
  for (int i = 0; i < length; ++i) {
    mask.glyphs.push_back(GlyphShape{x0 + i * (glyph_w + kGlyphSpacing), y0, kGlyphScale, text[static_cast<std::size_t>(i)]});
  }

  auto inst = make_instance(family::kSpookyText, seed, params);
  inst.scene = SceneBuilder(kWidth, kHeight, kNight).release();
  inst.scene.animation = dot_animation(field, {mask}, stream.next_u64());
  inst.instruction = instruction(family::kSpookyText, {});
  inst.interaction_schema = TextSchema{0, 4, 6};
  inst.truth.payload = TextAnswer{text};
  return inst;
}

GeneratedInstance spooky_circle(Seed seed, const DifficultyParams& params) {
  const int count = param(params, "circle_count");
  const auto field = field_params(params);
  auto stream = derive_stream(seed, "spooky_circle");

  constexpr int kWidth = 400;
  constexpr int kHeight = 300;
  constexpr int kMinGap = 28;
  std::vector<AnnulusMask> rings;
  for (int attempt = 0; static_cast<int>(rings.size()) < count; ++attempt) {
    if (attempt == kMaxAttempts) retry_exceeded("disjoint circle placement");
    rings.clear();
    for (int tries = 0; tries < 200 && static_cast<int>(rings.size()) < count; ++tries) {
      const int outer = static_cast<int>(stream.uniform_int(26, 44));
      const int width = static_cast<int>(stream.uniform_int(16, 22));
      AnnulusMask ring{static_cast<int>(stream.uniform_int(outer + 4, kWidth - outer - 4)),
                       static_cast<int>(stream.uniform_int(outer + 4, kHeight - outer - 4)),
                       outer - width,
                       outer,
                       field.drift_px,
                       stream.bernoulli(0.5) ? 1 : -1};
      const bool apart = std::all_of(rings.begin(), rings.end(), [&](const AnnulusMask& o) {
        return std::hypot(o.cx - ring.cx, o.cy - ring.cy) >= o.outer_radius + ring.outer_radius + kMinGap;
      });
      if (apart) rings.push_back(ring);
    }
  }

  auto inst = make_instance(family::kSpookyCircle, seed, params);
  inst.scene = SceneBuilder(kWidth, kHeight, kNight).release();
  inst.scene.animation = dot_animation(field, std::vector<DotRegion>(rings.begin(), rings.end()), stream.next_u64());
  inst.instruction = instruction(family::kSpookyCircle, {});
  inst.interaction_schema = NumericSchema{0, 0, 9};
  inst.truth.payload = NumericAnswer{count};
  return inst;
}

}  // namespace gapcha::gen
