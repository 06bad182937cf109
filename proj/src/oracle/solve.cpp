#include <cmath>
#include <regex>

#include "gapcha/oracle.hpp"
#include "gapcha/registry.hpp"

namespace gapcha::oracle {

namespace {

std::string capture(const std::string& text, const std::string& pattern) {
  std::smatch m;
  if (!std::regex_search(text, m, std::regex(pattern))) {
    throw Error(ErrorCode::InvalidParams, "instruction does not match '" + pattern + "'");
  }
  return m[1].str();
}

int capture_int(const std::string& text, const std::string& pattern) { return std::stoi(capture(text, pattern)); }

}  // namespace

GroundTruth solve(std::string_view family_id, const std::string& instruction, const SceneDescription& scene) {
  GroundTruth out;
  if (family_id == family::kDiceRollPath) {
    out.payload = NumericAnswer{solve_dice(scene)};
  } else if (family_id == family::kHoleCounting) {
    const auto image = raster::render_static(scene);
    out.payload = NumericAnswer{count_holes(image, image.at(0, 0))};
  } else if (family_id == family::kBoxFolding) {
    out.payload = SelectionAnswer{solve_box(scene)};
  } else if (family_id == family::kColorCounting) {
    out.payload = SelectionAnswer{solve_colors(scene, capture_int(instruction, R"(exactly (\d+) distinct)"))};
  } else if (family_id == family::kLayeredStack) {
    out.payload = SelectionAnswer{solve_stack(scene, capture(instruction, R"(top shape is a (\w+))"),
                                              capture_int(instruction, R"(at least (\d+) shapes)"))};
  } else if (family_id == family::kSubwayPaths) {
    out.payload = SelectionAnswer{solve_subway(scene, capture_int(instruction, R"(exactly (\d+) valid routes)"))};
  } else if (family_id == family::kRedDot) {
    out.payload = solve_red_dots(scene, capture_int(instruction, R"(Hit (\d+) dots)"));
  } else if (family_id == family::kStaticJigsaw) {
    out.payload = solve_jigsaw(scene);
  } else if (family_id == family::kSpookyText) {
    out.payload = TextAnswer{solve_spooky_text(scene)};
  } else if (family_id == family::kSpookyCircle) {
    out.payload = NumericAnswer{solve_spooky_circles(scene)};
  } else {
    throw Error(ErrorCode::UnknownFamily, "no oracle for '" + std::string(family_id) + "'");
  }
  return out;
}

bool agrees(const GroundTruth& truth, const GroundTruth& solved) {
  const auto* a = std::get_if<ClickSchedule>(&truth.payload);
  const auto* b = std::get_if<ClickSchedule>(&solved.payload);
  if (!a || !b) return truth == solved;
  if (a->quota != b->quota || a->dots.size() != b->dots.size()) return false;
  for (std::size_t i = 0; i < a->dots.size(); ++i) {
    const auto& x = a->dots[i];
    const auto& y = b->dots[i];
    if (std::abs(x.x - y.x) > 1 || std::abs(x.y - y.y) > 1 || std::abs(x.radius - y.radius) > 1.5 ||
        x.appear_ms != y.appear_ms || x.disappear_ms != y.disappear_ms) {
      return false;
    }
  }
  return true;
}

}  // namespace gapcha::oracle
