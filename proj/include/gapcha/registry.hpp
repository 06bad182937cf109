#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gapcha/types.hpp"

namespace gapcha {

struct FamilyDescriptor {
  std::string family_id;
  std::string display_name;
  AnswerType answer_type = AnswerType::Select;
  std::set<GapCategory> gaps;
  bool generative = true;
  std::string default_instruction_template;
};

namespace family {
inline constexpr std::string_view kDiceRollPath = "dice_roll_path";
inline constexpr std::string_view kHoleCounting = "hole_counting";
inline constexpr std::string_view kBoxFolding = "box_folding";
inline constexpr std::string_view kColorCounting = "color_counting";
inline constexpr std::string_view kLayeredStack = "layered_stack";
inline constexpr std::string_view kSubwayPaths = "subway_paths";
inline constexpr std::string_view kRedDot = "red_dot";
inline constexpr std::string_view kStaticJigsaw = "static_jigsaw";
inline constexpr std::string_view kSpookyText = "spooky_text";
inline constexpr std::string_view kSpookyCircle = "spooky_circle";
}  // namespace family

/// Every implemented family, in a fixed order.
const std::vector<FamilyDescriptor>& registered_families();

/// Throws UnknownFamily for unregistered ids.
const FamilyDescriptor& registry_lookup(std::string_view family_id);

bool is_registered(std::string_view family_id);

}  // namespace gapcha
