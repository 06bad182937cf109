#include "gapcha/registry.hpp"

#include <algorithm>

namespace gapcha {

namespace {

using G = GapCategory;

std::vector<FamilyDescriptor> build_registry() {
  return {
      {std::string(family::kDiceRollPath), "Dice Roll Path", AnswerType::Numeric,
       {G::Numerosity, G::LatentState, G::PerceptionToAction}, true,
       "Roll the die along the arrows, one cell per arrow. Which number is on top at the end?"},
      {std::string(family::kHoleCounting), "Hole Counting", AnswerType::Numeric,
       {G::SceneStructure, G::Numerosity}, true, "How many holes go all the way through the shape?"},
      {std::string(family::kBoxFolding), "Box Folding", AnswerType::Select,
       {G::SceneStructure, G::LatentState}, true,
       "Select every cube that can be folded from the net on the left."},
      {std::string(family::kColorCounting), "Color Counting", AnswerType::Select, {G::Numerosity},
       true, "Select all cells containing exactly {k} distinct colors"},
      {std::string(family::kLayeredStack), "Layered Stack", AnswerType::Select,
       {G::SceneStructure, G::Numerosity}, true,
       "Select cells where the top shape is a {shape} and at least {m} shapes lie beneath it"},
      {std::string(family::kSubwayPaths), "Subway Paths", AnswerType::Select,
       {G::Numerosity, G::LatentState}, true,
       "Select every map that has exactly {target_count} valid routes"},
      {std::string(family::kRedDot), "Red Dot", AnswerType::ClickSequence,
       {G::PerceptionToAction}, true, "Click each red dot while it is visible. Hit {quota} dots to pass."},
      {std::string(family::kStaticJigsaw), "Static Jigsaw", AnswerType::Placement,
       {G::LatentState, G::PerceptionToAction}, true,
       "Drag every piece onto the board to complete the picture."},
      {std::string(family::kSpookyText), "Spooky Text", AnswerType::TextEntry,
       {G::TemporalIntegration}, true, "Type the characters formed by the moving dots."},
      {std::string(family::kSpookyCircle), "Spooky Circle", AnswerType::Numeric,
       {G::TemporalIntegration}, true, "How many circles are formed by the moving dots?"},
  };
}

}  // namespace

const std::vector<FamilyDescriptor>& registered_families() {
  static const std::vector<FamilyDescriptor> registry = build_registry();
  return registry;
}

const FamilyDescriptor& registry_lookup(std::string_view family_id) {
  const auto& all = registered_families();
  auto it = std::find_if(all.begin(), all.end(),
                         [&](const FamilyDescriptor& d) { return d.family_id == family_id; });
  if (it == all.end()) {
    throw Error(ErrorCode::UnknownFamily, "no family registered as '" + std::string(family_id) + "'");
  }
  return *it;
}

bool is_registered(std::string_view family_id) {
  const auto& all = registered_families();
  return std::any_of(all.begin(), all.end(),
                     [&](const FamilyDescriptor& d) { return d.family_id == family_id; });
}

}  // namespace gapcha
