#include <algorithm>
#include <functional>

#include "common.hpp"

namespace gapcha {

namespace {

using Generator = std::function<GeneratedInstance(Seed, const DifficultyParams&)>;

struct FamilyEntry {
  std::string_view family_id;
  std::vector<ParamSpec> specs;
  Generator generator;
};

std::vector<ParamSpec> dot_field_specs() {
  return {{"dot_count", 600, 2400, 1200}, {"frames", 2, 48, 24}, {"frame_ms", 30, 200, 60}, {"drift_px", 1, 4, 2}};
}

const std::vector<FamilyEntry>& entries() {
  static const std::vector<FamilyEntry> table = [] {
    auto text_specs = dot_field_specs();
    text_specs.insert(text_specs.begin(), ParamSpec{"length", 4, 6, std::nullopt});
    auto circle_specs = dot_field_specs();
    circle_specs.insert(circle_specs.begin(), ParamSpec{"circle_count", 1, 5, std::nullopt});
    return std::vector<FamilyEntry>{
        {family::kDiceRollPath, {{"path_len", 3, 8, 5}}, gen::dice_roll_path},
        {family::kHoleCounting, {{"hole_count", 0, 4, std::nullopt}}, gen::hole_counting},
        {family::kBoxFolding, {{"correct_count", 1, 3, std::nullopt}}, gen::box_folding},
        {family::kColorCounting, {{"target_color_count", 2, 4, std::nullopt}}, gen::color_counting},
        {family::kLayeredStack, {{"stack_depth", 2, 4, std::nullopt}}, gen::layered_stack},
        {family::kSubwayPaths, {{"target_count", 1, 4, std::nullopt}}, gen::subway_paths},
        {family::kRedDot, {{"quota", 3, 6, 4}}, gen::red_dot},
        {family::kStaticJigsaw, {{"rows", 1, 3, 3}, {"cols", 1, 3, 3}}, gen::static_jigsaw},
        {family::kSpookyText, text_specs, gen::spooky_text},
        {family::kSpookyCircle, circle_specs, gen::spooky_circle},
    };
  }();
  return table;
}

const FamilyEntry& entry(std::string_view family_id) {
  for (const auto& e : entries()) {
    if (e.family_id == family_id) return e;
  }
  throw Error(ErrorCode::UnknownFamily, "no generator for '" + std::string(family_id) + "'");
}

}  // namespace

const std::vector<ParamSpec>& param_specs(std::string_view family_id) { return entry(family_id).specs; }

DifficultyParams resolve_params(std::string_view family_id, Seed seed, const DifficultyParams& given) {
  const auto& specs = param_specs(family_id);
  for (const auto& [name, value] : given) {
    auto it = std::find_if(specs.begin(), specs.end(), [&](const ParamSpec& s) { return s.name == name; });
    if (it == specs.end()) {
      throw Error(ErrorCode::InvalidParams, std::string(family_id) + " has no parameter '" + name + "'");
    }
    if (value < it->min || value > it->max) {
      throw Error(ErrorCode::InvalidParams, name + "=" + std::to_string(value) + " outside [" +
                                                std::to_string(it->min) + ", " + std::to_string(it->max) + "]");
    }
  }
  auto stream = derive_stream(seed, "params");
  DifficultyParams out;
  for (const auto& spec : specs) {
    const auto sampled = static_cast<int>(stream.uniform_int(spec.min, spec.max));
    if (auto it = given.find(spec.name); it != given.end()) {
      out[spec.name] = it->second;
    } else {
      out[spec.name] = spec.default_value.value_or(sampled);
    }
  }
  return out;
}

GeneratedInstance generate(std::string_view family_id, Seed seed, const DifficultyParams& params) {
  const auto& e = entry(family_id);
  return e.generator(seed, resolve_params(family_id, seed, params));
}

}  // namespace gapcha
