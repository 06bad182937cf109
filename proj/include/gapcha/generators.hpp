#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gapcha/scene.hpp"
#include "gapcha/types.hpp"

namespace gapcha {

/// Named integer difficulty knobs. Missing entries take the family default or,
/// where the family has none, a value sampled from the seed.
using DifficultyParams = std::map<std::string, int>;

struct ParamSpec {
  std::string name;
  int min = 0;
  int max = 0;
  std::optional<int> default_value;
};

struct GeneratedInstance {
  SceneDescription scene;
  std::string instruction;
  InteractionSchema interaction_schema;
  GroundTruth truth;
  std::string family_id;
  Seed seed;
  DifficultyParams params;  // fully resolved
};

/// Bounds and defaults for a family's parameters. Throws UnknownFamily.
const std::vector<ParamSpec>& param_specs(std::string_view family_id);

/// Validates `given` against the family's specs and fills every missing value.
/// Throws InvalidParams for unknown names or out-of-range values.
DifficultyParams resolve_params(std::string_view family_id, Seed seed, const DifficultyParams& given);

/// Pure function of (family_id, seed, params).
GeneratedInstance generate(std::string_view family_id, Seed seed, const DifficultyParams& params = {});

/// Retry cap shared by every rejection loop.
inline constexpr int kMaxAttempts = 1000;

namespace gen {

GeneratedInstance dice_roll_path(Seed seed, const DifficultyParams& params);
GeneratedInstance hole_counting(Seed seed, const DifficultyParams& params);
GeneratedInstance box_folding(Seed seed, const DifficultyParams& params);
GeneratedInstance color_counting(Seed seed, const DifficultyParams& params);
GeneratedInstance layered_stack(Seed seed, const DifficultyParams& params);
GeneratedInstance subway_paths(Seed seed, const DifficultyParams& params);
GeneratedInstance red_dot(Seed seed, const DifficultyParams& params);
GeneratedInstance static_jigsaw(Seed seed, const DifficultyParams& params);
GeneratedInstance spooky_text(Seed seed, const DifficultyParams& params);
GeneratedInstance spooky_circle(Seed seed, const DifficultyParams& params);

}  // namespace gen

// ---------------------------------------------------------------------------
// rule helpers shared with tests
// ---------------------------------------------------------------------------

enum class Heading { North, East, South, West };

/// Visible faces of a die; opposite faces sum to 7.
struct DieState {
  int top = 1;
  int north = 2;
  int east = 3;
  friend bool operator==(const DieState&, const DieState&) = default;
};

DieState roll(DieState die, Heading heading);
DieState roll_path(DieState die, const std::vector<Heading>& path);

/// Cells of a hexomino in (row, col); the first cell is the fold root.
using NetCells = std::vector<std::array<int, 2>>;

/// The eleven cube nets in a canonical placement.
const std::vector<NetCells>& cube_nets();

/// Count of simple paths from `start` to `end` that visit every stamp node.
std::int64_t count_stamp_routes(int node_count, const std::vector<std::array<int, 2>>& edges, int start,
                                int end, const std::vector<int>& stamps);

inline constexpr std::string_view kSpookyAlphabet = "ACDEFHJKLMNPRTUVWXY34679";

}  // namespace gapcha
