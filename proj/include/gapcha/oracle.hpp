#pragma once

#include <array>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gapcha/raster.hpp"
#include "gapcha/scene.hpp"
#include "gapcha/types.hpp"

/// Independent solvers. Each one re-derives the answer from what is drawn
/// (scene primitives or rendered pixels) plus the instruction text, without
/// calling into the generators.
namespace gapcha::oracle {

GroundTruth solve(std::string_view family_id, const std::string& instruction, const SceneDescription& scene);

/// Exact comparison, except click schedules which are recovered from pixels and
/// compared with a one-pixel tolerance.
bool agrees(const GroundTruth& truth, const GroundTruth& solved);

int solve_dice(const SceneDescription& scene);
/// Background components not connected to the image border (4-connectivity).
int count_holes(const raster::Image& image, Color background);
std::set<int> solve_box(const SceneDescription& scene);
std::set<int> solve_colors(const SceneDescription& scene, int k);
std::set<int> solve_stack(const SceneDescription& scene, std::string_view shape, int beneath);
std::set<int> solve_subway(const SceneDescription& scene, int target);
ClickSchedule solve_red_dots(const SceneDescription& scene, int quota);
PlacementAnswer solve_jigsaw(const SceneDescription& scene);
std::string solve_spooky_text(const SceneDescription& scene);
int solve_spooky_circles(const SceneDescription& scene);

/// Cube colour triples (top, front, right) visible in some rotation of the cube
/// folded from `net`; cells are (row, col, colour id) and the first is the root.
std::set<std::array<int, 3>> folded_views(const std::vector<std::array<int, 3>>& net);

// ---------------------------------------------------------------------------
// motion-contrast checks
// ---------------------------------------------------------------------------

struct UniformityReport {
  int frames = 0;
  int rejections = 0;
  int bins = 0;
  double critical = 0;
  double worst_statistic = 0;
};

/// Per-frame chi-square test of the dot positions inside the target regions
/// against spatial uniformity over those regions.
UniformityReport frame_uniformity(const SceneDescription& scene, double alpha = 0.05);

/// Largest relative difference between dot density inside and outside the
/// target regions over all frames.
double max_density_gap(const SceneDescription& scene);

struct TrackPoint {
  int x = 0;
  int y = 0;
  int frame = 0;
};

/// Dots that start a track of three steps with near-constant displacement.
std::vector<TrackPoint> coherent_points(const std::vector<std::vector<raster::PixelCoord>>& frames, int width,
                                        int height, int tolerance);

}  // namespace gapcha::oracle
