#include <gtest/gtest.h>

#include "gapcha/generators.hpp"
#include "gapcha/oracle.hpp"
#include "gapcha/raster.hpp"
#include "gapcha/registry.hpp"
#include "png_reader.hpp"

using namespace gapcha;

namespace {

const Color kWhite{255, 255, 255, 255};
const Color kInk{20, 20, 20, 255};

SceneBuilder canvas() { return SceneBuilder(200, 120, kWhite); }

void ring(SceneBuilder& b, double cx, double cy, double outer, double inner) {
  b.add(CircleShape{cx, cy, outer}, kInk);
  b.add(CircleShape{cx, cy, inner}, kWhite);
}

int holes(SceneBuilder& b) {
  const auto scene = b.release();
  return oracle::count_holes(raster::render_static(scene), kWhite);
}

class OracleAgreement : public ::testing::TestWithParam<std::string> {};

}  // namespace

TEST(Holes, FilledDiskHasNone) {
  auto b = canvas();
  b.add(CircleShape{100, 60, 40}, kInk);
  EXPECT_EQ(holes(b), 0);
}

TEST(Holes, AnnulusHasOne) {
  auto b = canvas();
  ring(b, 100, 60, 40, 20);
  EXPECT_EQ(holes(b), 1);
}

TEST(Holes, ThreeRingsHaveThree) {
  auto b = canvas();
  ring(b, 35, 60, 28, 12);
  ring(b, 100, 60, 28, 12);
  ring(b, 165, 60, 28, 12);
  EXPECT_EQ(holes(b), 3);
}

TEST(Holes, OpenRingHasNone) {
  auto b = canvas();
  ring(b, 100, 60, 40, 20);
  b.add(RectShape{95, 0, 10, 60}, kWhite);
  EXPECT_EQ(holes(b), 0);
}

TEST_P(OracleAgreement, IndependentSolverMatchesTruth) {
  const auto& family = GetParam();
  const int seeds = family.rfind("spooky", 0) == 0 ? 8 : 40;
  for (int s = 0; s < seeds; ++s) {
    const auto inst = generate(family, Seed{static_cast<std::uint64_t>(5000 + s)});
    const auto solved = oracle::solve(family, inst.instruction, inst.scene);
    EXPECT_TRUE(oracle::agrees(inst.truth, solved)) << family << " seed " << 5000 + s;
  }
}

INSTANTIATE_TEST_SUITE_P(All, OracleAgreement, ::testing::ValuesIn([] {
                           std::vector<std::string> ids;
                           for (const auto& f : registered_families()) ids.push_back(f.family_id);
                           return ids;
                         }()),
                         [](const auto& info) { return info.param; });

TEST(Oracle, RejectsForeignInstruction) {
  const auto inst = generate("color_counting", Seed{1});
  EXPECT_THROW(oracle::solve("color_counting", "Click the bus", inst.scene), Error);
}

TEST(Motion, DotFieldsLookUniformPerFrame) {
  for (const char* family : {"spooky_text", "spooky_circle"}) {
    for (std::uint64_t s = 0; s < 4; ++s) {
      const auto inst = generate(family, Seed{s});
      const auto report = oracle::frame_uniformity(inst.scene);
      EXPECT_GT(report.frames, 0);
      EXPECT_LT(report.worst_statistic, report.critical) << family << " seed " << s;
      EXPECT_LT(oracle::max_density_gap(inst.scene), 0.10);
    }
  }
}

TEST(Motion, CoherentTracksOnlyInsideRegions) {
  const auto inst = generate("spooky_circle", Seed{3}, {{"circle_count", 2}});
  const auto frames = raster::expand_dot_field(inst.scene);
  const auto points = oracle::coherent_points(frames, inst.scene.width, inst.scene.height, 1);
  ASSERT_FALSE(points.empty());
  const auto& field = std::get<DotField>(inst.scene.animation->content);
  std::set<raster::PixelCoord> inside;
  for (const auto& region : field.regions) {
    for (const auto& p : raster::region_pixels(region, inst.scene.width, inst.scene.height)) inside.insert(p);
  }
  std::size_t hits = 0;
  for (const auto& p : points) hits += inside.contains({p.x, p.y});
  EXPECT_GT(static_cast<double>(hits) / static_cast<double>(points.size()), 0.9);
}

TEST(Encode, AnimationFramesDecodeToRenderedFrames) {
  for (const char* family : {"red_dot", "spooky_circle"}) {
    const auto inst = generate(family, Seed{11});
    const auto assets = raster::rasterize(inst.scene);
    ASSERT_EQ(assets.size(), 1u);
    const auto decoded = testsupport::decode_apng(raster::encode(assets[0]));
    const auto rendered = raster::render_frames(inst.scene);
    ASSERT_EQ(decoded.frames.size(), rendered.size()) << family;
    EXPECT_EQ(decoded.declared_frames, static_cast<int>(rendered.size()));
    for (std::size_t f = 0; f < rendered.size(); ++f) {
      ASSERT_EQ(decoded.frames[f].rgba, rendered[f].rgba()) << family << " frame " << f;
    }
  }
}
