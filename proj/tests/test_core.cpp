#include <gtest/gtest.h>

#include <set>

#include "gapcha/bundle.hpp"
#include "gapcha/codec.hpp"
#include "gapcha/random.hpp"
#include "gapcha/registry.hpp"

using namespace gapcha;

TEST(Registry, LooksUpKnownFamilies) {
  const auto& dice = registry_lookup("dice_roll_path");
  EXPECT_EQ(dice.answer_type, AnswerType::Numeric);
  EXPECT_EQ(dice.gaps, (std::set<GapCategory>{GapCategory::Numerosity, GapCategory::LatentState,
                                              GapCategory::PerceptionToAction}));
  const auto& jigsaw = registry_lookup("static_jigsaw");
  EXPECT_EQ(jigsaw.answer_type, AnswerType::Placement);
  EXPECT_EQ(jigsaw.gaps, (std::set<GapCategory>{GapCategory::LatentState, GapCategory::PerceptionToAction}));
}

TEST(Registry, UnknownFamilyThrows) {
  try {
    registry_lookup("no_such_family");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownFamily);
  }
}

TEST(Registry, CoversEveryGapAndAnswerType) {
  std::set<GapCategory> gaps;
  std::set<AnswerType> types;
  std::set<std::string> ids;
  for (const auto& f : registered_families()) {
    EXPECT_FALSE(f.gaps.empty()) << f.family_id;
    EXPECT_TRUE(f.generative);
    EXPECT_TRUE(ids.insert(f.family_id).second) << "duplicate " << f.family_id;
    gaps.insert(f.gaps.begin(), f.gaps.end());
    types.insert(f.answer_type);
  }
  EXPECT_EQ(gaps.size(), kGapCategoryCount);
  EXPECT_EQ(types.size(), kAnswerTypeCount);
  EXPECT_EQ(registered_families().size(), 10u);
}

namespace {

std::vector<std::uint64_t> draws(Seed seed, std::string_view label, int n = 64) {
  auto s = derive_stream(seed, label);
  std::vector<std::uint64_t> out;
  for (int i = 0; i < n; ++i) out.push_back(s.next_u64());
  return out;
}

}  // namespace

TEST(DeriveStream, SameInputsSameSequence) {
  EXPECT_EQ(draws(Seed{7}, "layout"), draws(Seed{7}, "layout"));
}

TEST(DeriveStream, PinnedFirstDraw) {
  // Pinned so that a change in the derivation (which would silently change
  // every benchmark) is caught; any process on any platform must agree.
  EXPECT_EQ(draws(Seed{7}, "layout", 1)[0], 0xb97fd02cbecb4bd5ULL);
}

TEST(DeriveStream, LabelsAndSeedsSeparateStreams) {
  EXPECT_NE(draws(Seed{7}, "layout"), draws(Seed{7}, "colors"));
  EXPECT_NE(draws(Seed{7}, "layout"), draws(Seed{8}, "layout"));
}

TEST(DeriveStream, UniformIntStaysInRange) {
  auto s = derive_stream(Seed{1}, "range");
  std::set<std::int64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = s.uniform_int(-3, 3);
    ASSERT_GE(v, -3);
    ASSERT_LE(v, 3);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(Nonce, ThirtyTwoLowercaseHex) {
  const auto a = random_nonce_hex();
  const auto b = random_nonce_hex();
  EXPECT_EQ(a.size(), 32u);
  EXPECT_EQ(a.find_first_not_of("0123456789abcdef"), std::string::npos);
  EXPECT_NE(a, b);
}

TEST(Submission, VariantDisciplineRejectsMismatch) {
  try {
    AnswerSubmission::for_challenge(AnswerType::Select, "id", NumericAnswer{3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaMismatch);
  }
  const auto ok = AnswerSubmission::for_challenge(AnswerType::Numeric, "id", NumericAnswer{3});
  EXPECT_EQ(ok.answer_type(), AnswerType::Numeric);
}

TEST(Codec, GroundTruthRoundTrip) {
  const std::vector<GroundTruth> truths = {
      {SelectionAnswer{{1, 4}}},
      {NumericAnswer{3}},
      {ClickSchedule{{DotEvent{100, 100, 20, 1000, 2400}}, 1}},
      {PlacementAnswer{{{0, 1}, {1, 0}}}},
      {TextAnswer{"HR47"}},
  };
  for (const auto& t : truths) {
    const Json j = t;
    EXPECT_EQ(j.get<GroundTruth>(), t) << j.dump();
  }
}

TEST(Codec, SubmissionRoundTrip) {
  TrajectoryRecord traj;
  traj.steps = 3;
  traj.reasoning_tokens = 30;
  traj.events = {{"click", 1, 2, "cell:0", 10}};
  AnswerSubmission s{"abc", ClickAnswer{{Click{1.5, 2, 30}}}, traj};
  const Json j = s;
  const auto back = j.get<AnswerSubmission>();
  EXPECT_EQ(back.challenge_id, "abc");
  EXPECT_EQ(back.payload, s.payload);
  EXPECT_EQ(back.trajectory, s.trajectory);
}

TEST(Trajectory, TokensPerStepIsRecomputed) {
  Json j = {{"steps", 4}, {"reasoning_tokens", 10}, {"tokens_per_step", 999}};
  const auto t = j.get<TrajectoryRecord>();
  EXPECT_DOUBLE_EQ(*t.tokens_per_step(), 2.5);
  TrajectoryRecord zero;
  zero.reasoning_tokens = 7;
  EXPECT_DOUBLE_EQ(*zero.tokens_per_step(), 7.0);
}

TEST(Trajectory, ValidateRejectsNegativeAndNonMonotonic) {
  TrajectoryRecord t;
  t.steps = -1;
  EXPECT_THROW(t.validate(), Error);
  TrajectoryRecord u;
  u.events = {{"click", 0, 0, "", 20}, {"click", 0, 0, "", 10}};
  EXPECT_THROW(u.validate(), Error);
}

class PerFamily : public ::testing::TestWithParam<std::string> {};

TEST_P(PerFamily, RegenerationIsByteIdentical) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto a = generate(GetParam(), Seed{s});
    const auto b = generate(GetParam(), Seed{s});
    ASSERT_EQ(a.truth, b.truth);
    ASSERT_EQ(a.scene, b.scene);
    const auto ba = build_bundle(a, raster::rasterize(a.scene), "x", 0, 1000, AssetDelivery::Inline);
    const auto bb = build_bundle(b, raster::rasterize(b.scene), "x", 0, 1000, AssetDelivery::Inline);
    ASSERT_EQ(Json(ba).dump(), Json(bb).dump()) << "seed " << s;
  }
}

TEST_P(PerFamily, BundleLeaksNoTruthOrSeed) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Seed seed{0x5eed0000ULL + s * 7919};
    const auto inst = generate(GetParam(), seed);
    const auto bundle = build_bundle(inst, raster::rasterize(inst.scene), random_nonce_hex(), 0, 1000, AssetDelivery::Url);
    const auto text = Json(bundle).dump();
    const Json truth = inst.truth;
    EXPECT_EQ(text.find(truth.dump()), std::string::npos);
    if (truth.contains("text")) EXPECT_EQ(text.find(truth.at("text").dump()), std::string::npos);
    if (truth.contains("dots")) EXPECT_EQ(text.find(truth.at("dots").dump()), std::string::npos);
    if (truth.contains("placement")) EXPECT_EQ(text.find(truth.at("placement").dump()), std::string::npos);
    EXPECT_EQ(text.find(std::to_string(seed.value)), std::string::npos);
    EXPECT_EQ(text.find("\"truth\""), std::string::npos);
    EXPECT_EQ(text.find("\"seed\""), std::string::npos);
    EXPECT_EQ(text.find("\"scene\""), std::string::npos);
  }
}

INSTANTIATE_TEST_SUITE_P(All, PerFamily, ::testing::Values("dice_roll_path", "hole_counting", "box_folding",
                                                           "color_counting", "layered_stack", "subway_paths",
                                                           "red_dot", "static_jigsaw", "spooky_text",
                                                           "spooky_circle"));
