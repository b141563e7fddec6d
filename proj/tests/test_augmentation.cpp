#include <gtest/gtest.h>

#include <set>

#include "patchwarp/augmentation.hpp"
#include "patchwarp/error.hpp"
#include "patchwarp/fixtures.hpp"

using namespace patchwarp;
namespace fx = patchwarp::fixtures;

namespace {

const WarpedGarment& fixture_garment() {
  static const WarpedGarment g = [] {
    const fx::GarmentFixture f = fx::make_tpose_fixture(0);
    return warp_garment(f.image, f.mask, f.pose, f.pose, GarmentKind::Upper).garment;
  }();
  return g;
}

std::set<std::uint8_t> roles_present(const WarpedGarment& g) {
  std::set<std::uint8_t> out;
  for (std::uint8_t r : g.provenance.values())
    if (r != kNoRole) out.insert(r);
  return out;
}

bool is_subset(const BinaryMask& a, const BinaryMask& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.values()[i] && !b.values()[i]) return false;
  return true;
}

}  // namespace

TEST(RandomErase, ZeroProbabilitiesAreIdentity) {
  const WarpedGarment& g = fixture_garment();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EraseConfig cfg{0.0, 0.0, seed};
    const WarpedGarment out = random_erase(g, cfg);
    EXPECT_EQ(out.image, g.image);
    EXPECT_EQ(out.mask, g.mask);
    EXPECT_EQ(out.provenance, g.provenance);
  }
}

TEST(RandomErase, CertainArmDropRemovesExactlyOneArm) {
  const WarpedGarment& g = fixture_garment();
  const std::set<std::uint8_t> before = roles_present(g);
  ASSERT_EQ(before.size(), 8u);
  std::set<PatchRole> seen;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const EraseOutcome out = random_erase_detailed(g, {1.0, 0.0, seed});
    ASSERT_TRUE(out.dropped_arm.has_value());
    EXPECT_TRUE(is_arm(*out.dropped_arm));
    std::set<std::uint8_t> after = roles_present(out.garment);
    ASSERT_EQ(after.size(), 7u);
    EXPECT_EQ(after.count(static_cast<std::uint8_t>(*out.dropped_arm)), 0u);
    seen.insert(*out.dropped_arm);
    // Everything that is not the dropped arm is untouched.
    for (std::size_t i = 0; i < g.mask.size(); ++i) {
      if (g.provenance.values()[i] != static_cast<std::uint8_t>(*out.dropped_arm)) {
        ASSERT_EQ(out.garment.image.pixels()[i], g.image.pixels()[i]);
      }
    }
  }
  EXPECT_EQ(seen.size(), 4u);
}

TEST(RandomErase, NoArmsSkipsDrop) {
  WarpedGarment g = fixture_garment();
  for (auto& r : g.provenance.values())
    if (r != kNoRole && is_arm(static_cast<PatchRole>(r))) r = static_cast<std::uint8_t>(PatchRole::Torso);
  const EraseOutcome out = random_erase_detailed(g, {1.0, 0.0, 3});
  EXPECT_FALSE(out.dropped_arm.has_value());
  EXPECT_EQ(out.garment.mask, g.mask);
}

TEST(RandomErase, MonotoneCoherentAndDeterministic) {
  const WarpedGarment& g = fixture_garment();
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const EraseConfig cfg{0.5, 0.9, seed};
    const WarpedGarment a = random_erase(g, cfg);
    const WarpedGarment b = random_erase(g, cfg);
    EXPECT_EQ(a.image, b.image);
    EXPECT_EQ(a.mask, b.mask);
    EXPECT_EQ(a.provenance, b.provenance);
    EXPECT_TRUE(is_subset(a.mask, g.mask));
    EXPECT_TRUE(is_coherent(a));
  }
}

TEST(RandomErase, StrokeParametersDoNotPerturbArmDecision) {
  const WarpedGarment& g = fixture_garment();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EraseConfig a{0.5, 0.9, seed};
    EraseConfig b = a;
    b.strokes.max_strokes = 8;
    b.strokes.max_width = 40;
    const EraseOutcome oa = random_erase_detailed(g, a);
    const EraseOutcome ob = random_erase_detailed(g, b);
    EXPECT_EQ(oa.dropped_arm, ob.dropped_arm);
    EXPECT_EQ(oa.free_form_applied, ob.free_form_applied);
  }
}

TEST(RandomErase, FreeFormSubtractsStrokeMask) {
  const WarpedGarment& g = fixture_garment();
  const EraseOutcome out = random_erase_detailed(g, {0.0, 1.0, 11});
  ASSERT_TRUE(out.free_form_applied);
  ASSERT_GT(count(out.stroke_mask), 0u);
  for (std::size_t i = 0; i < g.mask.size(); ++i) {
    const bool want = g.mask.values()[i] && !out.stroke_mask.values()[i];
    ASSERT_EQ(static_cast<bool>(out.garment.mask.values()[i]), want);
  }
}

TEST(RandomErase, InvalidConfigRejected) {
  EXPECT_THROW(random_erase(fixture_garment(), {1.5, 0.0, 0}), Error);
  EXPECT_THROW(random_erase(fixture_garment(), {0.0, -0.1, 0}), Error);
  EraseConfig bad;
  bad.strokes.min_width = 30;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(StrokeMask, DeterministicAndSeedSensitive) {
  const BinaryMask anchor = fixture_garment().mask;
  const StrokeParams p;
  const BinaryMask a = generate_stroke_mask(anchor.width(), anchor.height(), anchor, p, 1);
  EXPECT_EQ(a, generate_stroke_mask(anchor.width(), anchor.height(), anchor, p, 1));
  EXPECT_NE(a, generate_stroke_mask(anchor.width(), anchor.height(), anchor, p, 2));
  EXPECT_GT(count(a), 0u);
}

TEST(StrokeMask, SingleDotWhenRangesCollapse) {
  StrokeParams p;
  p.min_strokes = p.max_strokes = 1;
  p.min_vertices = p.max_vertices = 1;
  p.min_width = p.max_width = 6;
  const BinaryMask m = generate_stroke_mask(50, 50, BinaryMask(), p, 4);
  // A disc of radius 3 covers roughly pi * 9 pixel centers.
  EXPECT_GE(count(m), 20u);
  EXPECT_LE(count(m), 37u);
}
