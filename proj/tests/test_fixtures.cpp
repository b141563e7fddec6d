#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "patchwarp/fixtures.hpp"

using namespace patchwarp;
namespace fx = patchwarp::fixtures;

// Pinned at first generation on x86-64 / glibc libm.
constexpr std::uint64_t kSeed0Hash = 0x2f2dbebacf05d5ceULL;

TEST(Fixture, Seed0HashIsPinned) {
  const fx::GarmentFixture f = fx::make_tpose_fixture(0);
  EXPECT_EQ(fx::content_hash(f.image, f.mask), kSeed0Hash) << std::hex << fx::content_hash(f.image, f.mask);
}

TEST(Fixture, DeterministicAndSeedSensitive) {
  const fx::GarmentFixture a = fx::make_tpose_fixture(4);
  const fx::GarmentFixture b = fx::make_tpose_fixture(4);
  EXPECT_EQ(fx::content_hash(a.image, a.mask), fx::content_hash(b.image, b.mask));
  std::set<std::uint64_t> hashes;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const fx::GarmentFixture f = fx::make_tpose_fixture(s);
    hashes.insert(fx::content_hash(f.image, f.mask));
  }
  EXPECT_EQ(hashes.size(), 10u);
}

TEST(Fixture, MaskCoversExactlyNonzeroAlpha) {
  for (auto kind : {fx::TextureKind::Solid, fx::TextureKind::Checker, fx::TextureKind::Stripes,
                    fx::TextureKind::LogoDot}) {
    fx::SyntheticGarment prm;
    prm.texture = kind;
    const fx::GarmentFixture f = fx::make_garment(prm);
    ASSERT_GT(count(f.mask), 1000u);
    for (std::size_t i = 0; i < f.mask.size(); ++i) {
      ASSERT_EQ(f.mask.values()[i] != 0, f.image.pixels()[i][3] > 0.0f);
    }
  }
}

TEST(Fixture, PoseIsCanonicalTPoseAtOrigin) {
  const fx::GarmentFixture f = fx::make_tpose_fixture(0);
  EXPECT_EQ(f.pose.get(Joint::LShoulder)->position, (Point2{242, 48}));
  EXPECT_EQ(f.pose.get(Joint::RHip)->position, (Point2{162, 168}));
}

TEST(Oracle, HomographyExamples) {
  const Quad unit{{Point2{0, 0}, Point2{1, 0}, Point2{1, 1}, Point2{0, 1}}};
  const fx::Mat3 id = fx::oracle_homography(unit, unit);
  const fx::Mat3 want_id = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  for (int i = 0; i < 9; ++i) EXPECT_NEAR(id[i], want_id[i], 1e-15);
  const Quad shifted{{Point2{2, 3}, Point2{3, 3}, Point2{3, 4}, Point2{2, 4}}};
  const fx::Mat3 t = fx::oracle_homography(unit, shifted);
  const fx::Mat3 want_t = {1, 0, 2, 0, 1, 3, 0, 0, 1};
  for (int i = 0; i < 9; ++i) EXPECT_NEAR(t[i], want_t[i], 1e-15);
}

TEST(Oracle, RandomQuadsAreConvexAndPositive) {
  SplitMix64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Quad q = fx::random_convex_quad(rng);
    EXPECT_NO_THROW(validate_quad(q));
  }
}

TEST(Oracle, Psnr) {
  const RasterImage a = fx::render_texture(fx::TextureKind::Checker, 8, 8, 0);
  const BinaryMask all(8, 8, 1);
  EXPECT_TRUE(std::isinf(fx::psnr(a, a, all)));
  RasterImage b = a;
  for (Rgba& p : b.pixels())
    for (int c = 0; c < 3; ++c) p[c] += 0.1f;
  EXPECT_NEAR(fx::psnr(a, b, all), 20.0, 1e-4);
}
