#include <gtest/gtest.h>

#include <cmath>

#include "patchwarp/error.hpp"
#include "patchwarp/fixtures.hpp"
#include "patchwarp/geometry.hpp"

using namespace patchwarp;
namespace fx = patchwarp::fixtures;

namespace {

Quad quad(Point2 a, Point2 b, Point2 c, Point2 d) { return Quad{{a, b, c, d}, PatchRole::Template}; }

void expect_matrix(const Homography& h, const std::array<double, 9>& want, double tol) {
  for (int i = 0; i < 9; ++i) EXPECT_NEAR(h.matrix()[i], want[i], tol) << "entry " << i;
}

const Quad kUnit = quad({0, 0}, {1, 0}, {1, 1}, {0, 1});

}  // namespace

TEST(Homography, UnitSquareToItselfIsIdentity) {
  expect_matrix(estimate_homography(kUnit, kUnit), {1, 0, 0, 0, 1, 0, 0, 0, 1}, 1e-12);
}

TEST(Homography, TranslationIsForced) {
  const Quad shifted = quad({2, 3}, {3, 3}, {3, 4}, {2, 4});
  expect_matrix(estimate_homography(kUnit, shifted), {1, 0, 2, 0, 1, 3, 0, 0, 1}, 1e-12);
}

TEST(Homography, TrapezoidMatchesOracle) {
  const Quad trap = quad({0, 0}, {2, 0}, {1.5, 1}, {0.5, 1});
  const Homography h = estimate_homography(kUnit, trap);
  const fx::Mat3 o = fx::oracle_homography(kUnit, trap);
  for (int i = 0; i < 9; ++i) EXPECT_NEAR(h.matrix()[i], o[i], 1e-12);
  for (int k = 0; k < 4; ++k) EXPECT_LT(distance(apply_homography(h, kUnit.corners[k]), trap.corners[k]), 1e-9);
  const Point2 p = apply_homography(h, {1, 1});
  EXPECT_NEAR(p.x, 1.5, 1e-9);
  EXPECT_NEAR(p.y, 1.0, 1e-9);
  const Point2 q = apply_homography(h, {0, 1});
  EXPECT_NEAR(q.x, 0.5, 1e-9);
  EXPECT_NEAR(q.y, 1.0, 1e-9);
}

TEST(Homography, NormalizedSoH33IsOne) {
  const Homography h({2, 0, 4, 0, 2, 6, 0, 0, 2});
  expect_matrix(h, {1, 0, 2, 0, 1, 3, 0, 0, 1}, 0);
  EXPECT_FALSE(h.frobenius_normalized());
}

TEST(Homography, FrobeniusFallbackWhenH33Vanishes) {
  // Swaps x and w: maps (x, y) to (1/x, y/x).
  const Homography h({0, 0, 1, 0, 1, 0, 1, 0, 0});
  EXPECT_TRUE(h.frobenius_normalized());
  double f = 0;
  for (double v : h.matrix()) f += v * v;
  EXPECT_NEAR(std::sqrt(f), 1.0, 1e-15);
  const Point2 p = apply_homography(h, {2, 3});
  EXPECT_NEAR(p.x, 0.5, 1e-15);
  EXPECT_NEAR(p.y, 1.5, 1e-15);
}

TEST(Homography, SingularMatrixRejected) {
  try {
    Homography({1, 2, 3, 2, 4, 6, 0, 0, 1});
    FAIL() << "expected SingularMatrix";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularMatrix);
  }
}

TEST(Homography, DegenerateQuadsRejected) {
  const Quad collinear = quad({0, 0}, {1, 0}, {2, 0}, {3, 0});
  const Quad three_collinear = quad({0, 0}, {1, 0}, {2, 0}, {1, 1});
  const Quad reversed = quad({0, 0}, {0, 1}, {1, 1}, {1, 0});
  for (const Quad& bad : {collinear, three_collinear, reversed}) {
    try {
      estimate_homography(kUnit, bad);
      FAIL() << "expected DegenerateQuad";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::DegenerateQuad);
    }
    EXPECT_THROW(estimate_homography(bad, kUnit), Error);
  }
}

TEST(ApplyHomography, Examples) {
  const Point2 p = apply_homography(Homography(), {3, 4});
  EXPECT_EQ(p, (Point2{3, 4}));
  const Point2 q = apply_homography(Homography::translation(5, 0), {3, 4});
  EXPECT_EQ(q, (Point2{8, 4}));
}

TEST(ApplyHomography, PointAtInfinity) {
  const Homography h({1, 0, 0, 0, 1, 0, 1, 0, 1});
  try {
    apply_homography(h, {-1, 5});
    FAIL() << "expected PointAtInfinity";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PointAtInfinity);
  }
}

TEST(Invert, IdentityAndTranslation) {
  expect_matrix(invert(Homography()), {1, 0, 0, 0, 1, 0, 0, 0, 1}, 0);
  expect_matrix(invert(Homography::translation(2, 3)), {1, 0, -2, 0, 1, -3, 0, 0, 1}, 1e-15);
}

TEST(Compose, Examples) {
  SplitMix64 rng(7);
  const Homography h = estimate_homography(fx::random_convex_quad(rng), fx::random_convex_quad(rng));
  const Homography c = compose(Homography(), h);
  for (int i = 0; i < 9; ++i) EXPECT_NEAR(c.matrix()[i], h.matrix()[i], 1e-12 * (1 + std::abs(h.matrix()[i])));
  expect_matrix(compose(Homography::translation(1, 0), Homography::translation(0, 1)), {1, 0, 1, 0, 1, 1, 0, 0, 1},
                0);
}

TEST(HomographyProperty, CornerFitInverseAndComposition) {
  SplitMix64 rng(42);
  for (int i = 0; i < 1000; ++i) {
    const Quad a = fx::random_convex_quad(rng), b = fx::random_convex_quad(rng), c = fx::random_convex_quad(rng);
    const Homography ab = estimate_homography(a, b);
    const Homography bc = estimate_homography(b, c);
    const Homography inv = invert(ab);
    for (int k = 0; k < 4; ++k) {
      ASSERT_LT(distance(apply_homography(ab, a.corners[k]), b.corners[k]), 1e-6);
      ASSERT_LT(distance(apply_homography(inv, b.corners[k]), a.corners[k]), 1e-6);
      ASSERT_LT(distance(apply_homography(compose(bc, ab), a.corners[k]), c.corners[k]), 1e-6);
      const Point2 p{rng.uniform(50, 350), rng.uniform(50, 350)};
      ASSERT_LT(distance(apply_homography(compose(ab, inv), p), p), 1e-6);
    }
  }
}

TEST(HomographyProperty, CompositionIsAssociative) {
  SplitMix64 rng(43);
  for (int i = 0; i < 200; ++i) {
    const Quad q[4] = {fx::random_convex_quad(rng), fx::random_convex_quad(rng), fx::random_convex_quad(rng),
                       fx::random_convex_quad(rng)};
    const Homography a = estimate_homography(q[0], q[1]);
    const Homography b = estimate_homography(q[1], q[2]);
    const Homography c = estimate_homography(q[2], q[3]);
    const Homography left = compose(c, compose(b, a));
    const Homography right = compose(compose(c, b), a);
    for (int k = 0; k < 4; ++k) {
      ASSERT_LT(distance(apply_homography(left, q[0].corners[k]), apply_homography(right, q[0].corners[k])), 1e-6);
    }
  }
}

TEST(HomographyProperty, AgreesWithOracle) {
  SplitMix64 rng(44);
  for (int i = 0; i < 500; ++i) {
    const Quad a = fx::random_convex_quad(rng), b = fx::random_convex_quad(rng);
    const Homography h = estimate_homography(a, b);
    const fx::Mat3 o = fx::oracle_homography(a, b);
    for (int k = 0; k < 4; ++k) {
      ASSERT_LT(distance(fx::oracle_apply(o, a.corners[k]), b.corners[k]), 1e-9);
      const Point2 p{rng.uniform(50, 350), rng.uniform(50, 350)};
      ASSERT_LT(distance(apply_homography(h, p), fx::oracle_apply(o, p)), 1e-6);
    }
  }
}

TEST(Quad, ContainsIncludesBoundary) {
  const Quad q = square_quad(10);
  EXPECT_TRUE(contains(q, {5, 5}));
  EXPECT_TRUE(contains(q, {0, 5}));
  EXPECT_TRUE(contains(q, {10, 10}));
  EXPECT_FALSE(contains(q, {10.001, 5}));
  EXPECT_FALSE(contains(q, {-1, -1}));
  EXPECT_DOUBLE_EQ(signed_area(q), 100.0);
}
