#include <gtest/gtest.h>

#include <cmath>

#include "patchwarp/error.hpp"
#include "patchwarp/fixtures.hpp"
#include "patchwarp/metrics.hpp"

using namespace patchwarp;
namespace fx = patchwarp::fixtures;

namespace {

RasterImage filled(int w, int h, float v) {
  RasterImage img(w, h);
  for (Rgba& p : img.pixels()) p = {v, v, v, v};
  return img;
}

RasterImage random_image(int w, int h, std::uint64_t seed) {
  SplitMix64 rng(seed);
  RasterImage img(w, h);
  for (Rgba& p : img.pixels())
    for (float& c : p) c = static_cast<float>(rng.uniform());
  return img;
}

double naive_l1(const RasterImage& a, const RasterImage& b) {
  double s = 0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x)
      for (int c = 0; c < 4; ++c) s += std::abs(a.at(x, y)[c] - b.at(x, y)[c]);
  return s / (4.0 * a.width() * a.height());
}

// Independent pyramid: level k is a 2^k box average of the image.
double naive_perceptual_term(const RasterImage& a, const RasterImage& b, const std::array<double, 5>& w) {
  double total = 0;
  for (int k = 0; k < 5; ++k) {
    const int f = 1 << k;
    const int lw = a.width() / f, lh = a.height() / f;
    double s = 0;
    for (int y = 0; y < lh; ++y)
      for (int x = 0; x < lw; ++x)
        for (int c = 0; c < 4; ++c) {
          double pa = 0, pb = 0;
          for (int dy = 0; dy < f; ++dy)
            for (int dx = 0; dx < f; ++dx) {
              pa += a.at(x * f + dx, y * f + dy)[c];
              pb += b.at(x * f + dx, y * f + dy)[c];
            }
          s += std::abs(pa - pb) / (f * f);
        }
    total += w[k] * s / (4.0 * lw * lh);
  }
  return total;
}

}  // namespace

TEST(L1, Examples) {
  const RasterImage a = random_image(9, 7, 1);
  EXPECT_EQ(l1_loss(a, a), 0.0);
  EXPECT_EQ(l1_loss(filled(5, 5, 1), filled(5, 5, 0)), 1.0);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const RasterImage x = random_image(13, 11, s), y = random_image(13, 11, s + 100);
    EXPECT_NEAR(l1_loss(x, y), naive_l1(x, y), 1e-6);
  }
  EXPECT_THROW(l1_loss(filled(5, 5, 0), filled(5, 4, 0)), Error);
}

TEST(L1, MetricProperties) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const RasterImage a = random_image(8, 8, s), b = random_image(8, 8, s + 1000), c = random_image(8, 8, s + 2000);
    EXPECT_GE(l1_loss(a, b), 0.0);
    EXPECT_EQ(l1_loss(a, b), l1_loss(b, a));
    EXPECT_LE(l1_loss(a, c), l1_loss(a, b) + l1_loss(b, c) + 1e-12);
  }
}

TEST(L1, FeatureOverload) {
  const FeatureMap a = fx::random_features(3, 4, 5, 1), b = fx::random_features(3, 4, 5, 2);
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a.values()[i] - b.values()[i]);
  EXPECT_NEAR(l1_loss(a, b), s / a.size(), 1e-6);
  EXPECT_EQ(l1_loss(a, a), 0.0);
  EXPECT_THROW(l1_loss(a, FeatureMap(3, 5, 4)), Error);
}

TEST(Reconstruction, Examples) {
  const RasterImage t = filled(6, 6, 0.25f);
  EXPECT_EQ(reconstruction_loss(t, t, t), 0.0);
  EXPECT_DOUBLE_EQ(reconstruction_loss(t, filled(6, 6, 0.75f), t), 0.5);
  const RasterImage c = random_image(10, 10, 1), f = random_image(10, 10, 2), g = random_image(10, 10, 3);
  EXPECT_NEAR(reconstruction_loss(c, f, g), naive_l1(c, g) + naive_l1(f, g), 1e-6);
}

TEST(Perceptual, Examples) {
  const PyramidExtractor px;
  const RasterImage t = random_image(32, 32, 1);
  const LossWeights w;
  EXPECT_EQ(perceptual_loss(t, t, t, px, w.perceptual_layers), 0.0);
  const RasterImage c = random_image(32, 32, 2), f = random_image(32, 32, 3);
  EXPECT_EQ(perceptual_loss(c, f, t, px, {0, 0, 0, 0, 0}), 0.0);
  const double want = naive_perceptual_term(c, t, w.perceptual_layers) + naive_perceptual_term(f, t, w.perceptual_layers);
  EXPECT_NEAR(perceptual_loss(c, f, t, px, w.perceptual_layers), want, 1e-6);
}

TEST(Perceptual, PyramidShapes) {
  const auto levels = PyramidExtractor().extract(random_image(40, 24, 0));
  ASSERT_EQ(levels.size(), 5u);
  EXPECT_EQ(levels[0].width(), 40);
  EXPECT_EQ(levels[4].width(), 2);
  EXPECT_EQ(levels[4].height(), 1);
  EXPECT_THROW(PyramidExtractor().extract(random_image(15, 40, 0)), Error);
}

TEST(MaskLoss, Examples) {
  const BinaryMask m = fx::random_mask(10, 10, 0.5, 1);
  EXPECT_EQ(mask_loss(m, m), 0.0);
  EXPECT_EQ(mask_loss(BinaryMask(10, 10, 1), BinaryMask(10, 10, 0)), 1.0);
  SplitMix64 rng(2);
  SoftMask soft(10, 10);
  double s = 0;
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) {
      soft.at(x, y) = static_cast<float>(rng.uniform());
      s += std::abs(soft.at(x, y) - m.at(x, y));
    }
  EXPECT_NEAR(mask_loss(soft, m), s / 100, 1e-6);
}

TEST(TotalLoss, DefaultWeights) {
  EXPECT_EQ(total_loss({1, 0, 0, 0}), 1.0);
  EXPECT_EQ(total_loss({0, 1, 1, 1}), 180.0);
  const LossWeights w;
  EXPECT_EQ(w.rec, 40.0);
  EXPECT_EQ(w.perc, 40.0);
  EXPECT_EQ(w.mask, 100.0);
}

TEST(TotalLoss, MatchesDirectExpressionAndIsLinear) {
  SplitMix64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const LossParts p{rng.uniform(0, 3), rng.uniform(0, 3), rng.uniform(0, 3), rng.uniform(0, 3)};
    LossWeights w;
    w.rec = rng.uniform(0, 50);
    w.perc = rng.uniform(0, 50);
    w.mask = rng.uniform(0, 150);
    EXPECT_NEAR(total_loss(p, w), p.gan + w.rec * p.rec + w.perc * p.perc + w.mask * p.mask, 1e-12);
    const LossParts twice{2 * p.gan, 2 * p.rec, 2 * p.perc, 2 * p.mask};
    EXPECT_NEAR(total_loss(twice, w), 2 * total_loss(p, w), 1e-9);
  }
  LossWeights bad;
  bad.mask = -1;
  EXPECT_THROW(total_loss({}, bad), Error);
}

TEST(Training, DocumentedConstants) {
  EXPECT_EQ(training::kAdamBeta1, 0.0);
  EXPECT_EQ(training::kAdamBeta2, 0.99);
  EXPECT_EQ(training::kLearningRate, 0.002);
  EXPECT_EQ(training::kBatchSize, 96);
}
