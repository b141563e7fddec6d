#pragma once

#include <array>
#include <vector>

#include "patchwarp/raster.hpp"

namespace patchwarp {

// Every L1 norm below is mean-reduced over pixels and channels, so losses do
// not scale with resolution.

struct LossWeights {
  double rec = 40.0;
  double perc = 40.0;
  double mask = 100.0;
  std::array<double, 5> perceptual_layers{1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0};

  /// Throws InvalidArgument for negative or non-finite weights.
  void validate() const;
};

struct LossParts {
  double gan = 0.0;
  double rec = 0.0;
  double perc = 0.0;
  double mask = 0.0;
};

/// Optimizer settings used for training; recorded, never executed here.
namespace training {
inline constexpr double kAdamBeta1 = 0.0;
inline constexpr double kAdamBeta2 = 0.99;
inline constexpr double kLearningRate = 0.002;
inline constexpr int kBatchSize = 96;
}  // namespace training

/// Image -> five feature maps (phi_1 .. phi_5).
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual std::vector<FeatureMap> extract(const RasterImage& image) const = 0;
};

/// Level 1 is the RGBA image as a 4-channel map; each further level is a
/// 2x2 average pool (floor) of the previous one. Needs at least 16x16 input.
class PyramidExtractor final : public FeatureExtractor {
 public:
  std::vector<FeatureMap> extract(const RasterImage& image) const override;
};

double l1_loss(const RasterImage& a, const RasterImage& b);
double l1_loss(const FeatureMap& a, const FeatureMap& b);

double reconstruction_loss(const RasterImage& coarse, const RasterImage& fine, const RasterImage& target);

double perceptual_loss(const RasterImage& coarse, const RasterImage& fine, const RasterImage& target,
                       const FeatureExtractor& fx, const std::array<double, 5>& weights);

double mask_loss(const SoftMask& predicted, const BinaryMask& truth);
double mask_loss(const BinaryMask& predicted, const BinaryMask& truth);

double total_loss(const LossParts& parts, const LossWeights& w = {});

}  // namespace patchwarp
