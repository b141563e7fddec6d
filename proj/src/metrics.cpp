#include "patchwarp/metrics.hpp"

#include <cmath>
#include <string>

#include "patchwarp/error.hpp"
#include "patchwarp/kernels.hpp"

namespace patchwarp {

namespace {

// Row sums in fixed order, then a pairwise sum over rows.
template <typename RowFn>
double sum_rows(int rows, RowFn&& row) {
  std::vector<double> partial(rows, 0.0);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r) partial[r] = row(r);
  return kernels::pairwise_sum(partial);
}

}  // namespace

void LossWeights::validate() const {
  auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
  bool good = ok(rec) && ok(perc) && ok(mask);
  for (double v : perceptual_layers) good = good && ok(v);
  if (!good) throw Error(ErrorCode::InvalidArgument, "loss weights must be finite and non-negative");
}

std::vector<FeatureMap> PyramidExtractor::extract(const RasterImage& image) const {
  if (image.width() < 16 || image.height() < 16) {
    throw Error(ErrorCode::ShapeMismatch, "pyramid extractor needs at least 16x16 input");
  }
  std::vector<FeatureMap> levels;
  FeatureMap base(4, image.height(), image.width());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < 4; ++c) base.at(c, y, x) = image.at(x, y)[c];
    }
  }
  levels.push_back(std::move(base));
  for (int k = 1; k < 5; ++k) {
    const FeatureMap& prev = levels.back();
    FeatureMap next(prev.channels(), prev.height() / 2, prev.width() / 2);
    for (int c = 0; c < next.channels(); ++c) {
      for (int y = 0; y < next.height(); ++y) {
        for (int x = 0; x < next.width(); ++x) {
          next.at(c, y, x) = 0.25f * (prev.at(c, 2 * y, 2 * x) + prev.at(c, 2 * y, 2 * x + 1) +
                                      prev.at(c, 2 * y + 1, 2 * x) + prev.at(c, 2 * y + 1, 2 * x + 1));
        }
      }
    }
    levels.push_back(std::move(next));
  }
  return levels;
}

double l1_loss(const RasterImage& a, const RasterImage& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::DimensionMismatch, "l1_loss operands differ in size");
  }
  if (a.empty()) return 0.0;
  const int w = a.width();
  const double total = sum_rows(a.height(), [&](int y) {
    double s = 0.0;
    for (int x = 0; x < w; ++x) {
      const Rgba& p = a.at(x, y);
      const Rgba& q = b.at(x, y);
      for (int c = 0; c < 4; ++c) s += std::abs(static_cast<double>(p[c]) - static_cast<double>(q[c]));
    }
    return s;
  });
  return total / (4.0 * a.pixels().size());
}

double l1_loss(const FeatureMap& a, const FeatureMap& b) {
  if (!a.same_shape(b)) throw Error(ErrorCode::ShapeMismatch, "feature maps differ in shape");
  if (a.size() == 0) return 0.0;
  const auto va = a.values();
  const auto vb = b.values();
  const int rows = a.channels() * a.height();
  const int w = a.width();
  const double total = sum_rows(rows, [&](int r) {
    double s = 0.0;
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(r) * w + x;
      s += std::abs(static_cast<double>(va[i]) - static_cast<double>(vb[i]));
    }
    return s;
  });
  return total / static_cast<double>(a.size());
}

double reconstruction_loss(const RasterImage& coarse, const RasterImage& fine, const RasterImage& target) {
  return l1_loss(coarse, target) + l1_loss(fine, target);
}

double perceptual_loss(const RasterImage& coarse, const RasterImage& fine, const RasterImage& target,
                       const FeatureExtractor& fx, const std::array<double, 5>& weights) {
  const auto ref = fx.extract(target);
  if (ref.size() != 5) throw Error(ErrorCode::ShapeMismatch, "feature extractor must return 5 levels");
  double total = 0.0;
  for (const RasterImage* img : {&coarse, &fine}) {
    const auto feats = fx.extract(*img);
    if (feats.size() != 5) throw Error(ErrorCode::ShapeMismatch, "feature extractor must return 5 levels");
    for (int k = 0; k < 5; ++k) {
      if (weights[k] == 0.0) continue;
      total += weights[k] * l1_loss(feats[k], ref[k]);
    }
  }
  return total;
}

double mask_loss(const SoftMask& predicted, const BinaryMask& truth) {
  if (!same_size(predicted, truth)) throw Error(ErrorCode::DimensionMismatch, "mask_loss operands differ in size");
  if (predicted.size() == 0) return 0.0;
  const int w = predicted.width();
  const double total = sum_rows(predicted.height(), [&](int y) {
    double s = 0.0;
    for (int x = 0; x < w; ++x) {
      s += std::abs(static_cast<double>(predicted.at(x, y)) - static_cast<double>(truth.at(x, y)));
    }
    return s;
  });
  return total / static_cast<double>(predicted.size());
}

double mask_loss(const BinaryMask& predicted, const BinaryMask& truth) {
  SoftMask soft(predicted.width(), predicted.height());
  for (std::size_t i = 0; i < predicted.size(); ++i) soft.values()[i] = predicted.values()[i] ? 1.0f : 0.0f;
  return mask_loss(soft, truth);
}

double total_loss(const LossParts& parts, const LossWeights& w) {
  w.validate();
  return parts.gan + w.rec * parts.rec + w.perc * parts.perc + w.mask * parts.mask;
}

}  // namespace patchwarp
