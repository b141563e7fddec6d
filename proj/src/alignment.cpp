#include "patchwarp/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "patchwarp/error.hpp"

namespace patchwarp {

AlignmentMasks compute_alignment(const BinaryMask& m_g, const BinaryMask& m_t) {
  if (!same_size(m_g, m_t)) throw Error(ErrorCode::DimensionMismatch, "M_g and M_t differ in size");
  AlignmentMasks out{BinaryMask(m_g.width(), m_g.height()), BinaryMask(m_g.width(), m_g.height())};
  const auto g = m_g.values();
  const auto t = m_t.values();
  auto a = out.aligned.values();
  auto mis = out.misaligned.values();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const bool in_g = g[i] != 0;
    const bool al = in_g && t[i] != 0;
    a[i] = al ? 1 : 0;
    mis[i] = (in_g && !al) ? 1 : 0;
  }
  return out;
}

BinaryMask resample_mask(const BinaryMask& m, int width, int height) {
  if (width <= 0 || height <= 0) throw Error(ErrorCode::InvalidArgument, "target grid must be non-empty");
  if (width == m.width() && height == m.height()) return m;
  BinaryMask out(width, height);
  const double sx = static_cast<double>(m.width()) / width;
  const double sy = static_cast<double>(m.height()) / height;
  for (int ty = 0; ty < height; ++ty) {
    const double y0 = ty * sy;
    const double y1 = (ty + 1) * sy;
    for (int tx = 0; tx < width; ++tx) {
      const double x0 = tx * sx;
      const double x1 = (tx + 1) * sx;
      double covered = 0.0;
      for (int y = static_cast<int>(y0); y < std::min(m.height(), static_cast<int>(std::ceil(y1))); ++y) {
        const double oy = std::min<double>(y + 1, y1) - std::max<double>(y, y0);
        for (int x = static_cast<int>(x0); x < std::min(m.width(), static_cast<int>(std::ceil(x1))); ++x) {
          if (!m.at(x, y)) continue;
          covered += oy * (std::min<double>(x + 1, x1) - std::max<double>(x, x0));
        }
      }
      out.at(tx, ty) = covered >= 0.5 * sx * sy ? 1 : 0;
    }
  }
  return out;
}

AlignmentMasks compute_alignment_at(const BinaryMask& m_g, const BinaryMask& m_t, int width, int height) {
  return compute_alignment(resample_mask(m_g, width, height), resample_mask(m_t, width, height));
}

RasterImage mask_garment(const RasterImage& g_t, const BinaryMask& m_g) {
  if (!same_size(g_t, m_g)) throw Error(ErrorCode::DimensionMismatch, "G_t and M_g differ in size");
  RasterImage out = g_t;
  auto px = out.pixels();
  const auto m = m_g.values();
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!m[i]) px[i] = Rgba{0, 0, 0, 0};
  }
  return out;
}

std::vector<double> masked_channel_mean(const FeatureMap& f, const BinaryMask& region, Exec exec) {
  if (region.width() != f.width() || region.height() != f.height()) {
    throw Error(ErrorCode::DimensionMismatch, "mask does not match the feature grid");
  }
  const auto r = region.values();
  const std::size_t n = count(region);
  std::vector<double> mean(f.channels(), 0.0);
  if (n == 0) return mean;

  auto one = [&](int c) {
    const auto plane = f.plane(c);
    std::vector<double> picked;
    picked.reserve(n);
    for (std::size_t i = 0; i < plane.size(); ++i) {
      if (r[i]) picked.push_back(plane[i]);
    }
    mean[c] = kernels::pairwise_sum(picked) / static_cast<double>(n);
  };
  if (exec == Exec::Serial) {
    for (int c = 0; c < f.channels(); ++c) one(c);
  } else {
#pragma omp parallel for schedule(static)
    for (int c = 0; c < f.channels(); ++c) one(c);
  }
  return mean;
}

FeatureMap inpaint_features(const FeatureMap& f_raw, const AlignmentMasks& masks, Exec exec) {
  const auto& mis = masks.misaligned;
  if (mis.width() != f_raw.width() || mis.height() != f_raw.height() || !same_size(mis, masks.aligned)) {
    throw Error(ErrorCode::DimensionMismatch,
                "masks are " + std::to_string(mis.width()) + "x" + std::to_string(mis.height()) +
                    ", features are " + std::to_string(f_raw.width()) + "x" + std::to_string(f_raw.height()));
  }
  FeatureMap out = f_raw;
  if (count(mis) == 0) return out;
  if (count(masks.aligned) == 0) {
    throw Error(ErrorCode::EmptyAlignedRegion, "misaligned region is non-empty but aligned region is empty");
  }
  const std::vector<double> mean = masked_channel_mean(f_raw, masks.aligned, exec);
  const auto m = mis.values();

  auto fill = [&](int c) {
    auto plane = out.plane(c);
    const float v = static_cast<float>(mean[c]);
    for (std::size_t i = 0; i < plane.size(); ++i) {
      if (m[i]) plane[i] = v;
    }
  };
  if (exec == Exec::Serial) {
    for (int c = 0; c < out.channels(); ++c) fill(c);
  } else {
#pragma omp parallel for schedule(static)
    for (int c = 0; c < out.channels(); ++c) fill(c);
  }
  return out;
}

}  // namespace patchwarp
