#include <algorithm>
#include <cmath>

#include "patchwarp/kernels.hpp"

namespace patchwarp {

PixelRect clipped_bounds(const Quad& q, int width, int height) {
  double min_x = q.corners[0].x, max_x = min_x, min_y = q.corners[0].y, max_y = min_y;
  for (const Point2& c : q.corners) {
    min_x = std::min(min_x, c.x);
    max_x = std::max(max_x, c.x);
    min_y = std::min(min_y, c.y);
    max_y = std::max(max_y, c.y);
  }
  PixelRect r;
  r.x0 = static_cast<int>(std::clamp(std::floor(min_x), 0.0, static_cast<double>(width)));
  r.y0 = static_cast<int>(std::clamp(std::floor(min_y), 0.0, static_cast<double>(height)));
  r.x1 = static_cast<int>(std::clamp(std::ceil(max_x) + 1.0, 0.0, static_cast<double>(width)));
  r.y1 = static_cast<int>(std::clamp(std::ceil(max_y) + 1.0, 0.0, static_cast<double>(height)));
  return r;
}

namespace kernels {
namespace {

double snap(double f) {
  if (f < kSnap) return 0.0;
  if (f > 1.0 - kSnap) return 1.0;
  return f;
}

struct WarpJob {
  const RasterImage& src;
  const BinaryMask& src_valid;
  const Homography& h;
  const Quad& region;
  WarpedRaster& out;
};

void warp_row(const WarpJob& job, int y, int x0, int x1) {
  const int sw = job.src.width();
  const int sh = job.src.height();
  const auto& m = job.h.matrix();
  for (int x = x0; x < x1; ++x) {
    const double dx = x + 0.5;
    const double dy = y + 0.5;
    const double w = m[6] * dx + m[7] * dy + m[8];
    if (!(std::abs(w) > kMinW)) continue;
    const Point2 p{(m[0] * dx + m[1] * dy + m[2]) / w, (m[3] * dx + m[4] * dy + m[5]) / w};
    if (!(p.x >= 0.0 && p.y >= 0.0 && p.x < sw && p.y < sh)) continue;
    const int nx = static_cast<int>(p.x);
    const int ny = static_cast<int>(p.y);
    if (!job.src_valid.at(nx, ny)) continue;
    if (!contains(job.region, p)) continue;

    const double u = p.x - 0.5;
    const double v = p.y - 0.5;
    const double fu = std::floor(u);
    const double fv = std::floor(v);
    const int ix = static_cast<int>(fu);
    const int iy = static_cast<int>(fv);
    const double ax = snap(u - fu);
    const double ay = snap(v - fv);

    double acc[3] = {0.0, 0.0, 0.0};
    double total = 0.0;
    const double wx[2] = {1.0 - ax, ax};
    const double wy[2] = {1.0 - ay, ay};
    for (int j = 0; j < 2; ++j) {
      const int sy = iy + j;
      if (wy[j] == 0.0 || sy < 0 || sy >= sh) continue;
      for (int i = 0; i < 2; ++i) {
        const int sx = ix + i;
        if (wx[i] == 0.0 || sx < 0 || sx >= sw || !job.src_valid.at(sx, sy)) continue;
        const double wt = wx[i] * wy[j];
        const Rgba& s = job.src.at(sx, sy);
        acc[0] += wt * s[0];
        acc[1] += wt * s[1];
        acc[2] += wt * s[2];
        total += wt;
      }
    }
    // The nearest pixel is always a neighbour with weight >= 1/4.
    Rgba& o = job.out.image.at(x, y);
    o = {static_cast<float>(acc[0] / total), static_cast<float>(acc[1] / total),
         static_cast<float>(acc[2] / total), 1.0f};
    job.out.validity.at(x, y) = 1;
  }
}

}  // namespace

WarpedRaster warp_perspective(const RasterImage& src, const BinaryMask& src_valid, const Homography& dst_to_src,
                              const Quad& src_region, int dst_width, int dst_height, const PixelRect& roi,
                              Exec exec) {
  WarpedRaster out{RasterImage(dst_width, dst_height), BinaryMask(dst_width, dst_height)};
  const int x0 = std::max(roi.x0, 0);
  const int y0 = std::max(roi.y0, 0);
  const int x1 = std::min(roi.x1, dst_width);
  const int y1 = std::min(roi.y1, dst_height);
  if (x1 <= x0 || y1 <= y0 || src.empty()) return out;

  const WarpJob job{src, src_valid, dst_to_src, src_region, out};
  if (exec == Exec::Serial) {
    for (int y = y0; y < y1; ++y) warp_row(job, y, x0, x1);
  } else {
#pragma omp parallel for schedule(static)
    for (int y = y0; y < y1; ++y) warp_row(job, y, x0, x1);
  }
  return out;
}

}  // namespace kernels
}  // namespace patchwarp
