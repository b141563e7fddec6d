#include <cmath>
#include <utility>

#include "patchwarp/error.hpp"
#include "patchwarp/fixtures.hpp"
#include "patchwarp/modulation.hpp"
#include "patchwarp/rng.hpp"

namespace patchwarp::fixtures {

Mat3 oracle_homography(const Quad& src, const Quad& dst) {
  double a[8][9] = {};
  for (int i = 0; i < 4; ++i) {
    const double x = src.corners[i].x, y = src.corners[i].y;
    const double u = dst.corners[i].x, v = dst.corners[i].y;
    const double r0[9] = {x, y, 1, 0, 0, 0, -u * x, -u * y, u};
    const double r1[9] = {0, 0, 0, x, y, 1, -v * x, -v * y, v};
    for (int k = 0; k < 9; ++k) {
      a[2 * i][k] = r0[k];
      a[2 * i + 1][k] = r1[k];
    }
  }
  for (int col = 0; col < 8; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 8; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-14) throw Error(ErrorCode::SingularSystem, "oracle: singular system");
    if (pivot != col) {
      for (int k = 0; k < 9; ++k) std::swap(a[col][k], a[pivot][k]);
    }
    for (int r = col + 1; r < 8; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int k = col; k < 9; ++k) a[r][k] -= f * a[col][k];
    }
  }
  double h[8];
  for (int r = 7; r >= 0; --r) {
    double s = a[r][8];
    for (int k = r + 1; k < 8; ++k) s -= a[r][k] * h[k];
    h[r] = s / a[r][r];
  }
  return {h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], 1.0};
}

Point2 oracle_apply(const Mat3& h, Point2 p) {
  const double w = h[6] * p.x + h[7] * p.y + h[8];
  return {(h[0] * p.x + h[1] * p.y + h[2]) / w, (h[3] * p.x + h[4] * p.y + h[5]) / w};
}

namespace {

bool oracle_inside(const Quad& q, Point2 p) {
  // Convex, positively wound quads only; boundary counts as inside.
  for (int i = 0; i < 4; ++i) {
    const Point2 a = q.corners[i];
    const Point2 b = q.corners[(i + 1) % 4];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)) / len < -1e-9) return false;
  }
  return true;
}

}  // namespace

WarpedRaster oracle_resample(const RasterImage& src, const BinaryMask& src_valid, const Mat3& dst_to_src,
                             const Quad& src_region, int dst_width, int dst_height) {
  WarpedRaster out{RasterImage(dst_width, dst_height), BinaryMask(dst_width, dst_height)};
  for (int y = 0; y < dst_height; ++y) {
    for (int x = 0; x < dst_width; ++x) {
      const Point2 p = oracle_apply(dst_to_src, {x + 0.5, y + 0.5});
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
      if (p.x < 0 || p.y < 0 || p.x >= src.width() || p.y >= src.height()) continue;
      if (!src_valid.at(static_cast<int>(std::floor(p.x)), static_cast<int>(std::floor(p.y)))) continue;
      if (!oracle_inside(src_region, p)) continue;
      double rgb[3] = {0, 0, 0};
      double wsum = 0;
      for (int sy = static_cast<int>(std::floor(p.y - 0.5)); sy <= static_cast<int>(std::floor(p.y - 0.5)) + 1; ++sy) {
        for (int sx = static_cast<int>(std::floor(p.x - 0.5)); sx <= static_cast<int>(std::floor(p.x - 0.5)) + 1;
             ++sx) {
          if (sx < 0 || sy < 0 || sx >= src.width() || sy >= src.height() || !src_valid.at(sx, sy)) continue;
          const double w = std::max(0.0, 1.0 - std::abs(p.x - (sx + 0.5))) * std::max(0.0, 1.0 - std::abs(p.y - (sy + 0.5)));
          for (int c = 0; c < 3; ++c) rgb[c] += w * src.at(sx, sy)[c];
          wsum += w;
        }
      }
      if (wsum <= 0) continue;
      out.image.at(x, y) = {static_cast<float>(rgb[0] / wsum), static_cast<float>(rgb[1] / wsum),
                            static_cast<float>(rgb[2] / wsum), 1.0f};
      out.validity.at(x, y) = 1;
    }
  }
  return out;
}

RasterImage oracle_box_downsample2(const RasterImage& src) {
  RasterImage out(src.width() / 2, src.height() / 2);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      Rgba px{0, 0, 0, 1};
      for (int c = 0; c < 3; ++c) {
        px[c] = 0.25f * (src.at(2 * x, 2 * y)[c] + src.at(2 * x + 1, 2 * y)[c] + src.at(2 * x, 2 * y + 1)[c] +
                         src.at(2 * x + 1, 2 * y + 1)[c]);
      }
      out.at(x, y) = px;
    }
  }
  return out;
}

FeatureMap oracle_conv2d(const FeatureMap& in, const ConvParams& p) {
  const int k = p.kernel;
  FeatureMap out(p.out_channels, in.height(), in.width());
  for (int o = 0; o < p.out_channels; ++o)
    for (int y = 0; y < in.height(); ++y)
      for (int x = 0; x < in.width(); ++x) {
        double acc = p.bias[o];
        for (int i = 0; i < p.in_channels; ++i)
          for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx) {
              const int sy = y + ky - k / 2;
              const int sx = x + kx - k / 2;
              const double v = (sy >= 0 && sy < in.height() && sx >= 0 && sx < in.width()) ? in.at(i, sy, sx) : 0.0;
              acc += p.weights[((o * p.in_channels + i) * k + ky) * k + kx] * v;
            }
        out.at(o, y, x) = static_cast<float>(acc);
      }
  return out;
}

OracleStats oracle_channel_stats(const FeatureMap& h) {
  OracleStats s;
  const double n = static_cast<double>(h.height()) * h.width();
  for (int c = 0; c < h.channels(); ++c) {
    double sum = 0;
    for (int y = 0; y < h.height(); ++y)
      for (int x = 0; x < h.width(); ++x) sum += h.at(c, y, x);
    const double mu = sum / n;
    double sq = 0;
    for (int y = 0; y < h.height(); ++y)
      for (int x = 0; x < h.width(); ++x) sq += (h.at(c, y, x) - mu) * (h.at(c, y, x) - mu);
    s.mean.push_back(mu);
    s.stddev.push_back(std::sqrt(sq / n));
  }
  return s;
}

FeatureMap oracle_modulate(const FeatureMap& h, const FeatureMap& gamma, const FeatureMap& beta, double eps) {
  const OracleStats s = oracle_channel_stats(h);
  FeatureMap out(h.channels(), h.height(), h.width());
  for (int c = 0; c < h.channels(); ++c)
    for (int y = 0; y < h.height(); ++y)
      for (int x = 0; x < h.width(); ++x) {
        out.at(c, y, x) = static_cast<float>(gamma.at(c, y, x) * (h.at(c, y, x) - s.mean[c]) / (s.stddev[c] + eps) +
                                             beta.at(c, y, x));
      }
  return out;
}

FeatureMap oracle_inpaint(const FeatureMap& f, const BinaryMask& aligned, const BinaryMask& misaligned) {
  FeatureMap out = f;
  for (int c = 0; c < f.channels(); ++c) {
    double sum = 0;
    long count = 0;
    for (int y = 0; y < f.height(); ++y)
      for (int x = 0; x < f.width(); ++x)
        if (aligned.at(x, y)) {
          sum += f.at(c, y, x);
          ++count;
        }
    if (count == 0) continue;
    for (int y = 0; y < f.height(); ++y)
      for (int x = 0; x < f.width(); ++x)
        if (misaligned.at(x, y)) out.at(c, y, x) = static_cast<float>(sum / count);
  }
  return out;
}

namespace {

double objective(const FeatureMap64& h, const AffineParams64& p, const FeatureMap64& u) {
  const FeatureMap64 out = spade_modulate(h, p, kDefaultModulationEps, Exec::Serial);
  double sum = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) sum += u.values()[i] * out.values()[i];
  return sum;
}

double relative_error(double a, double n) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), kGradFloor});
}

}  // namespace

GradCheck spade_gradient_check(int channels, int height, int width, std::uint64_t seed, double step) {
  const FeatureMap64 h0 = random_features64(channels, height, width, derive_seed(seed, 0));
  AffineParams64 p0{random_features64(channels, height, width, derive_seed(seed, 1)),
                    random_features64(channels, height, width, derive_seed(seed, 2))};
  const FeatureMap64 u = random_features64(channels, height, width, derive_seed(seed, 3));
  const ModulationGrads<double> g = spade_backward(h0, p0, kDefaultModulationEps, u, Exec::Serial);

  GradCheck r;
  for (std::size_t i = 0; i < h0.size(); ++i) {
    FeatureMap64 hp = h0, hm = h0;
    hp.values()[i] += step;
    hm.values()[i] -= step;
    const double n = (objective(hp, p0, u) - objective(hm, p0, u)) / (2.0 * step);
    r.grad_h = std::max(r.grad_h, relative_error(g.grad_h.values()[i], n));

    AffineParams64 pp = p0, pm = p0;
    pp.gamma.values()[i] += step;
    pm.gamma.values()[i] -= step;
    const double ng = (objective(h0, pp, u) - objective(h0, pm, u)) / (2.0 * step);
    r.grad_gamma = std::max(r.grad_gamma, relative_error(g.grad_gamma.values()[i], ng));

    pp = p0;
    pm = p0;
    pp.beta.values()[i] += step;
    pm.beta.values()[i] -= step;
    const double nb = (objective(h0, pp, u) - objective(h0, pm, u)) / (2.0 * step);
    r.grad_beta = std::max(r.grad_beta, relative_error(g.grad_beta.values()[i], nb));
  }
  return r;
}

FeatureMap projection_encoder(const RasterImage& image, int channels, int stride, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> w(static_cast<std::size_t>(channels) * 4);
  for (double& v : w) v = rng.uniform(-1.0, 1.0);
  std::vector<double> b(channels);
  for (double& v : b) v = rng.uniform(-0.1, 0.1);

  const int fh = image.height() / stride;
  const int fw = image.width() / stride;
  FeatureMap out(channels, fh, fw);
  for (int y = 0; y < fh; ++y) {
    for (int x = 0; x < fw; ++x) {
      double pooled[4] = {0, 0, 0, 0};
      for (int dy = 0; dy < stride; ++dy)
        for (int dx = 0; dx < stride; ++dx)
          for (int c = 0; c < 4; ++c) pooled[c] += image.at(x * stride + dx, y * stride + dy)[c];
      for (double& v : pooled) v /= stride * stride;
      for (int c = 0; c < channels; ++c) {
        double acc = b[c];
        for (int k = 0; k < 4; ++k) acc += w[c * 4 + k] * pooled[k];
        out.at(c, y, x) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

double psnr(const RasterImage& a, const RasterImage& b, const BinaryMask& region) {
  double se = 0;
  long n = 0;
  for (int y = 0; y < region.height(); ++y)
    for (int x = 0; x < region.width(); ++x) {
      if (!region.at(x, y)) continue;
      for (int c = 0; c < 3; ++c) {
        const double d = static_cast<double>(a.at(x, y)[c]) - b.at(x, y)[c];
        se += d * d;
      }
      n += 3;
    }
  if (n == 0) return 0.0;
  const double mse = se / n;
  return mse == 0.0 ? INFINITY : 10.0 * std::log10(1.0 / mse);
}

}  // namespace patchwarp::fixtures
