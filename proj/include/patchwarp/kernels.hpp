#pragma once

// Data-parallel kernels. Every kernel takes an `Exec` selecting the serial
// reference loop or the OpenMP loop; both run the same per-row / per-channel
// body and produce bit-identical output. Reductions never cross the
// parallel axis, so results do not depend on the thread count.

#include <span>
#include <vector>

#include "patchwarp/geometry.hpp"
#include "patchwarp/raster.hpp"

namespace patchwarp {

enum class Exec { Serial, Parallel };

/// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  bool empty() const noexcept { return x1 <= x0 || y1 <= y0; }
};

/// Pixel bounding box of a quad, clipped to a width x height canvas.
PixelRect clipped_bounds(const Quad& q, int width, int height);

struct WarpedRaster {
  RasterImage image;
  BinaryMask validity;
};

namespace kernels {

/// Offset below which a bilinear fraction snaps to the nearest pixel center.
inline constexpr double kSnap = 1e-9;

/// Inverse-mapped perspective resampling. Destination pixel (x, y) samples
/// the source at dst_to_src((x + 0.5, y + 0.5)). A destination pixel is
/// valid when that point lies inside `src_region`, inside the source image,
/// and the source pixel containing it is valid. Valid pixels get alpha 1 and
/// an RGB value bilinearly interpolated over the valid neighbours only;
/// invalid pixels are fully transparent. Pixels outside `roi` stay invalid.
WarpedRaster warp_perspective(const RasterImage& src, const BinaryMask& src_valid, const Homography& dst_to_src,
                              const Quad& src_region, int dst_width, int dst_height, const PixelRect& roi,
                              Exec exec = Exec::Parallel);

/// Deterministic pairwise sum (fixed split, 8-element leaves).
double pairwise_sum(std::span<const double> values);
template <typename T>
double pairwise_sum_of(std::span<const T> values);

struct ChannelStats {
  std::vector<double> mean;
  std::vector<double> stddev;
};

/// Population mean and standard deviation per channel.
template <typename T>
ChannelStats channel_stats(const Tensor3<T>& h, Exec exec = Exec::Parallel);

}  // namespace kernels

/// Weights are out x in x k x k, row-major; k is 1, 3 or 5.
struct ConvParams {
  int out_channels = 0;
  int in_channels = 0;
  int kernel = 1;
  std::vector<float> weights;
  std::vector<float> bias;

  float weight(int o, int i, int ky, int kx) const {
    return weights[((static_cast<std::size_t>(o) * in_channels + i) * kernel + ky) * kernel + kx];
  }

  /// Throws InvalidArgument on inconsistent sizes, bad k or non-finite values.
  void validate() const;

  friend bool operator==(const ConvParams&, const ConvParams&) = default;
};

namespace kernels {

/// Stride-1, zero-padded "same" convolution with bias.
template <typename T>
Tensor3<T> conv2d_same(const Tensor3<T>& input, const ConvParams& params, Exec exec = Exec::Parallel);

}  // namespace kernels

}  // namespace patchwarp
