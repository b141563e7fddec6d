#pragma once

// Synthetic assets and brute-force oracles for tests and the selfcheck.
// The oracles deliberately share no code with the production paths: their
// linear solves, point-in-quad tests and sampling are written out again here.

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "patchwarp/geometry.hpp"
#include "patchwarp/patching.hpp"
#include "patchwarp/raster.hpp"
#include "patchwarp/rng.hpp"

namespace patchwarp::fixtures {

enum class TextureKind { Solid, Checker, Stripes, LogoDot };

std::string_view to_string(TextureKind k) noexcept;

/// Opaque, band-limited procedural texture; `period` is in pixels.
RasterImage render_texture(TextureKind kind, int width, int height, std::uint64_t seed, double period = 16.0);

/// Canonical T-pose in pose-local coordinates: shoulders (+-50, 0), hips
/// (+-30, 120), elbows (+-110, 0), wrists (+-170, 0), neck (0, -10). The
/// person faces the camera, so the right side is at negative x.
PoseKeypoints canonical_tpose();

struct SyntheticGarment {
  int width = 384;
  int height = 256;
  Point2 origin{192.0, 48.0};  // canvas position of the pose-local origin
  TextureKind texture = TextureKind::Checker;
  std::uint64_t seed = 0;
};

struct GarmentFixture {
  RasterImage image;
  BinaryMask mask;
  PoseKeypoints pose;
};

/// Shirt-shaped garment rendered over the T-pose. Alpha is 1 exactly on the
/// mask and 0 elsewhere.
GarmentFixture make_garment(const SyntheticGarment& params);
GarmentFixture make_tpose_fixture(std::uint64_t seed);

/// FNV-1a over dimensions, float bit patterns and mask bytes.
std::uint64_t content_hash(const RasterImage& image, const BinaryMask& mask);

/// Writes source.png, source_mask.png, source_pose.json, target_pose.json,
/// conv_gamma.bin, conv_beta.bin and fixture.json into `dir`.
void write_bundle(const std::filesystem::path& dir, std::uint64_t seed, double target_shift_x = 0.0);

/// Convex, positively wound quad: a jittered square of side `scale`, rotated
/// and placed at a random offset in [0, 4*scale)^2.
Quad random_convex_quad(SplitMix64& rng, double scale = 100.0, PatchRole role = PatchRole::Template);

/// Uniform(-1, 1) entries.
FeatureMap random_features(int channels, int height, int width, std::uint64_t seed);
FeatureMap64 random_features64(int channels, int height, int width, std::uint64_t seed);

BinaryMask random_mask(int width, int height, double density, std::uint64_t seed);

// ---- oracles ------------------------------------------------------------

using Mat3 = std::array<double, 9>;

/// 8x8 Gaussian elimination with partial pivoting, h33 = 1.
Mat3 oracle_homography(const Quad& src, const Quad& dst);
Point2 oracle_apply(const Mat3& h, Point2 p);

/// Naive per-pixel inverse mapping with mask-aware bilinear sampling.
WarpedRaster oracle_resample(const RasterImage& src, const BinaryMask& src_valid, const Mat3& dst_to_src,
                             const Quad& src_region, int dst_width, int dst_height);

/// 2x2 box average (RGB), alpha 1.
RasterImage oracle_box_downsample2(const RasterImage& src);

FeatureMap oracle_conv2d(const FeatureMap& in, const ConvParams& p);

struct OracleStats {
  std::vector<double> mean;
  std::vector<double> stddev;
};
OracleStats oracle_channel_stats(const FeatureMap& h);

/// Per-element reference for gamma * (h - mu) / (sigma + eps) + beta.
FeatureMap oracle_modulate(const FeatureMap& h, const FeatureMap& gamma, const FeatureMap& beta, double eps);

/// Two-pass inpainting: per-channel sum/count over aligned, then fill.
FeatureMap oracle_inpaint(const FeatureMap& f, const BinaryMask& aligned, const BinaryMask& misaligned);

struct GradCheck {
  double grad_h = 0.0;  // max relative error per tensor
  double grad_gamma = 0.0;
  double grad_beta = 0.0;
  double worst() const { return std::max({grad_h, grad_gamma, grad_beta}); }
};

/// Central differences of L = sum(u * spade_modulate(h, gamma, beta)) in
/// double precision against spade_backward. Relative error per element is
/// |a - n| / max(|a|, |n|, floor).
inline constexpr double kGradFloor = 1e-6;
GradCheck spade_gradient_check(int channels, int height, int width, std::uint64_t seed, double step = 1e-3);

/// Test-only garment "encoder": stride x stride average pool followed by a
/// fixed seeded 4 -> channels linear projection.
FeatureMap projection_encoder(const RasterImage& image, int channels, int stride, std::uint64_t seed);

/// Peak signal-to-noise ratio (peak 1) over RGB of the pixels set in `region`.
double psnr(const RasterImage& a, const RasterImage& b, const BinaryMask& region);

}  // namespace patchwarp::fixtures
