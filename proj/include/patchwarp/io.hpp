#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "patchwarp/kernels.hpp"
#include "patchwarp/patching.hpp"
#include "patchwarp/raster.hpp"

namespace patchwarp::io {

using Bytes = std::vector<std::uint8_t>;

/// Whole-file read; throws Io naming the path.
Bytes read_file(const std::filesystem::path& path);

/// Writes to `<path>.tmp` and renames over `path`, so readers never observe a
/// partially written file.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

// PNG. Decoding converts any PNG to 8-bit RGBA or gray; encoding writes 8-bit.

RasterImage decode_png_rgba(std::span<const std::uint8_t> png);
/// Gray PNG thresholded at 128.
BinaryMask decode_png_mask(std::span<const std::uint8_t> png);
RasterImage read_png_rgba(const std::filesystem::path& path);
BinaryMask read_png_mask(const std::filesystem::path& path);

/// Channels are clamped to [0, 1] and rounded to 8 bits.
Bytes encode_png_rgba(const RasterImage& image);
/// 0 / 255 gray.
Bytes encode_png_mask(const BinaryMask& mask);
Bytes encode_png_rgb(const RasterImage& image);

using Rgb8 = std::array<std::uint8_t, 3>;
/// Palette PNG; index i uses palette[i]. Indices must be below palette.size() <= 256.
Bytes encode_png_indexed(const Grid<std::uint8_t>& indices, std::span<const Rgb8> palette);

// Keypoint JSON: {"format": "coco18", "keypoints": {"<joint>": [x, y, confidence], ...}}.
// Unknown joint names are ignored.

PoseKeypoints parse_pose_json(std::string_view text);
PoseKeypoints read_pose_json(const std::filesystem::path& path);
std::string pose_to_json(const PoseKeypoints& pose);

// ConvParams binary file, all fields little-endian:
//   char[4]  magic "PCNV"
//   u32      version (1)
//   u32      out_channels, in_channels, kernel
//   f32      weights[out * in * k * k]   (row-major o, i, ky, kx)
//   f32      bias[out]
//   u64      FNV-1a 64 of every preceding byte

inline constexpr std::array<char, 4> kConvMagic = {'P', 'C', 'N', 'V'};
inline constexpr std::uint32_t kConvVersion = 1;

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

Bytes encode_conv_params(const ConvParams& params);
/// Throws Parse on bad magic, version, size, checksum or parameters.
ConvParams decode_conv_params(std::span<const std::uint8_t> bytes);
ConvParams read_conv_params(const std::filesystem::path& path);
void write_conv_params(const std::filesystem::path& path, const ConvParams& params);

}  // namespace patchwarp::io
