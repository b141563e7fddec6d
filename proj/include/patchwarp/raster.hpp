#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace patchwarp {

using Rgba = std::array<float, 4>;

/// Row-major RGBA image, 32-bit float per channel in [0, 1].
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return width_ == 0 || height_ == 0; }

  Rgba& at(int x, int y) { return pixels_[index(x, y)]; }
  const Rgba& at(int x, int y) const { return pixels_[index(x, y)]; }

  std::span<Rgba> pixels() noexcept { return pixels_; }
  std::span<const Rgba> pixels() const noexcept { return pixels_; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Rgba> pixels_;
};

/// Dense 2D grid of one scalar per pixel.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height),
        values_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }

  T& at(int x, int y) { return values_[index(x, y)]; }
  const T& at(int x, int y) const { return values_[index(x, y)]; }

  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> values_;
};

/// Values are 0 or 1.
using BinaryMask = Grid<std::uint8_t>;
/// Values in [0, 1]; used where a predicted mask is soft.
using SoftMask = Grid<float>;

std::size_t count(const BinaryMask& m);
bool same_size(const RasterImage& a, const BinaryMask& m) noexcept;
template <typename A, typename B>
bool same_size(const Grid<A>& a, const Grid<B>& b) noexcept {
  return a.width() == b.width() && a.height() == b.height();
}

/// Intersection over union; 1 when both masks are empty.
double iou(const BinaryMask& a, const BinaryMask& b);

/// Shift by an integer offset; pixels shifted in from outside are 0.
BinaryMask translate(const BinaryMask& m, int dx, int dy);

/// Removes `radius` pixels of boundary (4-connected erosion applied `radius` times).
BinaryMask erode(const BinaryMask& m, int radius);

/// C x H x W tensor, channel-major.
template <typename T>
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int channels, int height, int width, T fill = T{})
      : c_(channels), h_(height), w_(width),
        values_(static_cast<std::size_t>(channels) * height * width, fill) {}

  int channels() const noexcept { return c_; }
  int height() const noexcept { return h_; }
  int width() const noexcept { return w_; }
  std::size_t plane_size() const noexcept { return static_cast<std::size_t>(h_) * w_; }
  std::size_t size() const noexcept { return values_.size(); }

  T& at(int c, int y, int x) { return values_[offset(c, y, x)]; }
  const T& at(int c, int y, int x) const { return values_[offset(c, y, x)]; }

  std::span<T> plane(int c) { return std::span<T>(values_).subspan(c * plane_size(), plane_size()); }
  std::span<const T> plane(int c) const {
    return std::span<const T>(values_).subspan(c * plane_size(), plane_size());
  }

  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }

  bool same_shape(const auto& other) const noexcept {
    return c_ == other.channels() && h_ == other.height() && w_ == other.width();
  }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  std::size_t offset(int c, int y, int x) const noexcept {
    return (static_cast<std::size_t>(c) * h_ + y) * w_ + x;
  }

  int c_ = 0;
  int h_ = 0;
  int w_ = 0;
  std::vector<T> values_;
};

using FeatureMap = Tensor3<float>;
using FeatureMap64 = Tensor3<double>;

}  // namespace patchwarp
