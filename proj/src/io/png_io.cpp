#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "patchwarp/error.hpp"
#include "patchwarp/io.hpp"

namespace patchwarp::io {

namespace {

struct ImageGuard {
  png_image image{};
  ImageGuard() {
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
  }
  ~ImageGuard() { png_image_free(&image); }
  ImageGuard(const ImageGuard&) = delete;
  ImageGuard& operator=(const ImageGuard&) = delete;
};

Bytes decode(std::span<const std::uint8_t> png, std::uint32_t format, int& width, int& height) {
  ImageGuard g;
  if (!png_image_begin_read_from_memory(&g.image, png.data(), png.size())) {
    throw Error(ErrorCode::Parse, std::string("PNG decode: ") + g.image.message);
  }
  g.image.format = format;
  Bytes buffer(PNG_IMAGE_SIZE(g.image));
  if (!png_image_finish_read(&g.image, nullptr, buffer.data(), 0, nullptr)) {
    throw Error(ErrorCode::Parse, std::string("PNG decode: ") + g.image.message);
  }
  width = static_cast<int>(g.image.width);
  height = static_cast<int>(g.image.height);
  return buffer;
}

Bytes encode(const std::uint8_t* pixels, int width, int height, std::uint32_t format, const void* colormap = nullptr,
             int colormap_entries = 0) {
  ImageGuard g;
  g.image.width = static_cast<png_uint_32>(width);
  g.image.height = static_cast<png_uint_32>(height);
  g.image.format = format;
  g.image.colormap_entries = static_cast<png_uint_32>(colormap_entries);
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&g.image, nullptr, &size, 0, pixels, 0, colormap)) {
    throw Error(ErrorCode::Io, std::string("PNG encode: ") + g.image.message);
  }
  Bytes out(size);
  if (!png_image_write_to_memory(&g.image, out.data(), &size, 0, pixels, 0, colormap)) {
    throw Error(ErrorCode::Io, std::string("PNG encode: ") + g.image.message);
  }
  out.resize(size);
  return out;
}

std::uint8_t to8(float v) {
  const float c = std::clamp(std::isfinite(v) ? v : 0.0f, 0.0f, 1.0f);
  return static_cast<std::uint8_t>(std::lround(c * 255.0f));
}

}  // namespace

RasterImage decode_png_rgba(std::span<const std::uint8_t> png) {
  int w = 0, h = 0;
  const Bytes raw = decode(png, PNG_FORMAT_RGBA, w, h);
  RasterImage img(w, h);
  auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    for (int c = 0; c < 4; ++c) px[i][c] = raw[4 * i + c] / 255.0f;
  }
  return img;
}

BinaryMask decode_png_mask(std::span<const std::uint8_t> png) {
  int w = 0, h = 0;
  const Bytes raw = decode(png, PNG_FORMAT_GRAY, w, h);
  BinaryMask m(w, h);
  auto v = m.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = raw[i] >= 128 ? 1 : 0;
  return m;
}

RasterImage read_png_rgba(const std::filesystem::path& path) {
  try {
    return decode_png_rgba(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

BinaryMask read_png_mask(const std::filesystem::path& path) {
  try {
    return decode_png_mask(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

Bytes encode_png_rgba(const RasterImage& image) {
  Bytes raw(image.pixels().size() * 4);
  for (std::size_t i = 0; i < image.pixels().size(); ++i) {
    for (int c = 0; c < 4; ++c) raw[4 * i + c] = to8(image.pixels()[i][c]);
  }
  return encode(raw.data(), image.width(), image.height(), PNG_FORMAT_RGBA);
}

Bytes encode_png_rgb(const RasterImage& image) {
  Bytes raw(image.pixels().size() * 3);
  for (std::size_t i = 0; i < image.pixels().size(); ++i) {
    for (int c = 0; c < 3; ++c) raw[3 * i + c] = to8(image.pixels()[i][c]);
  }
  return encode(raw.data(), image.width(), image.height(), PNG_FORMAT_RGB);
}

Bytes encode_png_mask(const BinaryMask& mask) {
  Bytes raw(mask.size());
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = mask.values()[i] ? 255 : 0;
  return encode(raw.data(), mask.width(), mask.height(), PNG_FORMAT_GRAY);
}

Bytes encode_png_indexed(const Grid<std::uint8_t>& indices, std::span<const Rgb8> palette) {
  if (palette.empty() || palette.size() > 256) throw Error(ErrorCode::InvalidArgument, "palette must hold 1..256 colors");
  for (std::uint8_t i : indices.values()) {
    if (i >= palette.size()) throw Error(ErrorCode::InvalidArgument, "palette index out of range");
  }
  Bytes colormap(palette.size() * 3);
  for (std::size_t i = 0; i < palette.size(); ++i) {
    std::copy(palette[i].begin(), palette[i].end(), colormap.begin() + static_cast<std::ptrdiff_t>(3 * i));
  }
  const Bytes raw(indices.values().begin(), indices.values().end());
  return encode(raw.data(), indices.width(), indices.height(), PNG_FORMAT_RGB_COLORMAP, colormap.data(),
                static_cast<int>(palette.size()));
}

}  // namespace patchwarp::io
