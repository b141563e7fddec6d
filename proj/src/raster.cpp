#include "patchwarp/raster.hpp"

#include <algorithm>

#include "patchwarp/error.hpp"

namespace patchwarp {

RasterImage::RasterImage(int width, int height) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw Error(ErrorCode::InvalidArgument, "negative image size");
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), Rgba{0, 0, 0, 0});
}

std::size_t count(const BinaryMask& m) {
  return static_cast<std::size_t>(std::count_if(m.values().begin(), m.values().end(), [](auto v) { return v != 0; }));
}

bool same_size(const RasterImage& a, const BinaryMask& m) noexcept {
  return a.width() == m.width() && a.height() == m.height();
}

double iou(const BinaryMask& a, const BinaryMask& b) {
  if (!same_size(a, b)) throw Error(ErrorCode::DimensionMismatch, "iou operands differ in size");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool x = a.values()[i] != 0;
    const bool y = b.values()[i] != 0;
    inter += (x && y) ? 1 : 0;
    uni += (x || y) ? 1 : 0;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

BinaryMask translate(const BinaryMask& m, int dx, int dy) {
  BinaryMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    const int sy = y - dy;
    if (sy < 0 || sy >= m.height()) continue;
    for (int x = 0; x < m.width(); ++x) {
      const int sx = x - dx;
      if (sx >= 0 && sx < m.width()) out.at(x, y) = m.at(sx, sy);
    }
  }
  return out;
}

BinaryMask erode(const BinaryMask& m, int radius) {
  BinaryMask cur = m;
  for (int r = 0; r < radius; ++r) {
    BinaryMask next(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y) {
      for (int x = 0; x < m.width(); ++x) {
        if (!cur.at(x, y)) continue;
        const bool keep = x > 0 && y > 0 && x + 1 < m.width() && y + 1 < m.height() && cur.at(x - 1, y) &&
                          cur.at(x + 1, y) && cur.at(x, y - 1) && cur.at(x, y + 1);
        next.at(x, y) = keep ? 1 : 0;
      }
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace patchwarp
