#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "patchwarp/error.hpp"
#include "patchwarp/fixtures.hpp"
#include "patchwarp/io.hpp"
#include "patchwarp/modulation.hpp"
#include "patchwarp/rng.hpp"

namespace patchwarp::fixtures {

namespace {

Rgba random_color(SplitMix64& rng) {
  return {static_cast<float>(rng.uniform(0.1, 0.9)), static_cast<float>(rng.uniform(0.1, 0.9)),
          static_cast<float>(rng.uniform(0.1, 0.9)), 1.0f};
}

Rgba mix(const Rgba& a, const Rgba& b, double t) {
  Rgba out{};
  for (int c = 0; c < 3; ++c) out[c] = static_cast<float>((1.0 - t) * a[c] + t * b[c]);
  out[3] = 1.0f;
  return out;
}

double segment_distance(Point2 p, Point2 a, Point2 b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

// Convex polygon, corners in positive (y-down clockwise) order.
bool inside_convex(const std::vector<Point2>& poly, Point2 p) {
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % poly.size()];
    if ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) < 0.0) return false;
  }
  return true;
}

void hash_bytes(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

}  // namespace

std::string_view to_string(TextureKind k) noexcept {
  switch (k) {
    case TextureKind::Solid: return "solid";
    case TextureKind::Checker: return "checker";
    case TextureKind::Stripes: return "stripes";
    case TextureKind::LogoDot: return "logo-dot";
  }
  return "solid";
}

RasterImage render_texture(TextureKind kind, int width, int height, std::uint64_t seed, double period) {
  SplitMix64 rng(derive_seed(seed, 100));
  const Rgba a = random_color(rng);
  const Rgba b = random_color(rng);
  const double px = rng.uniform(0.0, period);
  const double py = rng.uniform(0.0, period);
  const double theta = rng.uniform(0.0, std::numbers::pi);
  const double k = 2.0 * std::numbers::pi / period;

  RasterImage img(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double u = x + 0.5 + px;
      const double v = y + 0.5 + py;
      double t = 0.0;
      switch (kind) {
        case TextureKind::Solid: t = 0.0; break;
        case TextureKind::Checker: t = 0.5 + 0.5 * std::tanh(1.5 * std::sin(k * u) * std::sin(k * v)); break;
        case TextureKind::Stripes: t = 0.5 + 0.5 * std::sin(k * (u * std::cos(theta) + v * std::sin(theta))); break;
        case TextureKind::LogoDot: {
          const double du = std::remainder(u, period);
          const double dv = std::remainder(v, period);
          const double s = period / 5.0;
          t = std::exp(-(du * du + dv * dv) / (2.0 * s * s));
          break;
        }
      }
      img.at(x, y) = mix(a, b, t);
    }
  }
  return img;
}

PoseKeypoints canonical_tpose() {
  PoseKeypoints p;
  p.set(Joint::Neck, {0, -10});
  p.set(Joint::Nose, {0, -40});
  p.set(Joint::RShoulder, {-50, 0});
  p.set(Joint::LShoulder, {50, 0});
  p.set(Joint::RElbow, {-110, 0});
  p.set(Joint::LElbow, {110, 0});
  p.set(Joint::RWrist, {-170, 0});
  p.set(Joint::LWrist, {170, 0});
  p.set(Joint::RHip, {-30, 120});
  p.set(Joint::LHip, {30, 120});
  p.set(Joint::RKnee, {-32, 190});
  p.set(Joint::LKnee, {32, 190});
  p.set(Joint::RAnkle, {-34, 260});
  p.set(Joint::LAnkle, {34, 260});
  return p;
}

GarmentFixture make_garment(const SyntheticGarment& params) {
  GarmentFixture f;
  f.pose = canonical_tpose().translated(params.origin.x, params.origin.y);
  auto at = [&](Joint j) { return f.pose.get(j)->position; };
  const Point2 ls = at(Joint::LShoulder), rs = at(Joint::RShoulder);
  const Point2 le = at(Joint::LElbow), re = at(Joint::RElbow);
  const Point2 lw = at(Joint::LWrist), rw = at(Joint::RWrist);
  const Point2 lh = at(Joint::LHip), rh = at(Joint::RHip);
  const Point2 neck = at(Joint::Neck);

  const std::vector<Point2> torso = {{rs.x - 4, rs.y - 6}, {ls.x + 4, ls.y - 6}, {lh.x + 10, lh.y}, {rh.x - 10, rh.y}};
  const std::vector<Point2> hem = {{rh.x - 10, rh.y - 1}, {lh.x + 10, lh.y - 1}, {lh.x + 8, lh.y + 44},
                                   {rh.x - 8, rh.y + 44}};

  const RasterImage tex = render_texture(params.texture, params.width, params.height, params.seed);
  f.image = RasterImage(params.width, params.height);
  f.mask = BinaryMask(params.width, params.height);
  for (int y = 0; y < params.height; ++y) {
    for (int x = 0; x < params.width; ++x) {
      const Point2 p{x + 0.5, y + 0.5};
      const bool in = inside_convex(torso, p) || inside_convex(hem, p) || segment_distance(p, ls, le) <= 14.0 ||
                      segment_distance(p, rs, re) <= 14.0 || segment_distance(p, le, lw) <= 12.0 ||
                      segment_distance(p, re, rw) <= 12.0 || std::hypot(p.x - neck.x, p.y - neck.y - 6.0) <= 16.0;
      if (!in) continue;
      f.mask.at(x, y) = 1;
      f.image.at(x, y) = tex.at(x, y);
    }
  }
  return f;
}

GarmentFixture make_tpose_fixture(std::uint64_t seed) {
  SyntheticGarment g;
  g.seed = seed;
  return make_garment(g);
}

std::uint64_t content_hash(const RasterImage& image, const BinaryMask& mask) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::int32_t dims[4] = {image.width(), image.height(), mask.width(), mask.height()};
  hash_bytes(h, dims, sizeof dims);
  for (const Rgba& px : image.pixels()) {
    for (float v : px) {
      const std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
      hash_bytes(h, &bits, sizeof bits);
    }
  }
  hash_bytes(h, mask.values().data(), mask.size());
  return h;
}

void write_bundle(const std::filesystem::path& dir, std::uint64_t seed, double target_shift_x) {
  std::filesystem::create_directories(dir);
  const GarmentFixture f = make_tpose_fixture(seed);
  const io::Bytes source_png = io::encode_png_rgba(f.image);
  io::write_file_atomic(dir / "source.png", source_png);
  io::write_file_atomic(dir / "source_mask.png", io::encode_png_mask(f.mask));
  io::write_file_atomic(dir / "source_pose.json", io::pose_to_json(f.pose));
  io::write_file_atomic(dir / "target_pose.json", io::pose_to_json(f.pose.translated(target_shift_x, 0.0)));
  const ConvParams gamma = random_conv_params(64, 64, 3, derive_seed(seed, 200));
  const ConvParams beta = random_conv_params(64, 64, 3, derive_seed(seed, 201));
  io::write_conv_params(dir / "conv_gamma.bin", gamma);
  io::write_conv_params(dir / "conv_beta.bin", beta);

  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(content_hash(io::decode_png_rgba(source_png), f.mask)));
  const nlohmann::json meta = {
      {"seed", seed},
      {"content_hash", hash},
      {"target_shift_x", target_shift_x},
      {"files",
       {"source.png", "source_mask.png", "source_pose.json", "target_pose.json", "conv_gamma.bin", "conv_beta.bin"}},
  };
  io::write_file_atomic(dir / "fixture.json", meta.dump(2) + "\n");
}

Quad random_convex_quad(SplitMix64& rng, double scale, PatchRole role) {
  for (;;) {
    const double j = 0.15 * scale;
    const Point2 base[4] = {{0, 0}, {scale, 0}, {scale, scale}, {0, scale}};
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double c = std::cos(theta), s = std::sin(theta);
    const Point2 offset{rng.uniform(scale, 3.0 * scale), rng.uniform(scale, 3.0 * scale)};
    Quad q;
    q.role = role;
    for (int i = 0; i < 4; ++i) {
      const double x = base[i].x - 0.5 * scale + rng.uniform(-j, j);
      const double y = base[i].y - 0.5 * scale + rng.uniform(-j, j);
      q.corners[i] = {offset.x + c * x - s * y, offset.y + s * x + c * y};
    }
    if (signed_area(q) > 0.1 * scale * scale) return q;
  }
}

FeatureMap random_features(int channels, int height, int width, std::uint64_t seed) {
  SplitMix64 rng(seed);
  FeatureMap f(channels, height, width);
  for (float& v : f.values()) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  return f;
}

FeatureMap64 random_features64(int channels, int height, int width, std::uint64_t seed) {
  SplitMix64 rng(seed);
  FeatureMap64 f(channels, height, width);
  for (double& v : f.values()) v = rng.uniform(-1.0, 1.0);
  return f;
}

BinaryMask random_mask(int width, int height, double density, std::uint64_t seed) {
  SplitMix64 rng(seed);
  BinaryMask m(width, height);
  for (auto& v : m.values()) v = rng.bernoulli(density) ? 1 : 0;
  return m;
}

}  // namespace patchwarp::fixtures
