#include "patchwarp/augmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "patchwarp/error.hpp"
#include "patchwarp/rng.hpp"

namespace patchwarp {

namespace {

SplitMix64 stream(std::uint64_t seed, EraseStream s) {
  return SplitMix64::stream(seed, static_cast<std::uint64_t>(s));
}

void stamp_disc(BinaryMask& m, Point2 c, double radius) {
  const int x0 = std::max(0, static_cast<int>(std::floor(c.x - radius)));
  const int y0 = std::max(0, static_cast<int>(std::floor(c.y - radius)));
  const int x1 = std::min(m.width() - 1, static_cast<int>(std::ceil(c.x + radius)));
  const int y1 = std::min(m.height() - 1, static_cast<int>(std::ceil(c.y + radius)));
  const double r2 = radius * radius;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x + 0.5 - c.x;
      const double dy = y + 0.5 - c.y;
      if (dx * dx + dy * dy <= r2) m.at(x, y) = 1;
    }
  }
}

void clear_where(WarpedGarment& g, auto&& predicate) {
  auto px = g.image.pixels();
  auto mask = g.mask.values();
  auto prov = g.provenance.values();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!predicate(i)) continue;
    px[i] = Rgba{0, 0, 0, 0};
    mask[i] = 0;
    prov[i] = kNoRole;
  }
}

}  // namespace

void EraseConfig::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(alpha1) || !prob(alpha2)) throw Error(ErrorCode::InvalidArgument, "erase probabilities must be in [0,1]");
  const auto& s = strokes;
  if (s.min_strokes < 0 || s.min_strokes > s.max_strokes || s.min_vertices < 1 || s.min_vertices > s.max_vertices ||
      !(s.min_step >= 0.0) || s.min_step > s.max_step || !(s.min_width > 0.0) || s.min_width > s.max_width) {
    throw Error(ErrorCode::InvalidArgument, "inconsistent stroke parameter ranges");
  }
}

BinaryMask generate_stroke_mask(int width, int height, const BinaryMask& anchor, const StrokeParams& params,
                                std::uint64_t seed) {
  BinaryMask out(width, height);
  if (width == 0 || height == 0) return out;

  int bx0 = width, by0 = height, bx1 = -1, by1 = -1;
  if (same_size(anchor, out)) {
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        if (!anchor.at(x, y)) continue;
        bx0 = std::min(bx0, x);
        by0 = std::min(by0, y);
        bx1 = std::max(bx1, x);
        by1 = std::max(by1, y);
      }
    }
  }
  if (bx1 < 0) {
    bx0 = 0;
    by0 = 0;
    bx1 = width - 1;
    by1 = height - 1;
  }

  SplitMix64 rng(seed);
  const int strokes = rng.uniform_int(params.min_strokes, params.max_strokes);
  for (int s = 0; s < strokes; ++s) {
    const int vertices = rng.uniform_int(params.min_vertices, params.max_vertices);
    const double radius = 0.5 * rng.uniform(params.min_width, params.max_width);
    Point2 p{rng.uniform(bx0, bx1 + 1.0), rng.uniform(by0, by1 + 1.0)};
    double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    stamp_disc(out, p, radius);
    for (int v = 1; v < vertices; ++v) {
      angle += rng.uniform(-0.5 * std::numbers::pi, 0.5 * std::numbers::pi);
      const double step = rng.uniform(params.min_step, params.max_step);
      Point2 q{p.x + step * std::cos(angle), p.y + step * std::sin(angle)};
      q.x = std::clamp(q.x, 0.0, static_cast<double>(width));
      q.y = std::clamp(q.y, 0.0, static_cast<double>(height));
      const double len = distance(p, q);
      const double spacing = std::max(1.0, 0.25 * radius);
      const int stamps = static_cast<int>(std::ceil(len / spacing));
      for (int k = 1; k <= stamps; ++k) {
        stamp_disc(out, p + (static_cast<double>(k) / stamps) * (q - p), radius);
      }
      p = q;
    }
  }
  return out;
}

EraseOutcome random_erase_detailed(const WarpedGarment& g, const EraseConfig& cfg) {
  cfg.validate();
  EraseOutcome out{g, std::nullopt, false, BinaryMask(g.mask.width(), g.mask.height())};

  auto arm_decision = stream(cfg.seed, EraseStream::ArmDecision);
  if (arm_decision.bernoulli(cfg.alpha1)) {
    std::array<bool, kPatchRoleCount> present{};
    for (std::uint8_t r : g.provenance.values()) {
      if (r != kNoRole) present[r] = true;
    }
    std::vector<PatchRole> arms;
    for (PatchRole r : {PatchRole::LUpperArm, PatchRole::RUpperArm, PatchRole::LLowerArm, PatchRole::RLowerArm}) {
      if (present[static_cast<int>(r)]) arms.push_back(r);
    }
    if (!arms.empty()) {
      auto choice = stream(cfg.seed, EraseStream::ArmChoice);
      const PatchRole dropped = arms[choice.uniform_int(0, static_cast<int>(arms.size()) - 1)];
      const auto prov = g.provenance.values();
      clear_where(out.garment, [&](std::size_t i) { return prov[i] == static_cast<std::uint8_t>(dropped); });
      out.dropped_arm = dropped;
    }
  }

  auto free_form = stream(cfg.seed, EraseStream::FreeFormDecision);
  if (free_form.bernoulli(cfg.alpha2)) {
    out.stroke_mask = generate_stroke_mask(g.mask.width(), g.mask.height(), g.mask, cfg.strokes,
                                           derive_seed(cfg.seed, static_cast<std::uint64_t>(EraseStream::StrokeGeometry)));
    const auto strokes = out.stroke_mask.values();
    clear_where(out.garment, [&](std::size_t i) { return strokes[i] != 0; });
    out.free_form_applied = true;
  }
  return out;
}

WarpedGarment random_erase(const WarpedGarment& g, const EraseConfig& cfg) {
  return random_erase_detailed(g, cfg).garment;
}

}  // namespace patchwarp
