#include "patchwarp/patching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "patchwarp/error.hpp"

namespace patchwarp {

namespace {

constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "nose",  "neck",  "l_shoulder", "r_shoulder", "l_elbow", "r_elbow",  "l_wrist",
    "r_wrist", "l_hip", "r_hip",    "l_knee",     "r_knee",  "l_ankle", "r_ankle"};

Point2 unit(Point2 v) {
  const double n = std::hypot(v.x, v.y);
  return {v.x / n, v.y / n};
}

Point2 perp(Point2 u) { return {-u.y, u.x}; }

double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }

Point2 midpoint(Point2 a, Point2 b) { return 0.5 * (a + b); }

// Orthonormal frame: u along `across`, v = perp(u) pointing along `down`.
// When perp(u) points the other way both axes flip, which keeps the frame a
// rotation so rectangles built on it keep positive winding.
std::pair<Point2, Point2> body_frame(Point2 across, Point2 down) {
  Point2 u = unit(across);
  Point2 v = perp(u);
  if (dot(v, down) < 0.0) {
    u = -1.0 * u;
    v = -1.0 * v;
  }
  return {u, v};
}

Quad centered_rect(Point2 center, Point2 u, Point2 v, double width, double height, PatchRole role) {
  const Point2 hu = (0.5 * width) * u;
  const Point2 hv = (0.5 * height) * v;
  return Quad{{center - hu - hv, center + hu - hv, center + hu + hv, center - hu + hv}, role};
}

Quad hanging_rect(Point2 top_center, Point2 u, Point2 v, double width, double height, PatchRole role) {
  const Point2 hu = (0.5 * width) * u;
  const Point2 dv = height * v;
  return Quad{{top_center - hu, top_center + hu, top_center + hu + dv, top_center - hu + dv}, role};
}

// Four joints as a quad; mirrored ordering when the pose is seen from behind.
Quad joint_quad(Point2 tl, Point2 tr, Point2 br, Point2 bl, PatchRole role) {
  Quad q{{tl, tr, br, bl}, role};
  if (signed_area(q) <= 0.0) q = Quad{{tr, tl, bl, br}, role};
  return q;
}

void require_extent(double length, std::string_view what) {
  if (!(length > 1e-6)) throw Error(ErrorCode::DegenerateLayout, std::string(what) + " has zero length");
}

void append_upper(PatchLayout& out, const PoseKeypoints& pose, const LayoutParams& prm) {
  const double c = prm.min_confidence;
  const Point2 neck = pose.require(Joint::Neck, c);
  const Point2 ls = pose.require(Joint::LShoulder, c);
  const Point2 rs = pose.require(Joint::RShoulder, c);
  const Point2 le = pose.require(Joint::LElbow, c);
  const Point2 re = pose.require(Joint::RElbow, c);
  const Point2 lw = pose.require(Joint::LWrist, c);
  const Point2 rw = pose.require(Joint::RWrist, c);
  const Point2 lh = pose.require(Joint::LHip, c);
  const Point2 rh = pose.require(Joint::RHip, c);

  const double shoulder_dist = distance(ls, rs);
  const double hip_dist = distance(lh, rh);
  const double torso_height = distance(midpoint(ls, rs), midpoint(lh, rh));
  require_extent(shoulder_dist, "shoulder line (l_shoulder, r_shoulder)");
  require_extent(hip_dist, "hip line (l_hip, r_hip)");
  require_extent(torso_height, "torso (shoulders to hips)");

  const Point2 down = midpoint(lh, rh) - midpoint(ls, rs);
  const auto [su, sv] = body_frame(ls - rs, down);
  const auto [hu, hv] = body_frame(lh - rh, down);

  out.push_back({PatchRole::Torso, joint_quad(rs, ls, lh, rh, PatchRole::Torso)});
  out.push_back({PatchRole::Neck, centered_rect(neck, su, sv, prm.neck_width * shoulder_dist,
                                                prm.neck_height * shoulder_dist, PatchRole::Neck)});
  require_extent(distance(ls, le), "l_shoulder -> l_elbow");
  require_extent(distance(rs, re), "r_shoulder -> r_elbow");
  require_extent(distance(le, lw), "l_elbow -> l_wrist");
  require_extent(distance(re, rw), "r_elbow -> r_wrist");
  out.push_back({PatchRole::LUpperArm, limb_quad(ls, le, prm.width_factor, PatchRole::LUpperArm)});
  out.push_back({PatchRole::RUpperArm, limb_quad(rs, re, prm.width_factor, PatchRole::RUpperArm)});
  out.push_back({PatchRole::LLowerArm, limb_quad(le, lw, prm.width_factor, PatchRole::LLowerArm)});
  out.push_back({PatchRole::RLowerArm, limb_quad(re, rw, prm.width_factor, PatchRole::RLowerArm)});
  const double hw = prm.hip_width * hip_dist;
  const double hh = prm.hip_height * torso_height;
  out.push_back({PatchRole::LHip, hanging_rect(lh, hu, hv, hw, hh, PatchRole::LHip)});
  out.push_back({PatchRole::RHip, hanging_rect(rh, hu, hv, hw, hh, PatchRole::RHip)});
}

void append_lower(PatchLayout& out, const PoseKeypoints& pose, const LayoutParams& prm) {
  const double c = prm.min_confidence;
  const Point2 lh = pose.require(Joint::LHip, c);
  const Point2 rh = pose.require(Joint::RHip, c);
  const Point2 lk = pose.require(Joint::LKnee, c);
  const Point2 rk = pose.require(Joint::RKnee, c);
  const Point2 la = pose.require(Joint::LAnkle, c);
  const Point2 ra = pose.require(Joint::RAnkle, c);

  const double hip_dist = distance(lh, rh);
  require_extent(hip_dist, "hip line (l_hip, r_hip)");
  require_extent(distance(lh, lk), "l_hip -> l_knee");
  require_extent(distance(rh, rk), "r_hip -> r_knee");
  require_extent(distance(lk, la), "l_knee -> l_ankle");
  require_extent(distance(rk, ra), "r_knee -> r_ankle");

  const Point2 down = midpoint(lk, rk) - midpoint(lh, rh);
  const auto [u, v] = body_frame(lh - rh, down);

  out.push_back({PatchRole::Waist, centered_rect(midpoint(lh, rh), u, v, prm.waist_width * hip_dist,
                                                 prm.waist_height * hip_dist, PatchRole::Waist)});
  out.push_back({PatchRole::LUpperLeg, limb_quad(lh, lk, prm.width_factor, PatchRole::LUpperLeg)});
  out.push_back({PatchRole::RUpperLeg, limb_quad(rh, rk, prm.width_factor, PatchRole::RUpperLeg)});
  out.push_back({PatchRole::LLowerLeg, limb_quad(lk, la, prm.width_factor, PatchRole::LLowerLeg)});
  out.push_back({PatchRole::RLowerLeg, limb_quad(rk, ra, prm.width_factor, PatchRole::RLowerLeg)});
  const double d = prm.seat_depth;
  out.push_back({PatchRole::Seat, joint_quad(rh, lh, lh + d * (lk - lh), rh + d * (rk - rh), PatchRole::Seat)});
}

}  // namespace

std::string_view to_string(Joint j) noexcept { return kJointNames[static_cast<int>(j)]; }

std::optional<Joint> joint_from_string(std::string_view name) noexcept {
  for (int i = 0; i < kJointCount; ++i) {
    if (kJointNames[i] == name) return static_cast<Joint>(i);
  }
  return std::nullopt;
}

void PoseKeypoints::set(Joint j, Point2 p, double confidence) {
  joints_[static_cast<int>(j)] = Keypoint{p, confidence};
}

Point2 PoseKeypoints::require(Joint j, double min_confidence) const {
  const auto& k = get(j);
  if (!k || !(k->confidence >= min_confidence) || !std::isfinite(k->position.x) || !std::isfinite(k->position.y)) {
    throw Error(ErrorCode::MissingJoint, std::string(to_string(j)));
  }
  return k->position;
}

PoseKeypoints PoseKeypoints::translated(double dx, double dy) const {
  PoseKeypoints out = *this;
  for (auto& k : out.joints_) {
    if (k) k->position = k->position + Point2{dx, dy};
  }
  return out;
}

void PoseKeypoints::check_bounds(int width, int height) const {
  const double mx = 0.25 * width;
  const double my = 0.25 * height;
  for (int i = 0; i < kJointCount; ++i) {
    const auto& k = joints_[i];
    if (!k || k->confidence <= 0.0) continue;
    const Point2 p = k->position;
    if (p.x < -mx || p.x > width + mx || p.y < -my || p.y > height + my) {
      throw Error(ErrorCode::InvalidArgument,
                  std::string(kJointNames[i]) + " lies outside the image bounds extended by 25%");
    }
  }
}

std::string_view to_string(GarmentKind k) noexcept {
  switch (k) {
    case GarmentKind::Upper: return "upper";
    case GarmentKind::Lower: return "lower";
    case GarmentKind::Full: return "full";
  }
  return "upper";
}

std::optional<GarmentKind> garment_kind_from_string(std::string_view name) noexcept {
  if (name == "upper") return GarmentKind::Upper;
  if (name == "lower") return GarmentKind::Lower;
  if (name == "full") return GarmentKind::Full;
  return std::nullopt;
}

Quad limb_quad(Point2 a, Point2 b, double width_factor, PatchRole role) {
  const double len = distance(a, b);
  const Point2 n = perp(unit(b - a));
  const Point2 off = (0.5 * width_factor * len) * n;
  return Quad{{a - off, b - off, b + off, a + off}, role};
}

PatchLayout build_patch_layout(const PoseKeypoints& pose, GarmentKind kind, const LayoutParams& params) {
  if (!(params.width_factor > 0.0)) throw Error(ErrorCode::InvalidArgument, "width_factor must be positive");
  PatchLayout out;
  if (kind == GarmentKind::Upper || kind == GarmentKind::Full) append_upper(out, pose, params);
  if (kind == GarmentKind::Lower || kind == GarmentKind::Full) append_lower(out, pose, params);
  for (const auto& e : out) {
    try {
      validate_quad(e.quad);
    } catch (const Error& err) {
      throw Error(ErrorCode::DegenerateLayout, err.what());
    }
  }
  return out;
}

int stitch_rank(PatchRole role) noexcept {
  switch (role) {
    case PatchRole::Seat: return 0;
    case PatchRole::LUpperLeg:
    case PatchRole::RUpperLeg: return 1;
    case PatchRole::LLowerLeg:
    case PatchRole::RLowerLeg: return 2;
    case PatchRole::Waist: return 3;
    case PatchRole::Torso: return 4;
    case PatchRole::LHip:
    case PatchRole::RHip: return 5;
    case PatchRole::LUpperArm:
    case PatchRole::RUpperArm: return 6;
    case PatchRole::LLowerArm:
    case PatchRole::RLowerArm: return 7;
    case PatchRole::Neck: return 8;
    case PatchRole::Template: return 9;
  }
  return 9;
}

std::vector<NormalizedPatch> extract_and_normalize(const RasterImage& garment, const BinaryMask& garment_mask,
                                                   const PatchLayout& layout, Exec exec) {
  if (!same_size(garment, garment_mask)) {
    throw Error(ErrorCode::DimensionMismatch, "garment image and mask differ in size");
  }
  const Quad tmpl = square_quad(kTemplateSize);
  const PixelRect all{0, 0, kTemplateSize, kTemplateSize};
  std::vector<NormalizedPatch> out;
  out.reserve(layout.size());
  for (const auto& e : layout) {
    const Homography to_template = estimate_homography(e.quad, tmpl);
    WarpedRaster r = kernels::warp_perspective(garment, garment_mask, invert(to_template), e.quad, kTemplateSize,
                                               kTemplateSize, all, exec);
    out.push_back(NormalizedPatch{e.role, std::move(r.image), std::move(r.validity), to_template});
  }
  return out;
}

std::vector<RolePatch> denormalize_patches(const std::vector<NormalizedPatch>& patches,
                                           const PatchLayout& target_layout, int canvas_width, int canvas_height,
                                           Exec exec) {
  if (patches.size() != target_layout.size()) {
    throw Error(ErrorCode::RoleMismatch, std::to_string(patches.size()) + " patches for " +
                                             std::to_string(target_layout.size()) + " target quads");
  }
  const Quad tmpl = square_quad(kTemplateSize);
  std::vector<RolePatch> out;
  out.reserve(patches.size());
  for (const auto& patch : patches) {
    const auto it = std::find_if(target_layout.begin(), target_layout.end(),
                                 [&](const LayoutEntry& e) { return e.role == patch.role; });
    if (it == target_layout.end()) {
      throw Error(ErrorCode::RoleMismatch, "no target quad for " + std::string(to_string(patch.role)));
    }
    if (patch.pixels.width() != kTemplateSize || patch.pixels.height() != kTemplateSize) {
      throw Error(ErrorCode::DimensionMismatch, "normalized patch is not 64x64");
    }
    const Homography to_target = estimate_homography(tmpl, it->quad);
    const PixelRect roi = clipped_bounds(it->quad, canvas_width, canvas_height);
    WarpedRaster r = kernels::warp_perspective(patch.pixels, patch.validity, invert(to_target), tmpl, canvas_width,
                                               canvas_height, roi, exec);
    out.push_back(RolePatch{patch.role, std::move(r), to_target});
  }
  return out;
}

WarpedGarment stitch(const std::vector<RolePatch>& warped) {
  if (warped.empty()) return {};
  const int w = warped.front().raster.image.width();
  const int h = warped.front().raster.image.height();
  for (const auto& p : warped) {
    if (p.raster.image.width() != w || p.raster.image.height() != h || !same_size(p.raster.image, p.raster.validity)) {
      throw Error(ErrorCode::DimensionMismatch, "warped patches do not share canvas dimensions");
    }
  }

  std::vector<std::size_t> order(warped.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return stitch_rank(warped[a].role) < stitch_rank(warped[b].role);
  });

  WarpedGarment g{RasterImage(w, h), BinaryMask(w, h), ProvenanceMap(w, h, kNoRole)};
  for (std::size_t idx : order) {
    const auto& p = warped[idx];
    const auto valid = p.raster.validity.values();
    const auto src = p.raster.image.pixels();
    auto dst = g.image.pixels();
    auto mask = g.mask.values();
    auto prov = g.provenance.values();
    for (std::size_t i = 0; i < valid.size(); ++i) {
      if (!valid[i]) continue;
      dst[i] = src[i];
      mask[i] = 1;
      prov[i] = static_cast<std::uint8_t>(p.role);
    }
  }
  return g;
}

GarmentWarp warp_garment(const RasterImage& source, const BinaryMask& source_mask, const PoseKeypoints& source_pose,
                         const PoseKeypoints& target_pose, GarmentKind kind, const LayoutParams& params, Exec exec) {
  source_pose.check_bounds(source.width(), source.height());
  target_pose.check_bounds(source.width(), source.height());
  GarmentWarp out;
  out.source_layout = build_patch_layout(source_pose, kind, params);
  out.target_layout = build_patch_layout(target_pose, kind, params);
  out.patches = extract_and_normalize(source, source_mask, out.source_layout, exec);
  out.warped = denormalize_patches(out.patches, out.target_layout, source.width(), source.height(), exec);
  out.garment = stitch(out.warped);
  return out;
}

BinaryMask layout_union_mask(const PatchLayout& layout, int width, int height) {
  BinaryMask m(width, height);
  for (const auto& e : layout) {
    const PixelRect r = clipped_bounds(e.quad, width, height);
    for (int y = r.y0; y < r.y1; ++y) {
      for (int x = r.x0; x < r.x1; ++x) {
        if (contains(e.quad, Point2{x + 0.5, y + 0.5})) m.at(x, y) = 1;
      }
    }
  }
  return m;
}

bool is_coherent(const WarpedGarment& g) {
  if (!same_size(g.image, g.mask) || !same_size(g.mask, g.provenance)) return false;
  const auto px = g.image.pixels();
  const auto m = g.mask.values();
  const auto p = g.provenance.values();
  for (std::size_t i = 0; i < m.size(); ++i) {
    const bool alpha = px[i][3] > 0.0f;
    if ((m[i] != 0) != alpha) return false;
    if ((m[i] != 0) != (p[i] != kNoRole)) return false;
  }
  return true;
}

}  // namespace patchwarp
